#pragma once

// Umbrella header: dissipation certificates for optimally controlled
// stochastic linear systems, scalar comparison certificates, and finite-MDP
// steady-state tooling.

#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/matrix.hpp"
#include "mdp_dissip/eigen.hpp"
#include "mdp_dissip/spd.hpp"
#include "mdp_dissip/lyapunov.hpp"
#include "mdp_dissip/riccati.hpp"
#include "mdp_dissip/gaussian.hpp"
#include "mdp_dissip/scalar_certificates.hpp"
#include "mdp_dissip/lqr.hpp"
#include "mdp_dissip/sampling.hpp"
#include "mdp_dissip/sweep.hpp"
#include "mdp_dissip/property_suite.hpp"
#include "mdp_dissip/finite_mdp.hpp"
#include "mdp_dissip/json_io.hpp"
