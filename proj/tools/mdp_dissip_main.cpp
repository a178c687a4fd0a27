// Command-line front end: certify LQR problems, dump certificate
// trajectories, and run the finite-MDP demonstration suite.
//
// Exit codes: 0 when every requested check passed, 1 when a check was
// violated, 2 for malformed input.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdp_dissip/mdp_dissip.hpp"

namespace md = mdp_dissip;

namespace {

std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("MDP_DISSIP_SEED")) {
    const std::string s(env);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw md::InputError("MDP_DISSIP_SEED: expected a nonnegative integer, got \"" +
                           s + "\"");
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw md::InputError("MDP_DISSIP_SEED: value out of range: \"" + s + "\"");
    }
  }
  return 0;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw md::InputError("cannot write " + out_path);
  out << text << "\n";
}

void write_certificate(md::JsonWriter& w, const md::LqrCertificate& cert) {
  w.key("certificate");
  w.begin_object();
  w.matrix_field("gain", cert.gain);
  w.matrix_field("closed_loop", cert.closed_loop);
  w.matrix_field("cost_weight", cert.cost_weight.matrix());
  w.matrix_field("steady_state_cov", cert.steady_state_cov.matrix());
  w.field("steady_state_cost", cert.steady_state_cost);
  w.matrix_field("whitened_closed_loop", cert.whitened_closed_loop);
  w.matrix_field("whitened_noise", cert.whitened_noise.matrix());
  w.matrix_field("storage_weight", cert.storage_weight.matrix());
  w.field("sigma_max", cert.sigma_max);
  w.field("beta_kl", cert.beta_kl);
  w.field("kappa_kl", cert.kappa_kl);
  w.field("varrho_kl", cert.varrho_kl);
  w.field("beta_w2", cert.beta_w2);
  w.field("kappa_w2", cert.kappa_w2);
  w.field("varrho_w2", cert.varrho_w2);
  w.end_object();
}

void write_sweep(md::JsonWriter& w, const md::VerificationReport& rep) {
  w.begin_object();
  w.field("kind", md::to_string(rep.kind));
  w.field("count", rep.count);
  w.field("seed", static_cast<std::size_t>(rep.seed));
  w.field("bound_constant", rep.bound_constant);
  w.field("min_margin", rep.min_margin);
  w.field("violations", rep.violations);
  w.field("argmin_index", rep.argmin_index);
  if (rep.argmin) {
    w.vector_field("argmin_mean", rep.argmin->mean);
    w.matrix_field("argmin_cov", rep.argmin->covariance.matrix());
  }
  w.field("empirical_ratio", rep.empirical_ratio);
  w.field("pass", rep.pass);
  w.end_object();
}

void write_property_suite(md::JsonWriter& w, const md::PropertySuiteReport& deep) {
  w.key("deep");
  w.begin_object();
  w.field("contraction_cases", deep.contraction_cases);
  w.field("contraction_failures", deep.contraction_failures);
  w.field("contraction_max_ratio", deep.contraction_max_ratio);
  w.field("decrease_cases", deep.decrease_cases);
  w.field("decrease_failures", deep.decrease_failures);
  w.field("entropy_step_cases", deep.entropy_step_cases);
  w.field("entropy_step_failures", deep.entropy_step_failures);
  w.field("entropy_step_min", deep.entropy_step_min);
  w.field("vartheta_points", deep.vartheta_points);
  w.field("vartheta_min", deep.vartheta_min);
  w.field("g_w2_points", deep.g_w2_points);
  w.field("g_w2_min", deep.g_w2_min);
  w.field("whitening_residual", deep.whitening_residual);
  w.field("storage_residual", deep.storage_residual);
  w.field("steady_state_residual", deep.steady_state_residual);
  w.field("pass", deep.pass());
  w.end_object();
}

int cmd_certify(const std::string& config, const std::string& out, std::size_t sweep_count,
                std::uint64_t seed, const std::string& kind, bool deep) {
  const md::LqrProblemFile file = md::load_lqr_problem(config);
  const md::LqrCertificate cert = md::certify(file.problem);
  const md::CertificateResiduals residuals = md::certificate_residuals(cert);

  std::vector<md::DissimilarityKind> kinds;
  if (kind == "kl" || kind == "both") kinds.push_back(md::DissimilarityKind::kl);
  if (kind == "w2" || kind == "both") kinds.push_back(md::DissimilarityKind::wasserstein2);

  const md::SweepConfig cfg = md::default_sweep_config(cert, sweep_count, seed);
  std::vector<md::VerificationReport> sweeps;
  for (md::DissimilarityKind k : kinds)
    sweeps.push_back(md::verify_dissipativity_sweep(cert, k, cfg));

  std::optional<md::PropertySuiteReport> suite;
  if (deep) suite = md::run_property_suite(cert, seed);

  bool pass = residuals.pass();
  for (const auto& s : sweeps) pass = pass && s.pass;
  if (suite) pass = pass && suite->pass();

  md::JsonWriter w;
  w.begin_object();
  w.field("command", "certify");
  w.field("config", config);
  w.field("seed", static_cast<std::size_t>(seed));
  w.field("sweep_count", sweep_count);
  write_certificate(w, cert);
  w.key("invariants");
  w.begin_object();
  w.field("whitening_residual", residuals.whitening);
  w.field("storage_residual", residuals.storage_fixed_point);
  w.field("steady_state_residual", residuals.steady_state);
  w.field("pass", residuals.pass());
  w.end_object();
  w.key("sweeps");
  w.begin_array();
  for (const auto& s : sweeps) write_sweep(w, s);
  w.end_array();
  if (suite) write_property_suite(w, *suite);
  w.field("pass", pass);
  w.end_object();
  emit(w.str(), out);

  std::cerr << "certify: " << (pass ? "pass" : "FAIL");
  for (const auto& s : sweeps)
    std::cerr << "  " << md::to_string(s.kind) << " min margin " << s.min_margin;
  std::cerr << "\n";
  return pass ? 0 : 1;
}

int cmd_trajectory(const std::string& config, const std::string& out, std::size_t steps,
                   const std::string& kind) {
  const md::LqrProblemFile file = md::load_lqr_problem(config);
  if (!file.initial)
    throw md::InputError(config + ": trajectory needs mu0 and Sigma0");
  const md::LqrCertificate cert = md::certify(file.problem);
  const md::DissimilarityKind k =
      kind == "kl" ? md::DissimilarityKind::kl : md::DissimilarityKind::wasserstein2;
  const auto records = md::simulate_trajectory(*file.initial, cert, steps, k);

  const std::size_t n = cert.dim();
  std::string csv = "k";
  for (std::size_t i = 0; i < n; ++i) csv += ",mu" + std::to_string(i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      csv += ",sigma" + std::to_string(i) + std::to_string(j);
  csv += ",stage_cost,storage,rotated_cost,d_kl,w2,bound\n";
  for (const auto& rec : records) {
    csv += std::to_string(rec.step);
    for (std::size_t i = 0; i < n; ++i) csv += "," + md::format_double(rec.measure.mean[i]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        csv += "," + md::format_double(rec.measure.covariance(i, j));
    csv += "," + md::format_double(rec.stage_cost);
    csv += "," + md::format_double(rec.storage);
    csv += "," + md::format_double(rec.rotated_cost);
    csv += "," + md::format_double(rec.d_kl);
    csv += "," + md::format_double(rec.w2);
    csv += "," + md::format_double(rec.bound);
    csv += "\n";
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw md::InputError("cannot write " + out);
    f << csv;
  }
  std::cerr << "trajectory: " << records.size() << " records (" << kind << ")\n";
  return 0;
}

int cmd_mdp(const std::string& config, const std::string& out, std::size_t steps,
            std::uint64_t seed) {
  const md::FiniteMdp mdp = md::load_finite_mdp(config);
  const md::SteadyStateSolution steady = md::solve_steady_state(mdp);
  const md::AverageCostSolution rvi = md::relative_value_iteration(mdp);
  const double gain_gap = std::abs(rvi.gain - steady.steady_cost);
  const bool policy_matches = rvi.policy.action == steady.policy.action;

  const auto rho0 = md::SimplexDistribution::dirac(mdp.num_states(), 0);
  const md::TelescopingReport tele =
      md::telescoping_check(rho0, steady.policy, mdp, steady.steady_cost, steps);

  const std::size_t witness_cases = 20;
  double max_abs_mean = 0.0;
  bool all_preclude = true;
  std::size_t support_size = 0;
  for (std::size_t i = 0; i < witness_cases; ++i) {
    md::Rng rng(md::splitmix64(seed ^ md::splitmix64(0x500000 + i)));
    md::Vector lambda(mdp.num_states());
    for (double& l : lambda) l = rng.uniform(-3.0, 3.0);
    const md::WitnessReport rep = md::stationarity_witness(mdp, steady.policy, lambda);
    max_abs_mean = std::max(max_abs_mean, std::abs(rep.stationary_mean));
    all_preclude = all_preclude && rep.precludes_strict_surplus;
    support_size = rep.support_size;
  }
  const bool witness_ok = all_preclude && max_abs_mean <= 1e-8;

  const bool pass =
      gain_gap <= 1e-8 && rvi.residual <= 1e-9 && tele.holds && witness_ok;

  md::JsonWriter w;
  w.begin_object();
  w.field("command", "mdp");
  w.field("config", config);
  w.field("seed", static_cast<std::size_t>(seed));
  w.field("num_states", mdp.num_states());
  w.field("num_actions", mdp.num_actions());
  w.key("steady_state");
  w.begin_object();
  w.key("policy");
  w.begin_array();
  for (std::size_t a : steady.policy.action) w.value(a);
  w.end_array();
  w.vector_field("rho_star", steady.rho_star.probs());
  w.field("steady_cost", steady.steady_cost);
  w.field("skipped_policies", steady.skipped_policies);
  w.end_object();
  w.key("value_iteration");
  w.begin_object();
  w.field("gain", rvi.gain);
  w.vector_field("bias", rvi.bias);
  w.key("policy");
  w.begin_array();
  for (std::size_t a : rvi.policy.action) w.value(a);
  w.end_array();
  w.field("residual", rvi.residual);
  w.field("gain_gap", gain_gap);
  w.field("policy_matches", policy_matches);
  w.end_object();
  w.key("telescoping");
  w.begin_object();
  w.field("steps", steps);
  w.field("max_violation", tele.max_violation);
  w.key("negative_excess_steps");
  w.begin_array();
  for (std::size_t k : tele.negative_excess_steps) w.value(k);
  w.end_array();
  w.field("holds", tele.holds);
  w.end_object();
  w.key("witness");
  w.begin_object();
  w.field("cases", witness_cases);
  w.field("support_size", support_size);
  w.field("max_abs_stationary_mean", max_abs_mean);
  w.field("all_preclude_strict_surplus", all_preclude);
  w.field("pass", witness_ok);
  w.end_object();
  w.field("pass", pass);
  w.end_object();
  emit(w.str(), out);

  std::cerr << "mdp: " << (pass ? "pass" : "FAIL") << "  gain " << rvi.gain
            << "  gap " << gain_gap << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissipation certificates for stochastically driven optimal control"};
  app.require_subcommand(1);

  std::string config, out, kind_certify = "both", kind_traj = "kl";
  std::size_t sweep_count = 1000, steps_traj = 30, steps_mdp = 50;
  std::uint64_t seed_value = 0;
  bool deep = false;

  CLI::App* certify = app.add_subcommand("certify", "build a certificate and sweep it");
  certify->add_option("--config", config, "LQR problem JSON")->required();
  certify->add_option("--out", out, "report path (stdout when omitted)");
  certify->add_option("--sweep", sweep_count, "number of sampled measures");
  CLI::Option* certify_seed = certify->add_option("--seed", seed_value, "sampler seed");
  certify->add_option("--kind", kind_certify, "dissimilarity: kl, w2, or both")
      ->check(CLI::IsMember({"kl", "w2", "both"}));
  certify->add_flag("--deep", deep, "also run the randomized property suite");

  CLI::App* trajectory = app.add_subcommand("trajectory", "closed-loop functional traces");
  trajectory->add_option("--config", config, "LQR problem JSON with mu0/Sigma0")->required();
  trajectory->add_option("--out", out, "CSV path (stdout when omitted)");
  trajectory->add_option("--steps", steps_traj, "number of propagation steps");
  trajectory->add_option("--kind", kind_traj, "dissimilarity: kl or w2")
      ->check(CLI::IsMember({"kl", "w2"}));

  CLI::App* mdp = app.add_subcommand("mdp", "finite-MDP demonstration suite");
  mdp->add_option("--config", config, "MDP fixture JSON")->required();
  mdp->add_option("--out", out, "report path (stdout when omitted)");
  mdp->add_option("--steps", steps_mdp, "telescoping horizon");
  CLI::Option* mdp_seed = mdp->add_option("--seed", seed_value, "witness sampler seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (certify->parsed()) {
      const std::uint64_t seed = resolve_seed(certify_seed->count() > 0, seed_value);
      return cmd_certify(config, out, sweep_count, seed, kind_certify, deep);
    }
    if (trajectory->parsed()) return cmd_trajectory(config, out, steps_traj, kind_traj);
    const std::uint64_t seed = resolve_seed(mdp_seed->count() > 0, seed_value);
    return cmd_mdp(config, out, steps_mdp, seed);
  } catch (const md::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const md::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const md::Error& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  }
}
