#include <cstdlib>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "mdp_dissip/json_io.hpp"
#include "mdp_dissip/sampling.hpp"

namespace md = mdp_dissip;

namespace {

std::string fixture(const char* name) {
  return std::string(FIXTURES_DIR) + "/" + name;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream out(path);
  out << content;
  return path;
}

constexpr const char* kLqrBase =
    R"({"A":[[0.8,0.5],[-0.5,0.7]],"B":[[0.0],[0.5]],"T":[[1,0],[0,1]],)"
    R"("U":[[0,0]],"R":[[1]],"Sigma_w":[[2,-1],[-1,1.6]]})";

}  // namespace

TEST(LoadLqrProblem, ReadsTheShippedFixture) {
  const md::LqrProblemFile file = md::load_lqr_problem(fixture("lqr_default.json"));
  EXPECT_EQ(file.problem.dynamics.rows(), 2u);
  EXPECT_DOUBLE_EQ(file.problem.dynamics(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(file.problem.input_map(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(file.problem.noise_cov(0, 1), -1.0);
  ASSERT_TRUE(file.initial.has_value());
  EXPECT_DOUBLE_EQ(file.initial->mean[0], 1.5);
  EXPECT_DOUBLE_EQ(file.initial->covariance(1, 1), 0.2);
}

TEST(LoadLqrProblem, AcceptsAFileWithoutAnInitialMeasure) {
  const std::string path = write_temp("io_lqr_plain.json", kLqrBase);
  const md::LqrProblemFile file = md::load_lqr_problem(path);
  EXPECT_FALSE(file.initial.has_value());
}

TEST(LoadLqrProblem, RejectsMalformedInputs) {
  EXPECT_THROW(md::load_lqr_problem("/nonexistent/path.json"), md::InputError);
  EXPECT_THROW(md::load_lqr_problem(write_temp("io_lqr_syntax.json", "{not json")),
               md::InputError);

  // missing cost block
  EXPECT_THROW(md::load_lqr_problem(write_temp(
                   "io_lqr_missing.json",
                   R"({"A":[[1]],"B":[[1]],"T":[[1]],"U":[[0]],"Sigma_w":[[1]]})")),
               md::InputError);

  // ragged dynamics matrix
  EXPECT_THROW(md::load_lqr_problem(write_temp(
                   "io_lqr_ragged.json",
                   R"({"A":[[0.8,0.5],[-0.5]],"B":[[0],[0.5]],"T":[[1,0],[0,1]],)"
                   R"("U":[[0,0]],"R":[[1]],"Sigma_w":[[2,-1],[-1,1.6]]})")),
               md::InputError);

  // asymmetric state cost
  EXPECT_THROW(md::load_lqr_problem(write_temp(
                   "io_lqr_asym.json",
                   R"({"A":[[0.8,0.5],[-0.5,0.7]],"B":[[0],[0.5]],"T":[[1,0.5],[0,1]],)"
                   R"("U":[[0,0]],"R":[[1]],"Sigma_w":[[2,-1],[-1,1.6]]})")),
               md::InputError);

  // indefinite noise covariance
  EXPECT_THROW(md::load_lqr_problem(write_temp(
                   "io_lqr_indef.json",
                   R"({"A":[[0.8,0.5],[-0.5,0.7]],"B":[[0],[0.5]],"T":[[1,0],[0,1]],)"
                   R"("U":[[0,0]],"R":[[1]],"Sigma_w":[[1,2],[2,1]]})")),
               md::InputError);

  // initial mean without its covariance
  EXPECT_THROW(md::load_lqr_problem(write_temp(
                   "io_lqr_halfinit.json",
                   std::string(kLqrBase).insert(1, R"("mu0":[0,0],)"))),
               md::InputError);
}

TEST(LoadFiniteMdp, ReadsTheShippedFixture) {
  const md::FiniteMdp mdp = md::load_finite_mdp(fixture("mdp_two_state.json"));
  EXPECT_EQ(mdp.num_states(), 2u);
  EXPECT_EQ(mdp.num_actions(), 2u);
  EXPECT_DOUBLE_EQ(mdp.xi(1, 0, 1), 0.8);
  EXPECT_DOUBLE_EQ(mdp.stage_cost(1, 1), 0.5);
}

TEST(LoadFiniteMdp, RejectsMalformedInputs) {
  // sub-stochastic kernel row
  EXPECT_THROW(md::load_finite_mdp(write_temp(
                   "io_mdp_substoch.json",
                   R"({"num_states":2,"num_actions":1,)"
                   R"("kernel":[[[0.7,0.2],[0.4,0.6]]],"cost":[[1],[2]]})")),
               md::InputError);

  // kernel list length must equal the action count
  EXPECT_THROW(md::load_finite_mdp(write_temp(
                   "io_mdp_actions.json",
                   R"({"num_states":2,"num_actions":2,)"
                   R"("kernel":[[[0.5,0.5],[0.5,0.5]]],"cost":[[1,1],[2,2]]})")),
               md::InputError);

  // cost must be num_states x num_actions
  EXPECT_THROW(md::load_finite_mdp(write_temp(
                   "io_mdp_cost.json",
                   R"({"num_states":2,"num_actions":1,)"
                   R"("kernel":[[[0.5,0.5],[0.5,0.5]]],"cost":[[1,2]]})")),
               md::InputError);

  // counts must be nonnegative integers
  EXPECT_THROW(md::load_finite_mdp(write_temp(
                   "io_mdp_negstates.json",
                   R"({"num_states":-2,"num_actions":1,"kernel":[],"cost":[]})")),
               md::InputError);

  EXPECT_THROW(md::load_finite_mdp(write_temp(
                   "io_mdp_missing.json",
                   R"({"num_states":2,"num_actions":1,"cost":[[1],[2]]})")),
               md::InputError);
}

TEST(FormatDouble, RoundTripsExactly) {
  md::Rng rng(404);
  for (int i = 0; i < 1000; ++i) {
    // spread the samples over many orders of magnitude, both signs
    const double mag = std::pow(10.0, rng.uniform(-12.0, 12.0));
    const double x = (rng.uniform() < 0.5 ? -1.0 : 1.0) * mag * rng.uniform(0.0, 1.0);
    const std::string s = md::format_double(x);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), x) << s;
  }
  EXPECT_EQ(md::format_double(0.0), "0");
  EXPECT_EQ(md::format_double(1.0), "1");
  EXPECT_EQ(std::strtod(md::format_double(0.1).c_str(), nullptr), 0.1);
}

TEST(JsonWriter, EmitsExactBytesInCallerOrder) {
  md::JsonWriter w;
  w.begin_object();
  w.field("name", "demo");
  w.field("count", std::size_t{3});
  w.field("ok", true);
  w.key("values");
  w.begin_array();
  w.value(1.0);
  w.value(0.5);
  w.end_array();
  w.matrix_field("m", md::Matrix{{1.0, 2.0}, {3.0, 4.0}});
  w.vector_field("v", md::Vector{-1.0, 0.25});
  w.end_object();
  EXPECT_EQ(w.str(),
            R"({"name":"demo","count":3,"ok":true,"values":[1,0.5],)"
            R"("m":[[1,2],[3,4]],"v":[-1,0.25]})");
}

TEST(JsonWriter, OutputParsesBackToTheSameValues) {
  md::JsonWriter w;
  w.begin_object();
  w.field("x", 0.30000000000000004);
  w.field("big", 1.7014118346046923e38);
  w.end_object();
  const nlohmann::json j = nlohmann::json::parse(w.str());
  EXPECT_EQ(j["x"].get<double>(), 0.30000000000000004);
  EXPECT_EQ(j["big"].get<double>(), 1.7014118346046923e38);
}
