#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/finite_mdp.hpp"
#include "mdp_dissip/gaussian.hpp"
#include "mdp_dissip/lqr.hpp"
#include "mdp_dissip/matrix.hpp"

namespace mdp_dissip {

// Doubles are always printed with 17 significant digits so every value
// round-trips exactly and repeated runs emit byte-identical files.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Minimal streaming JSON writer with caller-controlled key order; used for
// report output where byte-level determinism matters.
class JsonWriter {
 public:
  std::string str() const { return out_.str(); }

  void begin_object() { separator(); out_ << '{'; fresh_ = true; }
  void end_object() { out_ << '}'; fresh_ = false; }
  void begin_array() { separator(); out_ << '['; fresh_ = true; }
  void end_array() { out_ << ']'; fresh_ = false; }

  void key(const std::string& name) {
    separator();
    out_ << '"' << name << "\":";
    fresh_ = true;  // suppress the comma before the value just keyed
  }

  void value(double x) { separator(); out_ << format_double(x); }
  void value(int x) { separator(); out_ << x; }
  void value(std::size_t x) { separator(); out_ << x; }
  void value(bool b) { separator(); out_ << (b ? "true" : "false"); }
  void value(const char* s) { separator(); out_ << '"' << s << '"'; }
  void value(const std::string& s) { separator(); out_ << '"' << s << '"'; }

  void field(const std::string& name, double x) { key(name); value(x); }
  void field(const std::string& name, bool b) { key(name); value(b); }
  void field(const std::string& name, const std::string& s) { key(name); value(s); }
  void field(const std::string& name, const char* s) { key(name); value(s); }
  void field(const std::string& name, std::size_t x) { key(name); value(x); }

  void matrix_field(const std::string& name, const Matrix& m) {
    key(name);
    begin_array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      begin_array();
      for (std::size_t j = 0; j < m.cols(); ++j) value(m(i, j));
      end_array();
    }
    end_array();
  }

  void vector_field(const std::string& name, const Vector& v) {
    key(name);
    begin_array();
    for (double x : v) value(x);
    end_array();
  }

 private:
  void separator() {
    if (!fresh_) out_ << ',';
    fresh_ = false;
  }

  std::ostringstream out_;
  bool fresh_ = true;
};

namespace detail {

inline nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return j;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw InputError(what + ": expected an array of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw InputError(what + ": ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw InputError(what + ": non-numeric entry");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

inline Vector vector_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) throw InputError(what + ": non-numeric entry");
    v[i] = j[i].get<double>();
  }
  return v;
}

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& field,
                                     const std::string& path) {
  auto it = j.find(field);
  if (it == j.end()) throw InputError(path + ": missing field \"" + field + "\"");
  return *it;
}

}  // namespace detail

struct LqrProblemFile {
  LqrProblem problem;
  std::optional<GaussianMeasure> initial;  // mu0 / Sigma0, when present
};

// Problem files carry the plant and cost as nested row-major arrays under
// keys A, B, T, U, R, Sigma_w, with an optional initial measure mu0/Sigma0.
inline LqrProblemFile load_lqr_problem(const std::string& path) {
  const nlohmann::json j = detail::parse_file(path);
  using detail::matrix_from_json;
  using detail::require;
  try {
    Matrix a = matrix_from_json(require(j, "A", path), path + ": A");
    Matrix b = matrix_from_json(require(j, "B", path), path + ": B");
    SymMatrix t{matrix_from_json(require(j, "T", path), path + ": T")};
    Matrix u = matrix_from_json(require(j, "U", path), path + ": U");
    SymMatrix r{matrix_from_json(require(j, "R", path), path + ": R")};
    SpdMatrix sigma_w{matrix_from_json(require(j, "Sigma_w", path), path + ": Sigma_w")};
    LqrProblem prob(std::move(a), std::move(b), std::move(t), std::move(u), std::move(r),
                    std::move(sigma_w));
    std::optional<GaussianMeasure> initial;
    if (j.contains("mu0") || j.contains("Sigma0")) {
      Vector mu0 = detail::vector_from_json(require(j, "mu0", path), path + ": mu0");
      SpdMatrix sigma0{matrix_from_json(require(j, "Sigma0", path), path + ": Sigma0")};
      initial.emplace(std::move(mu0), std::move(sigma0));
    }
    return LqrProblemFile{std::move(prob), std::move(initial)};
  } catch (const DomainError& e) {
    throw InputError(path + ": " + e.what());
  }
}

// Fixture schema: num_states, num_actions, kernel[action][state][next],
// cost[state][action]. Row stochasticity is validated on construction.
inline FiniteMdp load_finite_mdp(const std::string& path) {
  const nlohmann::json j = detail::parse_file(path);
  using detail::require;
  const auto& js = require(j, "num_states", path);
  const auto& ja = require(j, "num_actions", path);
  if (!js.is_number_unsigned() || !ja.is_number_unsigned())
    throw InputError(path + ": num_states/num_actions must be nonnegative integers");
  const std::size_t s = js.get<std::size_t>(), a = ja.get<std::size_t>();

  const auto& jk = require(j, "kernel", path);
  if (!jk.is_array() || jk.size() != a) throw InputError(path + ": kernel must list one matrix per action");
  std::vector<double> kernel;
  kernel.reserve(a * s * s);
  for (std::size_t ai = 0; ai < a; ++ai) {
    const Matrix m = detail::matrix_from_json(jk[ai], path + ": kernel[" + std::to_string(ai) + "]");
    if (m.rows() != s || m.cols() != s)
      throw InputError(path + ": kernel[" + std::to_string(ai) + "] must be " +
                       std::to_string(s) + "x" + std::to_string(s));
    kernel.insert(kernel.end(), m.data().begin(), m.data().end());
  }

  const Matrix c = detail::matrix_from_json(require(j, "cost", path), path + ": cost");
  if (c.rows() != s || c.cols() != a)
    throw InputError(path + ": cost must be num_states x num_actions");
  return FiniteMdp(s, a, std::move(kernel), std::vector<double>(c.data()));
}

}  // namespace mdp_dissip
