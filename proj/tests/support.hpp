#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "smc/cli/io.hpp"
#include "smc/lang/compile.hpp"
#include "smc/lang/parser.hpp"
#include "smc/runtime.hpp"

namespace testing_support {

inline std::string data_path(const std::string& name) { return std::string(SMC_TEST_DATA) + "/" + name; }

struct Model {
  smc::ModelGraph graph;
  smc::ModelState state;
};

inline Model load(const std::string& source, const smc::lang::CompileInputs& inputs) {
  Model m{smc::lang::compile(smc::lang::parse(source), inputs), {}};
  m.state = smc::make_state(m.graph);
  return m;
}

inline std::vector<double> lg_observations() { return smc::cli::read_data_csv(data_path("lg.csv")).at("y"); }

// The linear-Gaussian example with the stored data set.
inline Model lg_model(std::vector<double> y = lg_observations()) {
  smc::lang::CompileInputs in;
  in.data["y"] = std::move(y);
  in.latent = {"x"};
  return load(smc::cli::read_text(data_path("lg.mod")), in);
}

inline Model sv_model() {
  smc::lang::CompileInputs in;
  in.constants = smc::cli::read_number_map(data_path("sv_constants.json"));
  in.inits = smc::cli::read_number_map(data_path("sv_params.json"));
  in.data = smc::cli::read_data_csv(data_path("sv.csv"));
  in.latent = {"x"};
  return load(smc::cli::read_text(data_path("sv.mod")), in);
}

// Scalar Kalman recursion written out longhand, used to cross-check the
// library's matrix implementation.
struct ScalarKalman {
  std::vector<double> mean, var, gain;
  double loglik = 0.0;
};

inline ScalarKalman scalar_kalman(const std::vector<double>& y, double a, double q, double h, double r, double m0,
                                  double p0) {
  ScalarKalman out;
  double m = m0, p = p0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (t > 0) {
      m = a * m;
      p = a * a * p + q;
    }
    const double s = h * h * p + r;
    const double k = p * h / s;
    const double e = y[t] - h * m;
    out.loglik += -0.5 * std::log(2 * std::numbers::pi * s) - 0.5 * e * e / s;
    m += k * e;
    p = (1 - k * h) * p;
    out.mean.push_back(m);
    out.var.push_back(p);
    out.gain.push_back(k);
  }
  return out;
}

inline ScalarKalman lg_oracle(const std::vector<double>& y) { return scalar_kalman(y, 0.8, 1.0, 1.0, 0.5, 0.0, 1.0); }

constexpr double kZ975 = 1.959963984540054;

}  // namespace testing_support
