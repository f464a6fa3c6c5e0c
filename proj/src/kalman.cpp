#include "smc/kalman.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "smc/error.hpp"
#include "smc/filters/chain_plan.hpp"

namespace smc {
namespace {

void check_square(const Eigen::MatrixXd& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw ConfigError(std::string(what) + " must be " + std::to_string(n) + "x" + std::to_string(n));
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

KalmanResult kalman_filter(const GaussianSSM& ssm, const std::vector<Eigen::VectorXd>& y) {
  const Eigen::Index n = ssm.m0.size();
  const Eigen::Index m = ssm.H.rows();
  const std::size_t T = ssm.time_points();
  if (T == 0) throw ConfigError("Kalman filter needs at least one time point");
  if (y.size() != T) throw ConfigError("observation series length does not match the model");
  if (ssm.Q.size() != T - 1) throw ConfigError("expected one transition covariance per transition");
  check_square(ssm.A, n, "A");
  check_square(ssm.P0, n, "P0");
  if (ssm.H.cols() != n) throw ConfigError("H has the wrong number of columns");
  if (!ssm.c.empty() && ssm.c.size() != T - 1) throw ConfigError("expected one transition offset per transition");
  if (!ssm.d.empty() && ssm.d.size() != T) throw ConfigError("expected one observation offset per time point");

  KalmanResult out;
  out.steps.resize(T);
  Eigen::VectorXd mean = ssm.m0;
  Eigen::MatrixXd cov = ssm.P0;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  for (std::size_t t = 0; t < T; ++t) {
    KalmanStep& step = out.steps[t];
    if (t > 0) {
      check_square(ssm.Q[t - 1], n, "Q");
      mean = ssm.A * mean;
      if (!ssm.c.empty()) mean += ssm.c[t - 1];
      cov = symmetrize(ssm.A * cov * ssm.A.transpose() + ssm.Q[t - 1]);
    }
    step.predicted_mean = mean;
    step.predicted_cov = cov;

    if (y[t].size() > 0) {
      if (y[t].size() != m) throw ConfigError("observation " + std::to_string(t + 1) + " has the wrong size");
      check_square(ssm.R[t], m, "R");
      Eigen::VectorXd innovation = y[t] - ssm.H * mean;
      if (!ssm.d.empty()) innovation -= ssm.d[t];
      const Eigen::MatrixXd S = symmetrize(ssm.H * cov * ssm.H.transpose() + ssm.R[t]);
      Eigen::LLT<Eigen::MatrixXd> llt(S);
      if (llt.info() != Eigen::Success)
        throw NumericalError("Kalman filter: innovation covariance not positive definite at t=" +
                             std::to_string(t + 1));
      const Eigen::MatrixXd gain = llt.solve(ssm.H * cov).transpose();
      mean += gain * innovation;
      const Eigen::MatrixXd J = I - gain * ssm.H;
      cov = symmetrize(J * cov * J.transpose() + gain * ssm.R[t] * gain.transpose());
      step.gain = gain;

      const Eigen::MatrixXd L = llt.matrixL();
      const double log_det = 2.0 * L.diagonal().array().log().sum();
      const double quad = innovation.dot(llt.solve(innovation));
      step.log_likelihood =
          -0.5 * (static_cast<double>(m) * std::log(2.0 * std::numbers::pi) + log_det + quad);
      out.log_likelihood += step.log_likelihood;
    }
    Eigen::LLT<Eigen::MatrixXd> check(cov);
    if (check.info() != Eigen::Success)
      throw NumericalError("Kalman filter: filtering covariance not positive definite at t=" + std::to_string(t + 1));
    step.mean = mean;
    step.cov = cov;
  }
  return out;
}

GaussianExtraction extract_gaussian(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                                    std::span<const NodeId> held) {
  GaussianExtraction ex;
  const ChainPlan plan = build_chain_plan(graph, latent, held);
  const std::size_t T = plan.size();
  const std::set<NodeId> initial(plan.initial.begin(), plan.initial.end());
  const std::set<NodeId> chain(plan.latent.begin(), plan.latent.end());
  const auto is_variable = [&](NodeId id) { return chain.count(id) > 0 || initial.count(id) > 0; };

  auto fail = [&](NodeId id, const std::string& why) {
    ex.ssm.reset();
    ex.mismatch = "'" + graph.node(id).name + "': " + why;
    ex.node = id;
    return ex;
  };

  // Evaluates mean (affine) and variance (constant) of a normal node.
  struct Normal {
    AffineForm mean;
    double variance = 0.0;
  };
  auto read_normal = [&](NodeId id, std::string& why) -> std::optional<Normal> {
    const Node& n = graph.node(id);
    if (n.dist.kind != DistKind::normal) {
      why = "distribution is " + std::string(dist_name(n.dist.kind)) + ", not normal";
      return std::nullopt;
    }
    if (references(graph, n.params[1], is_variable)) {
      why = "variance depends on the latent state";
      return std::nullopt;
    }
    auto form = affine_form(graph, n.params[0], is_variable, state.values);
    if (!form) {
      why = "mean is not linear in the latent state";
      return std::nullopt;
    }
    Normal out{*form, 0.0};
    const double precision = convert_scale(n.dist.scale, n.params[1].evaluate(state.values));
    out.variance = 1.0 / precision;
    if (!(precision > 0.0) || !std::isfinite(out.variance) || !std::isfinite(out.mean.constant)) {
      why = "mean or variance is not a finite constant";
      return std::nullopt;
    }
    return out;
  };
  auto coefficient = [](const AffineForm& f, NodeId id) {
    auto it = f.coefficients.find(id);
    return it == f.coefficients.end() ? 0.0 : it->second;
  };

  GaussianSSM ssm;
  ssm.m0 = Eigen::VectorXd::Zero(1);
  ssm.P0 = Eigen::MatrixXd::Zero(1, 1);
  ssm.A = Eigen::MatrixXd::Zero(1, 1);
  std::optional<Eigen::RowVectorXd> H;
  std::size_t obs_count = 0;
  std::string why;

  // Initial state, with any initial nodes integrated out.
  {
    const NodeId x1 = plan.latent.front();
    auto first = read_normal(x1, why);
    if (!first) return fail(x1, why);
    double m0 = first->mean.constant;
    double p0 = first->variance;
    for (const auto& [id, a] : first->mean.coefficients) {
      if (!initial.count(id)) return fail(x1, "mean depends on '" + graph.node(id).name + "'");
      auto init = read_normal(id, why);
      if (!init) return fail(id, why);
      if (!init->mean.coefficients.empty()) return fail(id, "mean depends on the latent state");
      m0 += a * init->mean.constant;
      p0 += a * a * init->variance;
    }
    ssm.m0[0] = m0;
    ssm.P0(0, 0) = p0;
  }

  for (std::size_t t = 0; t < T; ++t) {
    const TimeStep& step = plan.steps[t];
    if (t > 0) {
      auto tr = read_normal(step.latent, why);
      if (!tr) return fail(step.latent, why);
      const NodeId prev = plan.steps[t - 1].latent;
      for (const auto& [id, a] : tr->mean.coefficients)
        if (id != prev) return fail(step.latent, "mean depends on '" + graph.node(id).name + "'");
      const double a = coefficient(tr->mean, prev);
      if (t == 1) {
        ssm.A(0, 0) = a;
      } else if (a != ssm.A(0, 0)) {
        return fail(step.latent, "transition coefficient varies over time");
      }
      ssm.Q.push_back(Eigen::MatrixXd::Constant(1, 1, tr->variance));
      ssm.c.push_back(Eigen::VectorXd::Constant(1, tr->mean.constant));
    }

    Eigen::RowVectorXd h(step.data.size());
    Eigen::VectorXd d(step.data.size()), y(step.data.size()), r(step.data.size());
    for (std::size_t i = 0; i < step.data.size(); ++i) {
      const NodeId id = step.data[i];
      auto obs = read_normal(id, why);
      if (!obs) return fail(id, why);
      for (const auto& [ref, b] : obs->mean.coefficients)
        if (ref != step.latent) return fail(id, "mean depends on '" + graph.node(ref).name + "'");
      h[i] = coefficient(obs->mean, step.latent);
      d[i] = obs->mean.constant;
      r[i] = obs->variance;
      y[i] = state[id];
    }
    if (step.data.empty()) {
      ssm.R.push_back(Eigen::MatrixXd(0, 0));
      ssm.d.push_back(Eigen::VectorXd(0));
    } else {
      if (!H) {
        H = h;
        obs_count = step.data.size();
      } else if (step.data.size() != obs_count || h != *H) {
        return fail(step.data.front(), "observation coefficients vary over time");
      }
      ssm.R.push_back(r.asDiagonal());
      ssm.d.push_back(d);
    }
    ex.y.push_back(y);
  }
  // The observation rows are fixed once known; empty entries are missing.
  ssm.H = H ? Eigen::MatrixXd(H->transpose()) : Eigen::MatrixXd(0, 1);
  for (std::size_t t = 0; t < T; ++t)
    if (ex.y[t].size() == 0) {
      ssm.R[t] = Eigen::MatrixXd::Zero(ssm.H.rows(), ssm.H.rows());
      ssm.d[t] = Eigen::VectorXd::Zero(ssm.H.rows());
    }
  ex.ssm = std::move(ssm);
  return ex;
}

}  // namespace smc
