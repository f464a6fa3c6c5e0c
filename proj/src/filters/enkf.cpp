#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "detail.hpp"
#include "smc/filters.hpp"
#include "smc/filters/parallel.hpp"

namespace smc {
namespace {

constexpr double kMaxCondition = 1e12;

void check_observations(const ModelGraph& graph, const ChainPlan& plan) {
  const std::set<NodeId> latent(plan.latent.begin(), plan.latent.end());
  const auto is_latent = [&](NodeId id) { return latent.count(id) > 0; };
  for (const TimeStep& step : plan.steps) {
    for (NodeId id : step.data) {
      const Node& n = graph.node(id);
      if (n.dist.kind != DistKind::normal)
        throw ConfigError("ensemble Kalman filter needs normal observations; '" + n.name + "' is " +
                          std::string(dist_name(n.dist.kind)));
      if (references(graph, n.params[1], is_latent))
        throw ConfigError("ensemble Kalman filter needs observation noise independent of the latent state; '" +
                          n.name + "' has a state-dependent variance");
    }
  }
}

}  // namespace

FilterResult enkf(const ModelGraph& graph, const ModelState& state, std::string_view latent, const FilterConfig& config,
                  const Rng& rng) {
  config.validate();
  if (config.particles < 2) throw ConfigError("ensemble Kalman filter needs at least 2 particles");
  const ChainPlan plan = build_chain_plan(graph, latent, config.held);
  check_observations(graph, plan);
  const std::size_t K = config.particles;
  const std::size_t T = plan.size();

  FilterResult result = detail::make_result(K, T, config.save_all, false);
  result.latent = plan.latent;
  result.gains.resize(T);

  std::vector<double> prev_x(K);
  Eigen::VectorXd x(K);
  std::vector<std::uint32_t> parents(K);
  std::iota(parents.begin(), parents.end(), 0u);
  std::vector<std::size_t> identity(K);
  std::iota(identity.begin(), identity.end(), std::size_t{0});

  for (std::size_t t = 0; t < T; ++t) {
    const TimeStep& step = plan.steps[t];
    const NodeId this_node[] = {step.latent};
    const NodeId prev_node = t > 0 ? plan.steps[t - 1].latent : 0;
    const std::size_t M = step.data.size();
    // Predicted observation means g(x~) per particle, and noise variances.
    Eigen::MatrixXd gy(M, K), noise_var(M, K);

    parallel_for(K, config.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
      ModelState s = state;
      for (std::size_t k = begin; k < end; ++k) {
        Rng r = rng.derive({stream::kPropagate, t, k});
        if (t == 0) {
          simulate(graph, s, plan.initial, r);
        } else {
          s[prev_node] = prev_x[k];
        }
        calculate(graph, s, step.prev_determ);
        simulate(graph, s, this_node, r);
        calculate(graph, s, step.this_determ);
        x[k] = s[step.latent];
        for (std::size_t m = 0; m < M; ++m) {
          const NodeId id = step.data[m];
          const auto p = resolve_params(graph, s, id);
          gy(m, k) = p[0];
          noise_var(m, k) = 1.0 / convert_scale(graph.node(id).dist.scale, p[1]);
          if (!(noise_var(m, k) > 0.0) || !std::isfinite(noise_var(m, k)))
            throw ParameterDomainError("node '" + graph.node(id).name + "': observation variance must be positive");
        }
      }
    });

    if (M > 0) {
      Eigen::VectorXd y(M);
      for (std::size_t m = 0; m < M; ++m) y[m] = state[step.data[m]];
      const Eigen::VectorXd R = noise_var.col(0);

      const Eigen::RowVectorXd ex = (x.array() - x.mean()).matrix().transpose();
      const Eigen::MatrixXd ey = gy.colwise() - gy.rowwise().mean();
      const double scale = 1.0 / static_cast<double>(K - 1);
      const Eigen::RowVectorXd pxy = scale * ex * ey.transpose();
      // The observation noise enters the innovation covariance so that the
      // gain matches the Kalman gain in the linear-Gaussian limit.
      Eigen::MatrixXd pyy = scale * ey * ey.transpose();
      pyy.diagonal() += R;

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pyy, Eigen::EigenvaluesOnly);
      const double lo = eig.eigenvalues().minCoeff();
      const double hi = eig.eigenvalues().maxCoeff();
      if (!(lo > 0.0) || hi / lo > kMaxCondition)
        throw NumericalError("ensemble Kalman filter: innovation covariance is singular at t=" +
                             std::to_string(t + 1));
      const Eigen::RowVectorXd gain = pyy.ldlt().solve(pxy.transpose()).transpose();
      result.gains[t] = gain;

      for (std::size_t k = 0; k < K; ++k) {
        Rng r = rng.derive({stream::kObsNoise, t, k});
        double innovation = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
          const double v = std::sqrt(R[m]) * sample({DistKind::normal, ScaleTag::precision}, std::array{0.0, 1.0}, r);
          innovation += gain[m] * (y[m] + v - gy(m, k));
        }
        x[k] += innovation;
      }
    } else {
      result.gains[t] = Eigen::MatrixXd(1, 0);
    }

    for (std::size_t k = 0; k < K; ++k) prev_x[k] = x[k];
    detail::store_equal(result, t, prev_x, identity);
    detail::store_ancestors(result, t, parents);
  }
  return result;
}

}  // namespace smc
