#include "gnar/forecast.hpp"

#include "gnar/errors.hpp"

#include <cmath>

namespace gnar {

Standardized standardize(const Realization& real, int T0) {
  if (T0 < 2) throw ValidationError("standardization window must have at least two points");
  if (T0 > real.T()) throw ValidationError("standardization window longer than the series");
  if (real.has_missing()) throw ValidationError("standardization needs a complete panel");
  Standardized out;
  const auto window = real.values.leftCols(T0);
  out.params.T0 = T0;
  out.params.mean = window.rowwise().mean();
  out.params.scale =
      ((window.colwise() - out.params.mean).rowwise().squaredNorm() / static_cast<double>(T0)).cwiseSqrt();
  for (Eigen::Index i = 0; i < out.params.scale.size(); ++i)
    if (out.params.scale(i) == 0.0)
      throw ValidationError("node " + std::to_string(i + 1) + " is constant over the window");
  out.data = real;
  out.data.values = out.params.scale.cwiseInverse().asDiagonal() *
                    (real.values.colwise() - out.params.mean);
  return out;
}

Realization unstandardize(const Realization& real, const StandardizationParams& params) {
  if (real.d() != params.mean.size()) throw ValidationError("parameter size does not match the panel");
  Realization out = real;
  out.values = (params.scale.asDiagonal() * real.values).colwise() + params.mean;
  return out;
}

Eigen::VectorXd unstandardize_forecast(const Eigen::VectorXd& y_hat, const StandardizationParams& params) {
  if (y_hat.size() != params.mean.size()) throw ValidationError("forecast size does not match parameters");
  return params.scale.cwiseProduct(y_hat) + params.mean;
}

Realization difference(const Realization& real, int lag) {
  if (lag < 1) throw ValidationError("difference lag must be positive");
  if (real.T() <= lag) throw ValidationError("series not longer than the difference lag");
  Realization out;
  out.values = real.values.rightCols(real.T() - lag) - real.values.leftCols(real.T() - lag);
  if (real.missing.size() > 0)
    out.missing = real.missing.rightCols(real.T() - lag).array() || real.missing.leftCols(real.T() - lag).array();
  out.first_time = real.first_time + lag;
  return out;
}

Eigen::VectorXd forecast_one_step(const ParameterVector& theta, const ModelOrder& order,
                                  const Realization& history, const NetworkContext& ctx) {
  if (history.T() < order.p())
    throw ValidationError("history of length " + std::to_string(history.T()) +
                          " is shorter than the lag order " + std::to_string(order.p()));
  if (history.has_missing()) throw ValidationError("forecast history must be complete");
  return conditional_mean(order, theta, ctx, history.values, history.first_time + history.T());
}

Eigen::VectorXd forecast_one_step(const FitResult& fit, const Realization& history,
                                  const NetworkContext& ctx) {
  return forecast_one_step(fit.theta, fit.order, history, ctx);
}

Eigen::VectorXd naive_forecast(const Realization& history) {
  if (history.T() < 1) throw ValidationError("empty history");
  return history.values.col(history.T() - 1);
}

VarBaseline fit_var_baseline(const Realization& panel, int p) {
  const int d = panel.d(), T = panel.T();
  if (p < 1) throw ValidationError("VAR order must be positive");
  if (static_cast<long long>(d) * p >= T - p)
    throw ValidationError("underdetermined: a VAR(" + std::to_string(p) + ") on " + std::to_string(d) +
                          " nodes needs more than " + std::to_string(d * p + p) + " observations, got " +
                          std::to_string(T));
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) edges.push_back({i, j});
  VarBaseline vb;
  vb.order = make_var_order(d, p);
  WeightsMatrix W = WeightsMatrix::Ones(d, d);
  W.diagonal().setZero();
  if (d == 1) {
    // A single node has no neighbours; the model is a plain AR(p).
    vb.order.communities[0].s.assign(p, 0);
    vb.context = {singleton_partition(1), {}, WeightsSequence(W)};
  } else {
    vb.context = {singleton_partition(d), stage_adjacency(build_network(edges, d), 1), WeightsSequence(W)};
  }
  vb.fit = fit_ols(build_design(panel, vb.order, vb.context));
  vb.phi = var_matrices(vb.order, vb.fit.theta, W, vb.context.stages, vb.context.partition);
  vb.forecast = forecast_one_step(vb.fit, panel, vb.context);
  return vb;
}

}  // namespace gnar
