#pragma once

#include "gnar/errors.hpp"
#include "gnar/fit.hpp"
#include "gnar/model_order.hpp"
#include "gnar/network.hpp"
#include "gnar/simulate.hpp"

#include <Eigen/Dense>

namespace gnar {

struct StandardizationParams {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // sqrt(sum of squared deviations / T0)
  int T0 = 0;
};

struct Standardized {
  Realization data;
  StandardizationParams params;
};

Standardized standardize(const Realization& real, int T0);
Realization unstandardize(const Realization& real, const StandardizationParams& params);
Eigen::VectorXd unstandardize_forecast(const Eigen::VectorXd& y_hat, const StandardizationParams& params);

Realization difference(const Realization& real, int lag = 1);

// Conditional mean of X_{T+1} given the whole history.
Eigen::VectorXd forecast_one_step(const ParameterVector& theta, const ModelOrder& order,
                                  const Realization& history, const NetworkContext& ctx);
Eigen::VectorXd forecast_one_step(const FitResult& fit, const Realization& history,
                                  const NetworkContext& ctx);

template <typename DerivedA, typename DerivedB>
double rmspe(const Eigen::MatrixBase<DerivedA>& forecast, const Eigen::MatrixBase<DerivedB>& actual) {
  if (forecast.size() != actual.size() || forecast.size() == 0)
    throw ValidationError("rmspe: forecast and actual sizes differ");
  return std::sqrt((forecast - actual).squaredNorm() / static_cast<double>(forecast.size()));
}

Eigen::VectorXd naive_forecast(const Realization& history);

struct VarBaseline {
  ModelOrder order;
  NetworkContext context;
  FitResult fit;
  VarMatrices phi;  // unrestricted coefficient matrices
  Eigen::VectorXd forecast;
};

// Unrestricted VAR(p) through the singleton full-interaction specialization on a complete graph
// with unit weights.
VarBaseline fit_var_baseline(const Realization& panel, int p);

}  // namespace gnar
