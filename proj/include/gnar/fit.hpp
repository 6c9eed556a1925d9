#pragma once

#include "gnar/model_order.hpp"
#include "gnar/network.hpp"
#include "gnar/simulate.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace gnar {

// One response cell (node, realization column).
struct DesignRow {
  int node = 0;
  int col = 0;
};

// Conditional linear model y = R theta + u over responses t = p+1..T.
struct DesignSystem {
  Eigen::MatrixXd R;
  Eigen::VectorXd y;
  std::vector<DesignRow> rows;
  ModelOrder order;
  std::vector<int> community_sizes;  // |K_c|
  std::vector<int> community_lags;   // p_c
  std::vector<std::vector<Eigen::Index>> community_rows;  // rows whose response node is in K_c
  int T = 0;
  int p = 0;
  int dropped_rows = 0;

  ParamLayout layout() const { return ParamLayout(order); }
  Eigen::Index row_count() const { return R.rows(); }
  int K_min() const;
};

DesignSystem build_design(const Realization& real, const ModelOrder& order,
                          const NetworkContext& ctx);

enum class SigmaConvention { DegreesOfFreedom, CellCount };

struct FitOptions {
  SigmaConvention sigma = SigmaConvention::DegreesOfFreedom;
  double ridge = 0.0;  // > 0 switches to a regularized normal-equations solve
};

struct FitResult {
  ParameterVector theta;
  Eigen::VectorXd se;
  Eigen::VectorXd t_values;
  Eigen::MatrixXd cov;
  double sigma2 = 0.0;     // the convention in use
  double sigma2_df = 0.0;  // RSS / (rows - q)
  double sigma2_cells = 0.0;  // RSS / rows
  SigmaConvention convention = SigmaConvention::DegreesOfFreedom;
  Eigen::VectorXd residuals;
  Eigen::Index rows = 0;
  double condition_number = 0.0;
  bool regularized = false;
  std::vector<std::string> warnings;
  std::vector<std::string> names;
  std::vector<Eigen::Index> param_indices;  // positions in the full layout
  ModelOrder order;
};

FitResult fit_ols(const DesignSystem& design, const FitOptions& opts = {});
FitResult fit_community(const DesignSystem& design, int c, const FitOptions& opts = {});
// Sigma is either d x d (applied at every response time) or rows x rows.
FitResult fit_gls(const DesignSystem& design, const Eigen::MatrixXd& Sigma);

// u = y - R theta0
Eigen::VectorXd design_noise(const DesignSystem& design, const ParameterVector& theta0);

struct BoundReport {
  std::vector<double> tau_c;
  double tau = 0.0;
  double gamma = 0.0;
  int q_max = 0;
  int q_total = 0;
  int C = 0;
  int K_min = 0;
  int p = 0;
  int T = 0;
  double sigma_u = 1.0;
  double delta = 0.0;
  std::optional<double> rtu_inf;
  std::optional<double> deterministic_bound;
  double probabilistic_bound = 0.0;
  double probability_floor = 0.0;
  std::vector<std::string> warnings;
};

BoundReport error_bound(const DesignSystem& design, double sigma_u, double delta, const Eigen::VectorXd* noise = nullptr);

// Sample-average Gram E = R'R / rows, limit covariance sigma2 * E^-1, and the finite-sample
// covariance limit / rows = sigma2 (R'R)^-1.
struct AsymptoticCovariance {
  Eigen::MatrixXd gram_average;
  Eigen::MatrixXd limit;
  Eigen::MatrixXd finite_sample;
  Eigen::Index cells = 0;
};

AsymptoticCovariance asymptotic_covariance(const DesignSystem& design, double sigma2);

}  // namespace gnar
