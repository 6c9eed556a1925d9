#pragma once

#include "gnar/errors.hpp"
#include "gnar/model_order.hpp"
#include "gnar/network.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <vector>

namespace gnar {

// d x T panel of node series; column j holds time first_time + j.
struct Realization {
  Eigen::MatrixXd values;
  BoolMatrix missing;  // empty, or d x T with true where unobserved
  int first_time = 1;

  int d() const { return static_cast<int>(values.rows()); }
  int T() const { return static_cast<int>(values.cols()); }
  bool has_missing() const { return missing.size() > 0 && missing.any(); }
  bool is_missing(int i, int j) const { return missing.size() > 0 && missing(i, j); }
  void validate() const;
};

struct NoiseSpec {
  double sigma = 1.0;
  Eigen::VectorXd node_sigma;  // overrides sigma when non-empty
  std::uint64_t seed = 2024;
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication) {
  return master ^ replication;
}

inline int default_burn_in(int p) { return std::max(50 * p, 200); }

// Z^r = (W o S_r) X
template <typename DerivedW, typename DerivedX>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, DerivedX::ColsAtCompileTime>
neighborhood_regression(const Eigen::MatrixBase<DerivedW>& W, const StageAdjacency& stage,
                        const Eigen::MatrixBase<DerivedX>& X) {
  if (W.rows() != X.rows() || W.cols() != X.rows() || stage.S.rows() != W.rows())
    throw ValidationError("neighborhood_regression: dimension mismatch");
  return stage_weights(W, stage) * X;
}

// Z^{r,c} with W_c, or Z^{r,c:c~} with W_{c:c~} when c_tilde >= 0.
Eigen::VectorXd neighborhood_regression(const WeightsMatrix& W, const StageAdjacency& stage,
                                        const Eigen::VectorXd& X, const CommunityPartition& part,
                                        int c, int c_tilde = -1);

// Per-coordinate operators M_j with contribution theta_j * M_j * X_{t-k}; alpha entries are
// diag(xi_c). Built from the literal community and interaction masks.
std::vector<Eigen::SparseMatrix<double>> coordinate_operators(const ParamLayout& layout,
                                                              const WeightsMatrix& W,
                                                              const StageSet& stages,
                                                              const CommunityPartition& part);

// Conditional mean of X_t given the p preceding columns of `past` (last column is t - 1).
Eigen::VectorXd conditional_mean(const ModelOrder& order, const ParameterVector& theta,
                                 const NetworkContext& ctx, const Eigen::Ref<const Eigen::MatrixXd>& past,
                                 int t);

Eigen::MatrixXd draw_noise(const NoiseSpec& noise, int d, int steps);

Realization simulate(const ModelOrder& order, const ParameterVector& theta,
                     const NetworkContext& ctx, int T, int burn_in, const NoiseSpec& noise);

// Compact-form recursion driven by a given noise matrix (d x (burn_in + T)).
Realization simulate_with_noise(const ModelOrder& order, const ParameterVector& theta,
                                const NetworkContext& ctx, const Eigen::MatrixXd& noise,
                                int burn_in);

// X_t = sum_k Phi_k(t - k) X_{t-k} + u_t with Phi from var_matrices.
Realization simulate_var(const ModelOrder& order, const ParameterVector& theta,
                         const NetworkContext& ctx, const Eigen::MatrixXd& noise, int burn_in);

ParameterVector sample_stationary_params(const ModelOrder& order, std::uint64_t seed,
                                         double total_mass = 0.9);

// Weight profile toward one target community: w_ij(t) = f(t) * 2^(-d_ij * decay).
struct PeriodicTarget {
  std::function<double(int)> f;
  double decay = 1.0;
};

WeightsSequence periodic_weights(const Network& net, const CommunityPartition& part,
                                 std::vector<PeriodicTarget> targets, int period,
                                 bool normalize = false);

// Three-community preset with period four; normalize rescales each (i, r) neighbourhood to one.
WeightsSequence periodic_weights_preset(const Network& net, const CommunityPartition& part,
                                        int period = 4, bool normalize = false);

}  // namespace gnar
