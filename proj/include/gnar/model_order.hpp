#pragma once

#include "gnar/network.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace gnar {

// Order of one community: max lag p, stage depth per lag, and the communities it listens to.
struct CommunityOrder {
  int p = 1;
  std::vector<int> s;             // s[k-1] = s_k(c)
  std::vector<int> interactions;  // 0-based community ids, strictly increasing
  // When false the beta coordinates are omitted (used by the unrestricted VAR specialization,
  // where singleton communities have no within-community neighbours).
  bool own_neighbourhood = true;

  int stage_sum() const;
  int q() const;
};

struct ModelOrder {
  std::vector<CommunityOrder> communities;
  // Local-alpha tying: every beta/gamma coordinate with the same (k, r) shares one parameter.
  bool tie_neighbourhood = false;

  int C() const { return static_cast<int>(communities.size()); }
  int p() const;
  int max_stage() const;
  // Sum of per-community q_c (coordinates, before tying).
  int coordinate_count() const;
  void validate() const;
};

ModelOrder make_global_order(int p, std::vector<int> s);
// Community-alpha order with the same (p, s) for every community and no interactions.
ModelOrder make_community_order(int C, int p, std::vector<int> s);
// One singleton community per node; alpha free per node, neighbourhood coefficients shared.
ModelOrder make_local_order(int d, int p, std::vector<int> s);
// Unrestricted VAR(p): singleton communities, full interactions at stage one.
ModelOrder make_var_order(int d, int p);
CommunityPartition singleton_partition(int d);

enum class CoefKind { Alpha, Beta, Gamma };

struct Coordinate {
  CoefKind kind = CoefKind::Alpha;
  int lag = 1;        // 1-based
  int stage = 0;      // 1-based, 0 for alpha
  int community = 0;  // 0-based
  int other = -1;     // 0-based target community for gamma
  bool operator==(const Coordinate&) const = default;
};

using ParameterVector = Eigen::VectorXd;

class ParamLayout {
 public:
  explicit ParamLayout(const ModelOrder& order);

  Eigen::Index size() const { return n_free_; }
  Eigen::Index coordinate_count() const { return static_cast<Eigen::Index>(coords_.size()); }
  const Coordinate& coordinate(Eigen::Index j) const { return coords_[j]; }
  Eigen::Index free_index(Eigen::Index coord) const { return free_of_[coord]; }
  std::optional<Eigen::Index> find(const Coordinate& c) const;
  Eigen::Index index_of(const Coordinate& c) const;
  // First coordinate mapped to a free parameter.
  const Coordinate& representative(Eigen::Index free) const { return coords_[first_coord_[free]]; }
  // Free parameters touched by community c, ascending.
  const std::vector<Eigen::Index>& community_params(int c) const { return community_params_[c]; }
  bool tied() const { return tied_; }
  int C() const { return static_cast<int>(community_params_.size()); }
  std::string name(Eigen::Index free) const;

 private:
  std::vector<Coordinate> coords_;
  std::vector<Eigen::Index> free_of_;
  std::vector<Eigen::Index> first_coord_;
  std::vector<std::vector<Eigen::Index>> community_params_;
  Eigen::Index n_free_ = 0;
  bool tied_ = false;
};

inline constexpr int kLayoutVersion = 1;

struct SufficientReport {
  std::vector<double> community_sums;
  double margin = 1.0;
  bool pass = true;
};

SufficientReport check_stationary_sufficient(const ModelOrder& order, const ParameterVector& theta);

using VarMatrices = std::vector<Eigen::MatrixXd>;

// Phi_1..Phi_p built from W_t.
VarMatrices var_matrices(const ModelOrder& order, const ParameterVector& theta,
                         const WeightsMatrix& W, const StageSet& stages,
                         const CommunityPartition& part);

Eigen::MatrixXd companion_matrix(const VarMatrices& phi);

struct CompanionReport {
  bool evaluated = true;
  double spectral_radius = 0.0;
  bool pass = true;
};

inline constexpr double kUnitCircleTol = 1e-10;

CompanionReport check_stationary_companion(const VarMatrices& phi);
// Throws ValidationError for time-varying weights.
CompanionReport check_stationary_companion(const ModelOrder& order, const ParameterVector& theta,
                                           const NetworkContext& ctx);

void check_theta(const ModelOrder& order, const ParameterVector& theta);
void check_compatible(const ModelOrder& order, const NetworkContext& ctx);

}  // namespace gnar
