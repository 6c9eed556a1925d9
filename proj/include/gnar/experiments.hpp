#pragma once

#include "gnar/fit.hpp"
#include "gnar/model_order.hpp"
#include "gnar/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gnar {

// Five-node example network: edges 1-4, 1-5, 2-3, 2-4, 3-4.
Network five_net();
// K_1 = {2, 3, 4}, K_2 = {1, 5}.
CommunityPartition five_net_partition();
NetworkContext five_net_context();
// GNAR([1, 2], {[1], [1, 1]}, 2).
ModelOrder two_community_order();
// True values used for the recovery table, layout (a11, b111, a12, b112, a22, b212).
ParameterVector two_community_theta();
// Values quoted for the R-Corbit illustration of the same model.
ParameterVector two_community_corbit_theta();

// Three communities: (3, [2,2,1], {3}), (2, [3,2], {3}), (1, [3], {1,2}).
ModelOrder three_community_order();
// Periodic weights on a three-community network, each (i, r) neighbourhood scaled to one.
NetworkContext periodic_context(const Network& net, const CommunityPartition& part);

struct StudySetup {
  ModelOrder order;
  NetworkContext context;
  std::optional<ParameterVector> fixed_theta;  // otherwise sampled per replication
  double noise_sigma = 1.0;
  int burn_in = -1;
  double total_mass = 0.9;
};

struct RecoveryConfig {
  std::vector<int> T_grid = {25, 50, 100, 200, 400, 800};
  int replications = 50;
  std::uint64_t master_seed = 2024;
};

struct RecoveryRow {
  int T = 0;
  int replication = 0;
  int community = 0;  // 0: whole model
  double delta = 0.0;
  bool feasible = true;
  std::string note;
};

struct RecoveryEstimate {
  int T = 0;
  int replication = 0;
  ParameterVector theta0;
  ParameterVector theta_hat;
};

struct RecoveryResult {
  std::vector<RecoveryRow> rows;
  std::vector<RecoveryEstimate> estimates;
};

// Seeds: replication m of grid point g uses derive_seed(master, g * replications + m) for
// the parameter draw and that seed xor a fixed constant for the noise.
RecoveryResult run_recovery_study(const StudySetup& setup, const RecoveryConfig& config);
std::string recovery_csv(const RecoveryResult& result);

struct MedianCurve {
  int T = 0;
  std::vector<double> community;  // per community
  double whole = 0.0;
  int feasible = 0;
};
std::vector<MedianCurve> median_curves(const RecoveryResult& result, int C);

struct BoundCheckConfig {
  std::vector<double> deltas = {0.0, 0.5, 1.0};
  int replications = 500;
  int T = 200;
  std::uint64_t master_seed = 2024;
};

struct BoundCheckRow {
  int replication = 0;
  double error = 0.0;
  double deterministic_bound = 0.0;
  bool deterministic_holds = true;
  std::vector<double> probabilistic_bound;  // per delta
  std::vector<double> ceiling;              // per delta, min(1, 2 exp(-delta^2 tau K (T - p)))
};

struct CoverageRow {
  double delta = 0.0;
  int replications = 0;
  int violations = 0;
  double rate = 0.0;
  double mean_ceiling = 0.0;
};

struct BoundCheckResult {
  std::vector<BoundCheckRow> rows;
  std::vector<CoverageRow> coverage;
  int deterministic_violations = 0;
};

// Deterministic-bound slack used when counting violations.
inline constexpr double kBoundSlack = 1e-9;

BoundCheckResult run_bound_check(const StudySetup& setup, const BoundCheckConfig& config);
std::string coverage_csv(const BoundCheckResult& result);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gnar
