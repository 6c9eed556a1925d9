#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace gnar {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Undirected simple graph. Nodes are 0-based internally; edges stored with i < j.
struct Network {
  int d = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::string> labels;

  std::vector<std::vector<int>> adjacency_list() const;
};

// Edges use 1-based indices, as in edge-list files.
Network build_network(const std::vector<std::pair<int, int>>& edges, int d,
                      std::vector<std::string> labels = {});

// Hop distances by BFS from every source; -1 marks unreachable pairs.
Eigen::MatrixXi shortest_path_lengths(const Network& net);

struct StageAdjacency {
  int r = 0;
  BoolMatrix S;
};

using StageSet = std::vector<StageAdjacency>;

StageSet stage_adjacency(const Network& net, int r_max_request);
int max_finite_distance(const Network& net);

class CommunityPartition {
 public:
  CommunityPartition() = default;
  // labels are 1-based community ids, one per node.
  CommunityPartition(std::vector<int> labels, int C = 0);
  static CommunityPartition single(int d) { return CommunityPartition(std::vector<int>(d, 1), 1); }

  int d() const { return static_cast<int>(labels_.size()); }
  int C() const { return C_; }
  // c is 0-based from here on.
  int community_of(int node) const { return labels_[node] - 1; }
  const std::vector<int>& members(int c) const { return members_[c]; }
  int size(int c) const { return static_cast<int>(members_[c].size()); }
  Eigen::VectorXd indicator(int c) const;
  const std::vector<int>& labels() const { return labels_; }

 private:
  std::vector<int> labels_;
  int C_ = 0;
  std::vector<std::vector<int>> members_;
};

using WeightsMatrix = Eigen::MatrixXd;

void validate_weights(const WeightsMatrix& W);

WeightsMatrix equal_weights(const Network& net, const StageSet& stages);

// Zeroes columns of missing nodes and renormalizes every surviving (i, r) neighbourhood.
WeightsMatrix apply_missing(const WeightsMatrix& W, const std::vector<int>& missing_nodes,
                            const StageSet& stages);

// Renormalizes each (i, r) neighbourhood row segment to sum to one when nonzero.
WeightsMatrix renormalize_by_stage(const WeightsMatrix& W, const StageSet& stages);

WeightsMatrix community_mask(const WeightsMatrix& W, const CommunityPartition& part, int c,
                             bool renormalize = false, const StageSet* stages = nullptr);
WeightsMatrix interaction_mask(const WeightsMatrix& W, const CommunityPartition& part, int c,
                               int c_tilde, bool renormalize = false,
                               const StageSet* stages = nullptr);

template <typename DerivedW>
auto stage_weights(const Eigen::MatrixBase<DerivedW>& W, const StageAdjacency& stage) {
  return W.cwiseProduct(stage.S.template cast<typename DerivedW::Scalar>());
}

// t -> W_t. Either constant or generated; a positive period lets callers cache by t mod period.
class WeightsSequence {
 public:
  using Generator = std::function<WeightsMatrix(int)>;

  WeightsSequence() = default;
  explicit WeightsSequence(WeightsMatrix W);
  WeightsSequence(Generator gen, int period);

  WeightsMatrix at(int t) const;
  bool is_static() const { return !gen_; }
  int period() const { return period_; }
  // Canonical time key: every t with equal key yields the same matrix.
  int key(int t) const;
  int d() const;

 private:
  std::shared_ptr<const WeightsMatrix> constant_;
  Generator gen_;
  int period_ = 1;
};

// Everything a GNAR model needs from the network side.
struct NetworkContext {
  CommunityPartition partition;
  StageSet stages;
  WeightsSequence weights;

  int d() const { return partition.d(); }
};

}  // namespace gnar
