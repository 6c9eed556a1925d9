#include "gnar/network.hpp"

#include "gnar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace gnar {

std::vector<std::vector<int>> Network::adjacency_list() const {
  std::vector<std::vector<int>> adj(d);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

Network build_network(const std::vector<std::pair<int, int>>& edges, int d,
                      std::vector<std::string> labels) {
  if (d <= 0) throw ValidationError("network needs at least one node");
  if (!labels.empty() && static_cast<int>(labels.size()) != d)
    throw ValidationError("label count does not match node count");
  std::set<std::pair<int, int>> uniq;
  for (auto [a, b] : edges) {
    if (a < 1 || a > d || b < 1 || b > d)
      throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") has node index out of range 1.." + std::to_string(d));
    if (a == b) throw ValidationError("self-loop at node " + std::to_string(a));
    uniq.insert({std::min(a, b) - 1, std::max(a, b) - 1});
  }
  Network net;
  net.d = d;
  net.edges.assign(uniq.begin(), uniq.end());
  net.labels = std::move(labels);
  return net;
}

Eigen::MatrixXi shortest_path_lengths(const Network& net) {
  const auto adj = net.adjacency_list();
  Eigen::MatrixXi dist = Eigen::MatrixXi::Constant(net.d, net.d, -1);
  std::vector<int> queue(net.d);
  for (int s = 0; s < net.d; ++s) {
    dist(s, s) = 0;
    int head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      const int u = queue[head++];
      for (int v : adj[u]) {
        if (dist(s, v) < 0) {
          dist(s, v) = dist(s, u) + 1;
          queue[tail++] = v;
        }
      }
    }
  }
  return dist;
}

int max_finite_distance(const Network& net) {
  return std::max(0, shortest_path_lengths(net).maxCoeff());
}

StageSet stage_adjacency(const Network& net, int r_max_request) {
  if (r_max_request < 1) throw ValidationError("r_max request must be positive");
  const Eigen::MatrixXi dist = shortest_path_lengths(net);
  const int R = std::min(r_max_request, std::max(0, dist.maxCoeff()));
  StageSet stages;
  for (int r = 1; r <= R; ++r) stages.push_back({r, (dist.array() == r).matrix()});
  return stages;
}

CommunityPartition::CommunityPartition(std::vector<int> labels, int C) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("partition over zero nodes");
  const int max_label = *std::max_element(labels_.begin(), labels_.end());
  C_ = C > 0 ? C : max_label;
  for (int l : labels_)
    if (l < 1 || l > C_)
      throw ValidationError("community label " + std::to_string(l) + " outside 1.." +
                            std::to_string(C_));
  members_.assign(C_, {});
  for (int i = 0; i < static_cast<int>(labels_.size()); ++i) members_[labels_[i] - 1].push_back(i);
}

Eigen::VectorXd CommunityPartition::indicator(int c) const {
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(d());
  for (int i : members_[c]) xi(i) = 1.0;
  return xi;
}

void validate_weights(const WeightsMatrix& W) {
  if (W.rows() != W.cols()) throw ValidationError("weights matrix must be square");
  if (!W.allFinite()) throw ValidationError("weights matrix has non-finite entries");
  if ((W.array() < 0).any()) throw ValidationError("weights matrix has negative entries");
  if (W.diagonal().cwiseAbs().maxCoeff() != 0.0)
    throw ValidationError("weights matrix must have zero diagonal");
}

WeightsMatrix equal_weights(const Network& net, const StageSet& stages) {
  WeightsMatrix W = WeightsMatrix::Zero(net.d, net.d);
  for (const auto& st : stages) {
    for (int i = 0; i < net.d; ++i) {
      const auto n = st.S.row(i).count();
      if (n == 0) continue;
      for (int j = 0; j < net.d; ++j)
        if (st.S(i, j)) W(i, j) = 1.0 / static_cast<double>(n);
    }
  }
  return W;
}

WeightsMatrix renormalize_by_stage(const WeightsMatrix& W, const StageSet& stages) {
  WeightsMatrix out = W;
  for (const auto& st : stages) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < W.cols(); ++j)
        if (st.S(i, j)) sum += W(i, j);
      if (sum <= 0.0) continue;
      for (Eigen::Index j = 0; j < W.cols(); ++j)
        if (st.S(i, j)) out(i, j) = W(i, j) / sum;
    }
  }
  return out;
}

WeightsMatrix apply_missing(const WeightsMatrix& W, const std::vector<int>& missing_nodes,
                            const StageSet& stages) {
  if (missing_nodes.empty()) return W;
  WeightsMatrix out = W;
  for (int j : missing_nodes) {
    if (j < 0 || j >= W.cols()) throw ValidationError("missing node index out of range");
    out.col(j).setZero();
  }
  return renormalize_by_stage(out, stages);
}

namespace {

WeightsMatrix block_mask(const WeightsMatrix& W, const CommunityPartition& part, int c, int ct,
                         bool renormalize, const StageSet* stages) {
  if (W.rows() != part.d()) throw ValidationError("weights and partition sizes differ");
  if (c < 0 || c >= part.C() || ct < 0 || ct >= part.C())
    throw ValidationError("community index out of range");
  WeightsMatrix out = WeightsMatrix::Zero(W.rows(), W.cols());
  for (int i : part.members(c))
    for (int j : part.members(ct)) out(i, j) = W(i, j);
  if (renormalize) {
    if (!stages) throw ValidationError("renormalized masks need the stage set");
    out = renormalize_by_stage(out, *stages);
  }
  return out;
}

}  // namespace

WeightsMatrix community_mask(const WeightsMatrix& W, const CommunityPartition& part, int c,
                             bool renormalize, const StageSet* stages) {
  return block_mask(W, part, c, c, renormalize, stages);
}

WeightsMatrix interaction_mask(const WeightsMatrix& W, const CommunityPartition& part, int c,
                               int c_tilde, bool renormalize, const StageSet* stages) {
  if (c == c_tilde) throw ValidationError("interaction with own community: use community_mask");
  return block_mask(W, part, c, c_tilde, renormalize, stages);
}

WeightsSequence::WeightsSequence(WeightsMatrix W) {
  validate_weights(W);
  constant_ = std::make_shared<const WeightsMatrix>(std::move(W));
}

WeightsSequence::WeightsSequence(Generator gen, int period) : gen_(std::move(gen)), period_(period) {
  if (!gen_) throw ValidationError("empty weights generator");
  if (period_ < 0) throw ValidationError("weights period must be nonnegative");
}

WeightsMatrix WeightsSequence::at(int t) const {
  if (constant_) return *constant_;
  if (!gen_) throw ValidationError("weights sequence is empty");
  WeightsMatrix W = gen_(t);
  validate_weights(W);
  return W;
}

int WeightsSequence::key(int t) const {
  if (is_static()) return 0;
  if (period_ == 0) return t;
  const int m = t % period_;
  return m < 0 ? m + period_ : m;
}

int WeightsSequence::d() const {
  if (constant_) return static_cast<int>(constant_->rows());
  return static_cast<int>(at(0).rows());
}

}  // namespace gnar
