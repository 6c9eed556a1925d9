#include "gnar/model_order.hpp"

#include "gnar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace gnar {

int CommunityOrder::stage_sum() const { return std::accumulate(s.begin(), s.end(), 0); }

int CommunityOrder::q() const {
  const int own = own_neighbourhood ? 1 : 0;
  return p + (own + static_cast<int>(interactions.size())) * stage_sum();
}

int ModelOrder::p() const {
  int p = 0;
  for (const auto& co : communities) p = std::max(p, co.p);
  return p;
}

int ModelOrder::max_stage() const {
  int r = 0;
  for (const auto& co : communities)
    for (int sk : co.s) r = std::max(r, sk);
  return r;
}

int ModelOrder::coordinate_count() const {
  int q = 0;
  for (const auto& co : communities) q += co.q();
  return q;
}

void ModelOrder::validate() const {
  if (communities.empty()) throw ValidationError("model order has no communities");
  for (int c = 0; c < C(); ++c) {
    const auto& co = communities[c];
    const std::string where = "community " + std::to_string(c + 1) + ": ";
    if (co.p < 1) throw ValidationError(where + "lag order must be at least 1");
    if (static_cast<int>(co.s.size()) != co.p)
      throw ValidationError(where + "stage list length must equal p");
    for (int sk : co.s)
      if (sk < 0) throw ValidationError(where + "stage depths must be nonnegative");
    for (std::size_t m = 0; m < co.interactions.size(); ++m) {
      const int ct = co.interactions[m];
      if (ct < 0 || ct >= C()) throw ValidationError(where + "interaction target out of range");
      if (ct == c) throw ValidationError(where + "interaction set contains own community");
      if (m > 0 && co.interactions[m - 1] >= ct)
        throw ValidationError(where + "interaction set must be strictly increasing");
    }
  }
}

ModelOrder make_global_order(int p, std::vector<int> s) {
  ModelOrder order;
  order.communities.push_back({p, std::move(s), {}, true});
  order.validate();
  return order;
}

ModelOrder make_community_order(int C, int p, std::vector<int> s) {
  ModelOrder order;
  for (int c = 0; c < C; ++c) order.communities.push_back({p, s, {}, true});
  order.validate();
  return order;
}

ModelOrder make_local_order(int d, int p, std::vector<int> s) {
  ModelOrder order;
  order.tie_neighbourhood = true;
  for (int c = 0; c < d; ++c) {
    CommunityOrder co{p, s, {}, true};
    for (int ct = 0; ct < d; ++ct)
      if (ct != c) co.interactions.push_back(ct);
    order.communities.push_back(std::move(co));
  }
  order.validate();
  return order;
}

ModelOrder make_var_order(int d, int p) {
  ModelOrder order;
  for (int c = 0; c < d; ++c) {
    CommunityOrder co{p, std::vector<int>(p, 1), {}, false};
    for (int ct = 0; ct < d; ++ct)
      if (ct != c) co.interactions.push_back(ct);
    order.communities.push_back(std::move(co));
  }
  order.validate();
  return order;
}

CommunityPartition singleton_partition(int d) {
  std::vector<int> labels(d);
  std::iota(labels.begin(), labels.end(), 1);
  return CommunityPartition(std::move(labels), d);
}

ParamLayout::ParamLayout(const ModelOrder& order) : tied_(order.tie_neighbourhood) {
  order.validate();
  std::map<std::tuple<int, int>, Eigen::Index> shared;
  community_params_.assign(order.C(), {});
  auto add = [&](const Coordinate& co) {
    Eigen::Index f;
    if (tied_ && co.kind != CoefKind::Alpha) {
      auto [it, inserted] = shared.try_emplace({co.lag, co.stage}, n_free_);
      if (inserted) {
        first_coord_.push_back(static_cast<Eigen::Index>(coords_.size()));
        ++n_free_;
      }
      f = it->second;
    } else {
      f = n_free_++;
      first_coord_.push_back(static_cast<Eigen::Index>(coords_.size()));
    }
    coords_.push_back(co);
    free_of_.push_back(f);
    auto& cp = community_params_[co.community];
    if (std::find(cp.begin(), cp.end(), f) == cp.end()) cp.push_back(f);
  };
  for (int c = 0; c < order.C(); ++c) {
    const auto& co = order.communities[c];
    for (int k = 1; k <= co.p; ++k) {
      add({CoefKind::Alpha, k, 0, c, -1});
      const int sk = co.s[k - 1];
      if (co.own_neighbourhood)
        for (int r = 1; r <= sk; ++r) add({CoefKind::Beta, k, r, c, -1});
      for (int r = 1; r <= sk; ++r)
        for (int ct : co.interactions) add({CoefKind::Gamma, k, r, c, ct});
    }
  }
  for (auto& cp : community_params_) std::sort(cp.begin(), cp.end());
}

std::optional<Eigen::Index> ParamLayout::find(const Coordinate& c) const {
  for (std::size_t j = 0; j < coords_.size(); ++j)
    if (coords_[j] == c) return static_cast<Eigen::Index>(j);
  return std::nullopt;
}

Eigen::Index ParamLayout::index_of(const Coordinate& c) const {
  auto j = find(c);
  if (!j) throw ValidationError("coordinate not present in layout");
  return free_of_[*j];
}

std::string ParamLayout::name(Eigen::Index free) const {
  const Coordinate& co = representative(free);
  const auto k = std::to_string(co.lag);
  const auto r = std::to_string(co.stage);
  const auto c = std::to_string(co.community + 1);
  switch (co.kind) {
    case CoefKind::Alpha:
      return "alpha_" + k + "," + c;
    case CoefKind::Beta:
      return tied_ ? "beta_" + k + "," + r : "beta_" + k + "," + r + "," + c;
    case CoefKind::Gamma:
      if (tied_) return "beta_" + k + "," + r;
      return "gamma_" + k + "," + r + "," + c + ":" + std::to_string(co.other + 1);
  }
  return {};
}

void check_theta(const ModelOrder& order, const ParameterVector& theta) {
  const ParamLayout layout(order);
  if (theta.size() != layout.size())
    throw ValidationError("parameter vector has length " + std::to_string(theta.size()) +
                          ", layout expects " + std::to_string(layout.size()));
  if (!theta.allFinite()) throw ValidationError("parameter vector has non-finite entries");
}

void check_compatible(const ModelOrder& order, const NetworkContext& ctx) {
  order.validate();
  if (order.C() != ctx.partition.C())
    throw ValidationError("model has " + std::to_string(order.C()) + " communities, partition has " +
                          std::to_string(ctx.partition.C()));
  if (order.max_stage() > static_cast<int>(ctx.stages.size()))
    throw ValidationError("model needs stage " + std::to_string(order.max_stage()) +
                          " but the network only has " + std::to_string(ctx.stages.size()));
  if (ctx.weights.d() != ctx.d()) throw ValidationError("weights and partition sizes differ");
}

SufficientReport check_stationary_sufficient(const ModelOrder& order, const ParameterVector& theta) {
  check_theta(order, theta);
  const ParamLayout layout(order);
  SufficientReport rep;
  rep.community_sums.assign(order.C(), 0.0);
  for (Eigen::Index j = 0; j < layout.coordinate_count(); ++j)
    rep.community_sums[layout.coordinate(j).community] += std::abs(theta(layout.free_index(j)));
  const double worst = *std::max_element(rep.community_sums.begin(), rep.community_sums.end());
  rep.margin = 1.0 - worst;
  rep.pass = worst < 1.0;
  return rep;
}

VarMatrices var_matrices(const ModelOrder& order, const ParameterVector& theta,
                         const WeightsMatrix& W, const StageSet& stages,
                         const CommunityPartition& part) {
  check_theta(order, theta);
  if (order.C() != part.C()) throw ValidationError("model and partition community counts differ");
  if (order.max_stage() > static_cast<int>(stages.size()))
    throw ValidationError("not enough stages for the model order");
  const int d = part.d();
  if (W.rows() != d || W.cols() != d) throw ValidationError("weights size does not match partition");
  const ParamLayout layout(order);
  VarMatrices phi(order.p(), Eigen::MatrixXd::Zero(d, d));
  for (Eigen::Index j = 0; j < layout.coordinate_count(); ++j) {
    const Coordinate& co = layout.coordinate(j);
    const double v = theta(layout.free_index(j));
    if (v == 0.0) continue;
    Eigen::MatrixXd& P = phi[co.lag - 1];
    const auto& rows = part.members(co.community);
    if (co.kind == CoefKind::Alpha) {
      for (int i : rows) P(i, i) += v;
      continue;
    }
    const BoolMatrix& S = stages[co.stage - 1].S;
    const auto& cols = part.members(co.kind == CoefKind::Beta ? co.community : co.other);
    for (int i : rows)
      for (int l : cols)
        if (S(i, l)) P(i, l) += v * W(i, l);
  }
  return phi;
}

Eigen::MatrixXd companion_matrix(const VarMatrices& phi) {
  if (phi.empty()) throw ValidationError("empty VAR representation");
  const Eigen::Index d = phi.front().rows();
  const Eigen::Index p = static_cast<Eigen::Index>(phi.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d * p, d * p);
  for (Eigen::Index k = 0; k < p; ++k) A.block(0, k * d, d, d) = phi[k];
  if (p > 1) A.block(d, 0, d * (p - 1), d * (p - 1)).setIdentity();
  return A;
}

CompanionReport check_stationary_companion(const VarMatrices& phi) {
  const Eigen::MatrixXd A = companion_matrix(phi);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue iteration did not converge");
  CompanionReport rep;
  rep.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
  rep.pass = rep.spectral_radius < 1.0 - kUnitCircleTol;
  return rep;
}

CompanionReport check_stationary_companion(const ModelOrder& order, const ParameterVector& theta,
                                           const NetworkContext& ctx) {
  if (!ctx.weights.is_static())
    throw ValidationError("companion check is only defined for static weights");
  check_compatible(order, ctx);
  return check_stationary_companion(
      var_matrices(order, theta, ctx.weights.at(0), ctx.stages, ctx.partition));
}

}  // namespace gnar
