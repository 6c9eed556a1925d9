#include "gnar/simulate.hpp"

#include "gnar/errors.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace gnar {

void Realization::validate() const {
  if (values.cols() < 1) throw ValidationError("realization has no time points");
  if (missing.size() > 0 && (missing.rows() != values.rows() || missing.cols() != values.cols()))
    throw ValidationError("missing-flag matrix shape differs from values");
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      if (!is_missing(static_cast<int>(i), static_cast<int>(j)) && !std::isfinite(values(i, j)))
        throw ValidationError("non-finite observed value at node " + std::to_string(i + 1) +
                              ", column " + std::to_string(j + 1));
}

Eigen::VectorXd neighborhood_regression(const WeightsMatrix& W, const StageAdjacency& stage,
                                        const Eigen::VectorXd& X, const CommunityPartition& part,
                                        int c, int c_tilde) {
  if (X.size() != part.d()) throw ValidationError("neighborhood_regression: dimension mismatch");
  const WeightsMatrix M =
      c_tilde < 0 ? community_mask(W, part, c) : interaction_mask(W, part, c, c_tilde);
  return neighborhood_regression(M, stage, X);
}

std::vector<Eigen::SparseMatrix<double>> coordinate_operators(const ParamLayout& layout,
                                                              const WeightsMatrix& W,
                                                              const StageSet& stages,
                                                              const CommunityPartition& part) {
  std::vector<Eigen::SparseMatrix<double>> ops(layout.coordinate_count());
  std::map<std::pair<int, int>, WeightsMatrix> masks;
  for (Eigen::Index j = 0; j < layout.coordinate_count(); ++j) {
    const Coordinate& co = layout.coordinate(j);
    if (co.kind == CoefKind::Alpha) {
      ops[j] = Eigen::VectorXd(part.indicator(co.community)).asDiagonal().toDenseMatrix().sparseView();
      continue;
    }
    const int target = co.kind == CoefKind::Beta ? co.community : co.other;
    auto it = masks.find({co.community, target});
    if (it == masks.end()) {
      WeightsMatrix M = target == co.community ? community_mask(W, part, co.community)
                                               : interaction_mask(W, part, co.community, target);
      it = masks.emplace(std::make_pair(co.community, target), std::move(M)).first;
    }
    ops[j] = stage_weights(it->second, stages[co.stage - 1]).sparseView();
  }
  return ops;
}

namespace {

// Coordinate operators cached per weights key.
class OperatorCache {
 public:
  OperatorCache(const ParamLayout& layout, const NetworkContext& ctx) : layout_(layout), ctx_(ctx) {}

  const std::vector<Eigen::SparseMatrix<double>>& at(int t) {
    const int key = ctx_.weights.key(t);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      if (ctx_.weights.period() == 0 && cache_.size() > 64) cache_.clear();
      it = cache_.emplace(key, coordinate_operators(layout_, ctx_.weights.at(t), ctx_.stages,
                                                    ctx_.partition)).first;
    }
    return it->second;
  }

 private:
  const ParamLayout& layout_;
  const NetworkContext& ctx_;
  std::map<int, std::vector<Eigen::SparseMatrix<double>>> cache_;
};

Eigen::VectorXd compact_mean(const ParamLayout& layout, const ParameterVector& theta,
                             OperatorCache& cache, const Eigen::Ref<const Eigen::MatrixXd>& past,
                             int t) {
  const Eigen::Index n = past.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(past.rows());
  for (Eigen::Index j = 0; j < layout.coordinate_count(); ++j) {
    const double v = theta(layout.free_index(j));
    if (v == 0.0) continue;
    const int k = layout.coordinate(j).lag;
    mean.noalias() += v * (cache.at(t - k)[j] * past.col(n - k));
  }
  return mean;
}

}  // namespace

Eigen::VectorXd conditional_mean(const ModelOrder& order, const ParameterVector& theta,
                                 const NetworkContext& ctx,
                                 const Eigen::Ref<const Eigen::MatrixXd>& past, int t) {
  check_compatible(order, ctx);
  check_theta(order, theta);
  if (past.rows() != ctx.d()) throw ValidationError("history has wrong node count");
  if (past.cols() < order.p())
    throw ValidationError("history of length " + std::to_string(past.cols()) +
                          " is shorter than the lag order " + std::to_string(order.p()));
  const ParamLayout layout(order);
  OperatorCache cache(layout, ctx);
  return compact_mean(layout, theta, cache, past, t);
}

Eigen::MatrixXd draw_noise(const NoiseSpec& noise, int d, int steps) {
  Eigen::VectorXd sd = noise.node_sigma.size() > 0 ? noise.node_sigma
                                                   : Eigen::VectorXd::Constant(d, noise.sigma);
  if (sd.size() != d) throw ValidationError("per-node sigma has wrong length");
  if ((sd.array() <= 0).any()) throw ValidationError("noise sigma must be positive");
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd U(d, steps);
  for (int s = 0; s < steps; ++s)
    for (int i = 0; i < d; ++i) U(i, s) = sd(i) * normal(rng);
  return U;
}

namespace {

template <typename Step>
Realization run_recursion(int d, int p, const Eigen::MatrixXd& noise, int burn_in, Step step) {
  if (burn_in < 0) throw ValidationError("burn-in must be nonnegative");
  if (noise.rows() != d) throw ValidationError("noise has wrong node count");
  const int steps = static_cast<int>(noise.cols());
  const int T = steps - burn_in;
  if (T < 1) throw ValidationError("noise shorter than burn-in plus one step");
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(d, p + steps);
  for (int s = 0; s < steps; ++s) {
    const int t = 1 - burn_in + s;
    X.col(p + s) = step(X.middleCols(s, p), t) + noise.col(s);
    if (!X.col(p + s).allFinite())
      throw NumericalError("simulation produced non-finite values at t = " + std::to_string(t));
  }
  Realization out;
  out.values = X.rightCols(T);
  out.first_time = 1;
  return out;
}

}  // namespace

Realization simulate_with_noise(const ModelOrder& order, const ParameterVector& theta,
                                const NetworkContext& ctx, const Eigen::MatrixXd& noise,
                                int burn_in) {
  check_compatible(order, ctx);
  check_theta(order, theta);
  const ParamLayout layout(order);
  OperatorCache cache(layout, ctx);
  return run_recursion(ctx.d(), order.p(), noise, burn_in,
                       [&](const Eigen::Ref<const Eigen::MatrixXd>& past, int t) {
                         return compact_mean(layout, theta, cache, past, t);
                       });
}

Realization simulate_var(const ModelOrder& order, const ParameterVector& theta,
                         const NetworkContext& ctx, const Eigen::MatrixXd& noise, int burn_in) {
  check_compatible(order, ctx);
  const int p = order.p();
  std::map<int, VarMatrices> cache;
  auto phi_at = [&](int t) -> const VarMatrices& {
    const int key = ctx.weights.key(t);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, var_matrices(order, theta, ctx.weights.at(t), ctx.stages,
                                           ctx.partition)).first;
    return it->second;
  };
  return run_recursion(ctx.d(), p, noise, burn_in,
                       [&](const Eigen::Ref<const Eigen::MatrixXd>& past, int t) {
                         Eigen::VectorXd x = Eigen::VectorXd::Zero(past.rows());
                         for (int k = 1; k <= p; ++k) x.noalias() += phi_at(t - k)[k - 1] * past.col(p - k);
                         return x;
                       });
}

Realization simulate(const ModelOrder& order, const ParameterVector& theta,
                     const NetworkContext& ctx, int T, int burn_in, const NoiseSpec& noise) {
  if (T < 1) throw ValidationError("T must be positive");
  if (burn_in < 0) burn_in = default_burn_in(order.p());
  return simulate_with_noise(order, theta, ctx, draw_noise(noise, ctx.d(), burn_in + T), burn_in);
}

ParameterVector sample_stationary_params(const ModelOrder& order, std::uint64_t seed,
                                         double total_mass) {
  if (!(total_mass > 0.0 && total_mass < 1.0))
    throw ValidationError("total mass must lie in (0, 1)");
  const ParamLayout layout(order);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.5);
  ParameterVector theta(layout.size());
  for (Eigen::Index f = 0; f < layout.size(); ++f) theta(f) = expo(rng);
  for (Eigen::Index f = 0; f < layout.size(); ++f) {
    const Coordinate& co = layout.representative(f);
    const bool positive = co.kind == CoefKind::Alpha && co.lag == 1;
    if (!positive && coin(rng)) theta(f) = -theta(f);
  }
  if (!layout.tied()) {
    // Symmetric Dirichlet split of total_mass within each community block.
    for (int c = 0; c < layout.C(); ++c) {
      double sum = 0.0;
      for (Eigen::Index f : layout.community_params(c)) sum += std::abs(theta(f));
      for (Eigen::Index f : layout.community_params(c)) theta(f) *= total_mass / sum;
    }
    return theta;
  }
  const auto rep = check_stationary_sufficient(order, theta);
  const double worst = 1.0 - rep.margin;
  return theta * (total_mass / worst);
}

WeightsSequence periodic_weights(const Network& net, const CommunityPartition& part,
                                 std::vector<PeriodicTarget> targets, int period, bool normalize) {
  if (part.d() != net.d) throw ValidationError("partition and network sizes differ");
  if (static_cast<int>(targets.size()) != part.C())
    throw ValidationError("need one weight formula per community");
  if (period < 1) throw ValidationError("period must be positive");
  const Eigen::MatrixXi dist = shortest_path_lengths(net);
  const StageSet stages = stage_adjacency(net, std::max(1, net.d));
  auto gen = [=](int t) {
    // Reduce first so that W_{t + period} equals W_t bit for bit.
    t = ((t % period) + period) % period;
    WeightsMatrix W = WeightsMatrix::Zero(net.d, net.d);
    for (int i = 0; i < net.d; ++i)
      for (int j = 0; j < net.d; ++j) {
        if (i == j || dist(i, j) < 0) continue;
        const auto& tg = targets[part.community_of(j)];
        W(i, j) = tg.f(t) * std::exp2(-tg.decay * dist(i, j));
      }
    return normalize ? renormalize_by_stage(W, stages) : W;
  };
  return WeightsSequence(gen, period);
}

WeightsSequence periodic_weights_preset(const Network& net, const CommunityPartition& part,
                                        int period, bool normalize) {
  if (part.C() != 3) throw ValidationError("the periodic preset needs exactly three communities");
  constexpr double pi = std::numbers::pi;
  std::vector<PeriodicTarget> targets = {
      {[](int t) { return 1.0 + std::cos(t * pi / 2) + 0.1; }, 0.5},
      {[](int t) { return 1.0 + std::sin(t * pi / 2) + 0.1; }, 1.0},
      {[](int t) { return 1.0 + std::cos(t * pi / 4) * std::sin(t * pi / 4) + 0.1; }, 1.0},
  };
  return periodic_weights(net, part, std::move(targets), period, normalize);
}

}  // namespace gnar
