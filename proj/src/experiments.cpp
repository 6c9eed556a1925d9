#include "gnar/experiments.hpp"

#include "gnar/errors.hpp"
#include "gnar/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace gnar {

Network five_net() { return build_network({{1, 4}, {1, 5}, {2, 3}, {2, 4}, {3, 4}}, 5); }

CommunityPartition five_net_partition() { return CommunityPartition({2, 1, 1, 1, 2}, 2); }

NetworkContext five_net_context() {
  const Network net = five_net();
  StageSet stages = stage_adjacency(net, net.d);
  WeightsMatrix W = equal_weights(net, stages);
  return {five_net_partition(), std::move(stages), WeightsSequence(std::move(W))};
}

ModelOrder two_community_order() {
  ModelOrder order;
  order.communities = {{1, {1}, {}, true}, {2, {1, 1}, {}, true}};
  order.validate();
  return order;
}

ParameterVector two_community_theta() {
  ParameterVector theta(6);
  theta << 0.27, 0.18, 0.25, 0.30, 0.12, 0.20;
  return theta;
}

ParameterVector two_community_corbit_theta() {
  ParameterVector theta(6);
  theta << 0.23, 0.47, 0.20, 0.30, 0.18, 0.27;
  return theta;
}

ModelOrder three_community_order() {
  ModelOrder order;
  order.communities = {{3, {2, 2, 1}, {2}, true}, {2, {3, 2}, {2}, true}, {1, {3}, {0, 1}, true}};
  order.validate();
  return order;
}

NetworkContext periodic_context(const Network& net, const CommunityPartition& part) {
  return {part, stage_adjacency(net, net.d), periodic_weights_preset(net, part, 4, true)};
}

namespace {

constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RecoveryResult run_recovery_study(const StudySetup& setup, const RecoveryConfig& config) {
  check_compatible(setup.order, setup.context);
  if (config.replications < 0) throw ValidationError("replications must be nonnegative");
  const ParamLayout layout(setup.order);
  RecoveryResult out;
  for (std::size_t g = 0; g < config.T_grid.size(); ++g) {
    const int T = config.T_grid[g];
    for (int m = 0; m < config.replications; ++m) {
      const std::uint64_t seed =
          derive_seed(config.master_seed, static_cast<std::uint64_t>(g) * config.replications + m);
      const ParameterVector theta0 = setup.fixed_theta
                                         ? *setup.fixed_theta
                                         : sample_stationary_params(setup.order, seed, setup.total_mass);
      NoiseSpec noise;
      noise.sigma = setup.noise_sigma;
      noise.seed = seed ^ kNoiseStream;
      try {
        const Realization real = simulate(setup.order, theta0, setup.context, T, setup.burn_in, noise);
        const FitResult fit = fit_ols(build_design(real, setup.order, setup.context));
        const ParameterVector err = fit.theta - theta0;
        out.rows.push_back({T, m, 0, err.norm(), true, ""});
        for (int c = 0; c < layout.C(); ++c)
          out.rows.push_back({T, m, c + 1, err(layout.community_params(c)).norm(), true, ""});
        out.estimates.push_back({T, m, theta0, fit.theta});
      } catch (const std::exception& e) {
        out.rows.push_back({T, m, 0, std::nan(""), false, e.what()});
        for (int c = 0; c < layout.C(); ++c) out.rows.push_back({T, m, c + 1, std::nan(""), false, e.what()});
      }
    }
  }
  return out;
}

std::string recovery_csv(const RecoveryResult& result) {
  std::ostringstream os;
  os << "T,replication,community,delta,status\n";
  char buf[40];
  for (const auto& row : result.rows) {
    os << row.T << ',' << row.replication << ',';
    if (row.community == 0) os << "all";
    else os << row.community;
    os << ',';
    if (row.feasible) {
      std::snprintf(buf, sizeof buf, "%.12g", row.delta);
      os << buf << ",ok\n";
    } else {
      os << ",infeasible\n";
    }
  }
  return os.str();
}

std::vector<MedianCurve> median_curves(const RecoveryResult& result, int C) {
  std::vector<int> Ts;
  for (const auto& row : result.rows)
    if (std::find(Ts.begin(), Ts.end(), row.T) == Ts.end()) Ts.push_back(row.T);
  std::vector<MedianCurve> curves;
  for (int T : Ts) {
    MedianCurve mc;
    mc.T = T;
    std::vector<std::vector<double>> vals(C + 1);
    for (const auto& row : result.rows)
      if (row.T == T && row.feasible) vals[row.community].push_back(row.delta);
    mc.feasible = static_cast<int>(vals[0].size());
    mc.whole = median(vals[0]);
    for (int c = 1; c <= C; ++c) mc.community.push_back(median(vals[c]));
    curves.push_back(std::move(mc));
  }
  return curves;
}

BoundCheckResult run_bound_check(const StudySetup& setup, const BoundCheckConfig& config) {
  check_compatible(setup.order, setup.context);
  BoundCheckResult out;
  std::vector<int> violations(config.deltas.size(), 0);
  std::vector<double> ceiling_sum(config.deltas.size(), 0.0);
  for (int m = 0; m < config.replications; ++m) {
    const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(m));
    const ParameterVector theta0 = setup.fixed_theta
                                       ? *setup.fixed_theta
                                       : sample_stationary_params(setup.order, seed, setup.total_mass);
    NoiseSpec noise;
    noise.sigma = setup.noise_sigma;
    noise.seed = seed ^ kNoiseStream;
    const Realization real = simulate(setup.order, theta0, setup.context, config.T, setup.burn_in, noise);
    const DesignSystem ds = build_design(real, setup.order, setup.context);
    const FitResult fit = fit_ols(ds);
    const Eigen::VectorXd u = design_noise(ds, theta0);
    BoundCheckRow row;
    row.replication = m;
    row.error = (fit.theta - theta0).norm();
    for (std::size_t k = 0; k < config.deltas.size(); ++k) {
      const BoundReport br = error_bound(ds, setup.noise_sigma, config.deltas[k], &u);
      if (k == 0) {
        row.deterministic_bound = *br.deterministic_bound;
        row.deterministic_holds = row.error <= row.deterministic_bound + kBoundSlack;
      }
      row.probabilistic_bound.push_back(br.probabilistic_bound);
      row.ceiling.push_back(std::min(1.0, 1.0 - br.probability_floor));
      if (row.error > br.probabilistic_bound) ++violations[k];
      ceiling_sum[k] += row.ceiling.back();
    }
    if (!row.deterministic_holds) ++out.deterministic_violations;
    out.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < config.deltas.size(); ++k) {
    CoverageRow cr;
    cr.delta = config.deltas[k];
    cr.replications = config.replications;
    cr.violations = violations[k];
    cr.rate = config.replications ? static_cast<double>(violations[k]) / config.replications : 0.0;
    cr.mean_ceiling = config.replications ? ceiling_sum[k] / config.replications : 1.0;
    out.coverage.push_back(cr);
  }
  return out;
}

std::string coverage_csv(const BoundCheckResult& result) {
  std::ostringstream os;
  os << "delta,replications,violations,rate,ceiling,deterministic_violations\n";
  char buf[160];
  for (const auto& c : result.coverage) {
    std::snprintf(buf, sizeof buf, "%.6g,%d,%d,%.6g,%.6g,%d\n", c.delta, c.replications, c.violations, c.rate,
                  c.mean_ceiling, result.deterministic_violations);
    os << buf;
  }
  return os.str();
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("spearman needs two equal-length samples");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j) + 1.0;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const Eigen::Map<const Eigen::VectorXd> a(rx.data(), rx.size()), b(ry.data(), ry.size());
  const Eigen::VectorXd ac = a.array() - a.mean(), bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace gnar
