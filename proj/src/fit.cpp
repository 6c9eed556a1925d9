#include "gnar/fit.hpp"

#include "gnar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace gnar {

int DesignSystem::K_min() const {
  return community_sizes.empty() ? 0 : *std::min_element(community_sizes.begin(), community_sizes.end());
}

DesignSystem build_design(const Realization& real, const ModelOrder& order,
                          const NetworkContext& ctx) {
  check_compatible(order, ctx);
  real.validate();
  const int d = ctx.d();
  if (real.d() != d) throw ValidationError("realization has " + std::to_string(real.d()) +
                                           " nodes, network has " + std::to_string(d));
  const int T = real.T();
  const int p = order.p();
  if (T <= p)
    throw ValidationError("series length " + std::to_string(T) + " must exceed the lag order " +
                          std::to_string(p));
  for (int c = 0; c < order.C(); ++c)
    if (ctx.partition.size(c) == 0)
      throw ValidationError("community " + std::to_string(c + 1) + " is empty but has a nonzero order");

  DesignSystem ds;
  ds.order = order;
  ds.T = T;
  ds.p = p;
  for (int c = 0; c < order.C(); ++c) {
    ds.community_sizes.push_back(ctx.partition.size(c));
    ds.community_lags.push_back(order.communities[c].p);
  }
  ds.community_rows.assign(order.C(), {});

  Eigen::MatrixXd X = real.values;
  std::vector<bool> col_missing(T, false);
  for (int j = 0; j < T; ++j)
    for (int i = 0; i < d; ++i)
      if (real.is_missing(i, j)) {
        X(i, j) = 0.0;
        col_missing[j] = true;
      }

  Eigen::MatrixXi row_of = Eigen::MatrixXi::Constant(d, T, -1);
  for (int j = p; j < T; ++j)
    for (int i = 0; i < d; ++i) {
      const int pc = order.communities[ctx.partition.community_of(i)].p;
      bool drop = real.is_missing(i, j);
      for (int k = 1; k <= pc && !drop; ++k) drop = real.is_missing(i, j - k);
      if (drop) {
        ++ds.dropped_rows;
        continue;
      }
      row_of(i, j) = static_cast<int>(ds.rows.size());
      ds.community_rows[ctx.partition.community_of(i)].push_back(static_cast<Eigen::Index>(ds.rows.size()));
      ds.rows.push_back({i, j});
    }

  const ParamLayout layout(order);
  const Eigen::Index n = static_cast<Eigen::Index>(ds.rows.size());
  ds.R = Eigen::MatrixXd::Zero(n, layout.size());
  ds.y.resize(n);
  for (Eigen::Index m = 0; m < n; ++m) ds.y(m) = X(ds.rows[m].node, ds.rows[m].col);

  std::vector<std::vector<Eigen::Index>> by_lag(p + 1);
  for (Eigen::Index j = 0; j < layout.coordinate_count(); ++j)
    by_lag[layout.coordinate(j).lag].push_back(j);

  using Ops = std::vector<Eigen::SparseMatrix<double>>;
  std::map<int, Ops> keyed;    // columns without missing cells, cached by weights key
  std::map<int, Ops> per_col;  // columns with missing cells
  auto ops_for = [&](int jj) -> const Ops& {
    const int t = real.first_time + jj;
    if (!col_missing[jj]) {
      const int key = ctx.weights.key(t);
      auto it = keyed.find(key);
      if (it == keyed.end())
        it = keyed.emplace(key, coordinate_operators(layout, ctx.weights.at(t), ctx.stages,
                                                     ctx.partition)).first;
      return it->second;
    }
    auto it = per_col.find(jj);
    if (it == per_col.end()) {
      std::vector<int> missing;
      for (int i = 0; i < d; ++i)
        if (real.is_missing(i, jj)) missing.push_back(i);
      const WeightsMatrix W = apply_missing(ctx.weights.at(t), missing, ctx.stages);
      it = per_col.emplace(jj, coordinate_operators(layout, W, ctx.stages, ctx.partition)).first;
    }
    return it->second;
  };

  Eigen::VectorXd z(d);
  for (int j = p; j < T; ++j)
    for (int k = 1; k <= p; ++k) {
      const Ops& ops = ops_for(j - k);
      for (Eigen::Index cj : by_lag[k]) {
        const Coordinate& co = layout.coordinate(cj);
        z.noalias() = ops[cj] * X.col(j - k);
        const Eigen::Index f = layout.free_index(cj);
        for (int i : ctx.partition.members(co.community))
          if (row_of(i, j) >= 0) ds.R(row_of(i, j), f) += z(i);
      }
    }
  return ds;
}

namespace {

struct LsSolution {
  ParameterVector theta;
  Eigen::MatrixXd gram_inverse;  // (R'R)^-1, or the ridge analogue
  double condition_number = 0.0;
  bool regularized = false;
};

LsSolution solve_ls(const Eigen::MatrixXd& R, const Eigen::VectorXd& y,
                    const std::vector<std::string>& names, double ridge) {
  const Eigen::Index q = R.cols();
  if (q == 0) throw ValidationError("design has no columns");
  LsSolution sol;
  if (ridge > 0.0) {
    Eigen::MatrixXd A = R.transpose() * R;
    A.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw NumericalError("regularized system is singular");
    sol.theta = ldlt.solve(R.transpose() * y);
    sol.gram_inverse = ldlt.solve(Eigen::MatrixXd::Identity(q, q));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    sol.condition_number = std::sqrt(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff());
    sol.regularized = true;
    return sol;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(R);
  if (qr.rank() < q) {
    std::string cols;
    for (Eigen::Index m = qr.rank(); m < q; ++m) {
      const auto idx = qr.colsPermutation().indices()(m);
      if (!cols.empty()) cols += ", ";
      cols += names.empty() ? std::to_string(idx + 1) : names[idx];
    }
    throw NumericalError("rank-deficient design (rank " + std::to_string(qr.rank()) + " of " +
                         std::to_string(q) + "); dependent columns: " + cols);
  }
  sol.theta = qr.solve(y);
  const Eigen::MatrixXd Rt = qr.matrixR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv =
      Rt.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(q, q));
  const auto& P = qr.colsPermutation();
  sol.gram_inverse = P * (Rinv * Rinv.transpose()) * P.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Rt);
  const auto& sv = svd.singularValues();
  sol.condition_number = sv(0) / sv(sv.size() - 1);
  return sol;
}

FitResult finish(const Eigen::MatrixXd& R, const Eigen::VectorXd& y, LsSolution sol,
                 const FitOptions& opts, std::vector<std::string> names,
                 std::vector<Eigen::Index> indices, const ModelOrder& order) {
  FitResult fr;
  const Eigen::Index n = R.rows(), q = R.cols();
  fr.theta = std::move(sol.theta);
  fr.residuals = y - R * fr.theta;
  const double rss = fr.residuals.squaredNorm();
  fr.rows = n;
  fr.sigma2_cells = rss / static_cast<double>(n);
  fr.sigma2_df = n > q ? rss / static_cast<double>(n - q) : std::numeric_limits<double>::quiet_NaN();
  if (n <= q) fr.warnings.push_back("no residual degrees of freedom");
  fr.convention = opts.sigma;
  fr.sigma2 = opts.sigma == SigmaConvention::DegreesOfFreedom ? fr.sigma2_df : fr.sigma2_cells;
  fr.cov = fr.sigma2 * sol.gram_inverse;
  fr.se = fr.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  fr.t_values = fr.theta.cwiseQuotient(fr.se);
  fr.condition_number = sol.condition_number;
  if (fr.condition_number > 1e10) fr.warnings.push_back("design is near-singular (condition > 1e10)");
  fr.regularized = sol.regularized;
  if (fr.regularized) fr.warnings.push_back("regularized fit");
  fr.names = std::move(names);
  fr.param_indices = std::move(indices);
  fr.order = order;
  return fr;
}

std::vector<std::string> all_names(const ParamLayout& layout) {
  std::vector<std::string> names;
  for (Eigen::Index f = 0; f < layout.size(); ++f) names.push_back(layout.name(f));
  return names;
}

}  // namespace

FitResult fit_ols(const DesignSystem& design, const FitOptions& opts) {
  const ParamLayout layout = design.layout();
  auto names = all_names(layout);
  std::vector<Eigen::Index> idx(layout.size());
  for (Eigen::Index f = 0; f < layout.size(); ++f) idx[f] = f;
  auto sol = solve_ls(design.R, design.y, names, opts.ridge);
  return finish(design.R, design.y, std::move(sol), opts, std::move(names), std::move(idx),
                design.order);
}

FitResult fit_community(const DesignSystem& design, int c, const FitOptions& opts) {
  const ParamLayout layout = design.layout();
  if (layout.tied()) throw ValidationError("per-community fits need an untied layout");
  if (c < 0 || c >= layout.C()) throw ValidationError("community index out of range");
  const auto& rows = design.community_rows[c];
  const auto& cols = layout.community_params(c);
  if (rows.empty()) throw ValidationError("community block has no rows");
  const Eigen::MatrixXd Rc = design.R(rows, cols);
  const Eigen::VectorXd yc = design.y(rows);
  std::vector<std::string> names;
  for (Eigen::Index f : cols) names.push_back(layout.name(f));
  auto sol = solve_ls(Rc, yc, names, opts.ridge);
  return finish(Rc, yc, std::move(sol), opts, std::move(names), cols, design.order);
}

FitResult fit_gls(const DesignSystem& design, const Eigen::MatrixXd& Sigma) {
  const Eigen::Index n = design.R.rows();
  if (Sigma.rows() != Sigma.cols()) throw ValidationError("covariance must be square");
  if (!Sigma.isApprox(Sigma.transpose(), 1e-12)) throw ValidationError("covariance must be symmetric");
  Eigen::MatrixXd Rw(n, design.R.cols());
  Eigen::VectorXd yw(n);
  auto whiten = [&](const Eigen::MatrixXd& S, const std::vector<Eigen::Index>& idx,
                    const std::vector<Eigen::Index>& sidx) {
    Eigen::LLT<Eigen::MatrixXd> llt(S(sidx, sidx));
    if (llt.info() != Eigen::Success) throw ValidationError("covariance is not positive definite");
    const Eigen::MatrixXd Rb = llt.matrixL().solve(Eigen::MatrixXd(design.R(idx, Eigen::all)));
    const Eigen::VectorXd yb = llt.matrixL().solve(Eigen::VectorXd(design.y(idx)));
    Rw(idx, Eigen::all) = Rb;
    yw(idx) = yb;
  };
  const Eigen::Index d =
      std::accumulate(design.community_sizes.begin(), design.community_sizes.end(), Eigen::Index{0});
  if (Sigma.rows() == n) {
    std::vector<Eigen::Index> all(n);
    for (Eigen::Index m = 0; m < n; ++m) all[m] = m;
    whiten(Sigma, all, all);
  } else if (Sigma.rows() == d) {
    Eigen::Index start = 0;
    while (start < n) {
      Eigen::Index stop = start;
      std::vector<Eigen::Index> idx, nodes;
      while (stop < n && design.rows[stop].col == design.rows[start].col) {
        idx.push_back(stop);
        nodes.push_back(design.rows[stop].node);
        ++stop;
      }
      whiten(Sigma, idx, nodes);
      start = stop;
    }
  } else {
    throw ValidationError("covariance must be d x d or rows x rows");
  }
  const ParamLayout layout = design.layout();
  auto names = all_names(layout);
  std::vector<Eigen::Index> idx(layout.size());
  for (Eigen::Index f = 0; f < layout.size(); ++f) idx[f] = f;
  auto sol = solve_ls(Rw, yw, names, 0.0);
  FitResult fr = finish(Rw, yw, std::move(sol), {}, std::move(names), std::move(idx), design.order);
  // Covariance is (R' S^-1 R)^-1 without a residual scale.
  fr.cov /= fr.sigma2;
  fr.se = fr.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  fr.t_values = fr.theta.cwiseQuotient(fr.se);
  fr.residuals = design.y - design.R * fr.theta;
  return fr;
}

Eigen::VectorXd design_noise(const DesignSystem& design, const ParameterVector& theta0) {
  if (theta0.size() != design.R.cols()) throw ValidationError("parameter vector has wrong length");
  return design.y - design.R * theta0;
}

BoundReport error_bound(const DesignSystem& design, double sigma_u, double delta,
                        const Eigen::VectorXd* noise) {
  const ParamLayout layout = design.layout();
  if (layout.tied()) throw ValidationError("error bound needs an untied layout");
  if (!(sigma_u > 0.0)) throw ValidationError("noise sigma must be positive");
  if (delta < 0.0) throw ValidationError("delta must be nonnegative");
  BoundReport br;
  br.C = layout.C();
  br.p = design.p;
  br.T = design.T;
  br.K_min = design.K_min();
  br.sigma_u = sigma_u;
  br.delta = delta;
  br.q_total = static_cast<int>(layout.size());
  br.tau = std::numeric_limits<double>::infinity();
  double n_min = std::numeric_limits<double>::infinity();
  for (int c = 0; c < br.C; ++c) {
    const auto& cols = layout.community_params(c);
    br.q_max = std::max(br.q_max, static_cast<int>(cols.size()));
    const Eigen::MatrixXd Rc = design.R(Eigen::all, cols);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Rc.transpose() * Rc, Eigen::EigenvaluesOnly);
    double lam = es.eigenvalues().minCoeff();
    if (lam < 0.0) {
      br.warnings.push_back("community " + std::to_string(c + 1) +
                            ": negative round-off eigenvalue clamped to zero");
      lam = 0.0;
    }
    const double cells = static_cast<double>(design.community_sizes[c]) *
                         static_cast<double>(design.T - design.community_lags[c]);
    n_min = std::min(n_min, cells);
    br.tau_c.push_back(lam * lam / cells);
    br.tau = std::min(br.tau, br.tau_c.back());
  }
  if (!(br.tau > 0.0)) throw NumericalError("tau is zero: a community block is rank deficient");
  br.gamma = std::sqrt(n_min) * design.R.colwise().norm().maxCoeff();
  const double scale = br.tau * br.K_min * static_cast<double>(br.T - br.p);
  const double cq = std::sqrt(static_cast<double>(br.C) * br.q_max);
  br.probabilistic_bound = 2.0 * cq * sigma_u * br.gamma * std::sqrt(2.0) *
                           (std::sqrt(std::log(static_cast<double>(br.q_total)) / scale) + delta);
  br.probability_floor = 1.0 - 2.0 * std::exp(-delta * delta * scale);
  if (noise) {
    if (noise->size() != design.R.rows()) throw ValidationError("noise vector has wrong length");
    br.rtu_inf = (design.R.transpose() * *noise).cwiseAbs().maxCoeff();
    br.deterministic_bound = 2.0 / std::sqrt(scale) * cq * *br.rtu_inf;
  }
  return br;
}

AsymptoticCovariance asymptotic_covariance(const DesignSystem& design, double sigma2) {
  AsymptoticCovariance ac;
  ac.cells = design.R.rows();
  ac.gram_average = design.R.transpose() * design.R / static_cast<double>(ac.cells);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(ac.gram_average);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
    throw NumericalError("singular Gram matrix");
  ac.limit = sigma2 * ldlt.solve(Eigen::MatrixXd::Identity(design.R.cols(), design.R.cols()));
  ac.finite_sample = ac.limit / static_cast<double>(ac.cells);
  return ac;
}

}  // namespace gnar
