#include "gnar/acf.hpp"

#include "gnar/errors.hpp"
#include "gnar/fit.hpp"
#include "gnar/model_order.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

namespace gnar {

namespace {

std::vector<int> scope_nodes(const AcfScope& scope, int d) {
  if (scope.community < 0) {
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  if (!scope.partition) throw ValidationError("community scope needs a partition");
  if (scope.partition->d() != d) throw ValidationError("partition size differs from the series");
  if (scope.community >= scope.partition->C()) throw ValidationError("community index out of range");
  const auto& m = scope.partition->members(scope.community);
  if (m.empty()) throw ValidationError("community " + std::to_string(scope.community + 1) + " is empty");
  return m;
}

void check_inputs(const Realization& real, const WeightsMatrix& W, const StageSet& stages, int h, int r) {
  if (real.has_missing()) throw ValidationError("autocorrelation needs a complete panel");
  if (W.rows() != real.d() || W.cols() != real.d())
    throw ValidationError("weights size does not match the series");
  if (r < 1 || r > static_cast<int>(stages.size()))
    throw ValidationError("stage " + std::to_string(r) + " not available (have " +
                          std::to_string(stages.size()) + ")");
  if (h < 0 || h > real.T() - 2)
    throw ValidationError("lag " + std::to_string(h) + " outside 0.." + std::to_string(real.T() - 2));
}

double nacf_core(const Eigen::MatrixXd& X, const Eigen::MatrixXd& A, int h) {
  const Eigen::Index n = X.rows(), T = X.cols();
  const Eigen::MatrixXd Xt = X.colwise() - X.rowwise().mean();
  const Eigen::MatrixXd C =
      Eigen::MatrixXd::Identity(n, n) + 0.5 * (A + A.transpose());
  const Eigen::MatrixXd CX = C * Xt;
  auto lagged = [&](Eigen::Index lag) {
    return Xt.rightCols(T - lag).cwiseProduct(CX.leftCols(T - lag)).sum();
  };
  const double den = lagged(0);
  if (den == 0.0 || !std::isfinite(den))
    throw NumericalError("autocorrelation denominator is zero (constant series)");
  return lagged(h) / den;
}

Eigen::MatrixXd stage_block(const WeightsMatrix& W, const StageAdjacency& st, const std::vector<int>& nodes) {
  return stage_weights(W, st)(nodes, nodes);
}

}  // namespace

double nacf(const Realization& real, const WeightsMatrix& W, const StageSet& stages, int h, int r,
            AcfScope scope) {
  check_inputs(real, W, stages, h, r);
  const auto nodes = scope_nodes(scope, real.d());
  return nacf_core(real.values(nodes, Eigen::all), stage_block(W, stages[r - 1], nodes), h);
}

double pnacf(const Realization& real, const WeightsMatrix& W, const StageSet& stages, int h, int r,
             AcfScope scope) {
  if (h <= 1) return nacf(real, W, stages, h, r, scope);
  check_inputs(real, W, stages, h, r);
  const auto nodes = scope_nodes(scope, real.d());
  const int n = static_cast<int>(nodes.size());
  const int p = h - 1;

  // Partialling model GNAR(h-1, [r..r]) on the scoped nodes. Stages with no weight inside the
  // scope carry no information and are left out of the fit.
  const WeightsMatrix Wsub = W(nodes, nodes);
  StageSet kept;
  for (int rr = 1; rr <= r; ++rr) {
    BoolMatrix S = stages[rr - 1].S(nodes, nodes);
    if (Wsub.cwiseProduct(S.cast<double>()).cwiseAbs().sum() > 0.0)
      kept.push_back({static_cast<int>(kept.size()) + 1, std::move(S)});
  }
  const int m = static_cast<int>(kept.size());
  NetworkContext ctx{CommunityPartition::single(n), kept, WeightsSequence(Wsub)};
  const ModelOrder order = make_global_order(p, std::vector<int>(p, m));
  Realization sub;
  sub.values = real.values(nodes, Eigen::all);
  sub.values.colwise() -= sub.values.rowwise().mean();
  const DesignSystem ds = build_design(sub, order, ctx);
  const FitResult fr = fit_ols(ds);

  const int Tr = real.T() - p;
  if (h > Tr - 1)
    throw ValidationError("series too short for partial autocorrelation at lag " + std::to_string(h));
  const Eigen::MatrixXd E = Eigen::Map<const Eigen::MatrixXd>(fr.residuals.data(), n, Tr);
  return nacf_core(E, stage_block(W, stages[r - 1], nodes), h);
}

std::string kind_name(AcfKind kind) { return kind == AcfKind::Nacf ? "nacf" : "pnacf"; }

CorbitTable corbit_data(const Realization& real, const WeightsMatrix& W, const StageSet& stages,
                        int max_h, int max_r, AcfKind kind, const CommunityPartition* part) {
  if (max_h < 1 || max_r < 1) throw ValidationError("corbit needs max lag and max stage of at least 1");
  CorbitTable tb;
  tb.kind = kind;
  tb.max_lag = max_h;
  tb.max_stage = max_r;
  tb.T = real.T();
  tb.d = real.d();
  tb.C = part ? part->C() : 0;
  auto value = [&](int h, int r, AcfScope sc) {
    return kind == AcfKind::Nacf ? nacf(real, W, stages, h, r, sc) : pnacf(real, W, stages, h, r, sc);
  };
  for (int h = 1; h <= max_h; ++h)
    for (int r = 1; r <= max_r; ++r) {
      if (!part) {
        tb.rows.push_back({h, r, 0, value(h, r, {})});
        continue;
      }
      double sum = 0.0;
      for (int c = 0; c < part->C(); ++c) {
        const double v = value(h, r, {part, c});
        sum += v;
        tb.rows.push_back({h, r, c + 1, v});
      }
      tb.rows.push_back({h, r, -1, sum / part->C()});
    }
  return tb;
}

std::string corbit_csv(const CorbitTable& table) {
  std::ostringstream os;
  os << "kind,lag,stage,community,value\n";
  char buf[64];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof buf, "%.12g", row.value);
    os << kind_name(table.kind) << ',' << row.lag << ',' << row.stage << ',';
    if (row.community > 0) os << row.community;
    if (row.community < 0) os << "mean";
    os << ',' << buf << '\n';
  }
  return os.str();
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// White at zero, blue for negative, red for positive.
std::string diverging_color(double v, double limit) {
  double t = limit > 0.0 ? std::clamp(v / limit, -1.0, 1.0) : 0.0;
  const double neg[3] = {33, 102, 172}, pos[3] = {178, 24, 43};
  const double* end = t < 0 ? neg : pos;
  t = std::abs(t);
  int rgb[3];
  for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(255.0 + t * (end[k] - 255.0)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

std::string render_corbit_svg(const CorbitTable& table, const CorbitStyle& style) {
  const double size = style.size;
  const double legend_h = 60.0;
  const double cx = size / 2, cy = size / 2 + 20;
  const double outer = size / 2 - 50;
  const int rings = table.max_stage;
  const int sectors = table.max_lag;
  const double step = rings > 0 ? outer / rings : outer;

  double limit = style.value_limit;
  if (limit <= 0.0) {
    for (const auto& row : table.rows) limit = std::max(limit, std::abs(row.value));
    if (limit == 0.0) limit = 1.0;
  }

  auto angle = [&](int h) { return -std::numbers::pi / 2 + 2 * std::numbers::pi * (h - 1) / std::max(1, sectors); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(size)
     << "\" height=\"" << fmt(size + legend_h) << "\" viewBox=\"0 0 " << fmt(size) << ' '
     << fmt(size + legend_h) << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << fmt(size) << "\" height=\"" << fmt(size + legend_h)
     << "\" fill=\"#ffffff\"/>\n";
  std::string title = style.title.empty() ? kind_name(table.kind) : style.title;
  os << "<text x=\"" << fmt(cx) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";

  os << "<g id=\"axes\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\">\n";
  for (int r = 1; r <= rings; ++r)
    os << "<circle class=\"ring\" cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r * step) << "\"/>\n";
  for (int h = 1; h <= sectors; ++h) {
    const double a = angle(h);
    os << "<line class=\"sector\" x1=\"" << fmt(cx) << "\" y1=\"" << fmt(cy) << "\" x2=\""
       << fmt(cx + (outer + 10) * std::cos(a)) << "\" y2=\"" << fmt(cy + (outer + 10) * std::sin(a)) << "\"/>\n";
  }
  os << "</g>\n";
  os << "<circle id=\"zero\" cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy)
     << "\" r=\"4\" fill=\"#ffffff\" stroke=\"#444444\"/>\n";
  os << "<g id=\"lag-labels\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n";
  for (int h = 1; h <= sectors; ++h) {
    const double a = angle(h);
    os << "<text x=\"" << fmt(cx + (outer + 24) * std::cos(a)) << "\" y=\""
       << fmt(cy + (outer + 24) * std::sin(a) + 4) << "\">" << h << "</text>\n";
  }
  os << "</g>\n";

  os << "<g id=\"cells\" stroke=\"#333333\" stroke-width=\"0.5\">\n";
  const double sub = table.C > 0 ? std::min(step * 0.35, 14.0) : 0.0;
  const double dot = table.C > 0 ? std::max(2.0, sub * 0.45) : std::min(step * 0.3, 9.0);
  for (const auto& row : table.rows) {
    const double a = angle(row.lag);
    double x = cx + row.stage * step * std::cos(a);
    double y = cy + row.stage * step * std::sin(a);
    if (row.community > 0) {
      const double b = -std::numbers::pi / 2 + 2 * std::numbers::pi * (row.community - 1) / table.C;
      x += sub * std::cos(b);
      y += sub * std::sin(b);
    }
    os << "<circle class=\"cell\" cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(dot)
       << "\" fill=\"" << diverging_color(row.value, limit) << "\"><title>lag " << row.lag << " stage "
       << row.stage;
    if (row.community > 0) os << " community " << row.community;
    if (row.community < 0) os << " mean";
    os << ": " << fmt(row.value) << "</title></circle>\n";
  }
  os << "</g>\n";

  const double ly = size + 10, lw = size - 100, lx = 50;
  const int bins = 20;
  os << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int b = 0; b < bins; ++b) {
    const double v = -limit + (2 * limit) * (b + 0.5) / bins;
    os << "<rect x=\"" << fmt(lx + lw * b / bins) << "\" y=\"" << fmt(ly) << "\" width=\""
       << fmt(lw / bins) << "\" height=\"12\" fill=\"" << diverging_color(v, limit) << "\"/>\n";
  }
  os << "<text x=\"" << fmt(lx) << "\" y=\"" << fmt(ly + 28) << "\" text-anchor=\"start\">" << fmt(-limit) << "</text>\n"
     << "<text x=\"" << fmt(lx + lw / 2) << "\" y=\"" << fmt(ly + 28) << "\" text-anchor=\"middle\">0</text>\n"
     << "<text x=\"" << fmt(lx + lw) << "\" y=\"" << fmt(ly + 28) << "\" text-anchor=\"end\">" << fmt(limit) << "</text>\n"
     << "</g>\n</svg>\n";
  return os.str();
}

CrossCorrelation cross_correlation(const Realization& real, int h) {
  if (h < 0 || h >= real.T()) throw ValidationError("lag must lie in 0..T-1");
  if (real.has_missing()) throw ValidationError("cross-correlation needs a complete panel");
  const Eigen::Index T = real.T();
  const Eigen::MatrixXd Xt = real.values.colwise() - real.values.rowwise().mean();
  const Eigen::VectorXd sd = (Xt.rowwise().squaredNorm() / static_cast<double>(T)).cwiseSqrt();
  for (Eigen::Index i = 0; i < sd.size(); ++i)
    if (sd(i) == 0.0) throw NumericalError("node " + std::to_string(i + 1) + " has zero variance");
  CrossCorrelation cc;
  cc.values = Xt.rightCols(T - h) * Xt.leftCols(T - h).transpose() / static_cast<double>(T);
  cc.values = sd.cwiseInverse().asDiagonal() * cc.values * sd.cwiseInverse().asDiagonal();
  return cc;
}

}  // namespace gnar
