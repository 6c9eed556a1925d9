#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <regex>

using namespace gnar;

namespace {

Realization noise_panel(int d, int T, std::uint64_t seed) {
  NoiseSpec n;
  n.seed = seed;
  Realization r;
  r.values = draw_noise(n, d, T);
  return r;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t k = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++k;
  return k;
}

}  // namespace

TEST_CASE("lag zero is exactly one") {
  const NetworkContext ctx = five_net_context();
  const Realization real = noise_panel(5, 50, 1);
  for (int r = 1; r <= 3; ++r) CHECK(std::abs(nacf(real, ctx.weights.at(0), ctx.stages, 0, r) - 1.0) <= 1e-12);
}

TEST_CASE("nacf follows the quadratic-form definition") {
  const NetworkContext ctx = five_net_context();
  const Realization real = noise_panel(5, 40, 2);
  const WeightsMatrix W = ctx.weights.at(0);
  for (int r = 1; r <= 3; ++r)
    for (int h = 1; h <= 3; ++h) {
      const Eigen::MatrixXd A = stage_weights(W, ctx.stages[r - 1]);
      const Eigen::MatrixXd C = Eigen::MatrixXd::Identity(5, 5) + 0.5 * (A + A.transpose());
      const Eigen::MatrixXd X = real.values.colwise() - real.values.rowwise().mean();
      double num = 0.0, den = 0.0;
      for (int t = 0; t + h < 40; ++t) num += X.col(t + h).dot(C * X.col(t));
      for (int t = 0; t < 40; ++t) den += X.col(t).dot(C * X.col(t));
      CHECK(nacf(real, W, ctx.stages, h, r) == doctest::Approx(num / den).epsilon(1e-12));
    }
}

TEST_CASE("one node reduces to the sample autocorrelation") {
  Realization real = noise_panel(1, 200, 3);
  const StageSet fake = {{1, BoolMatrix::Constant(1, 1, false)}};
  const Eigen::VectorXd x = real.values.row(0).transpose().array() - real.values.mean();
  const double acf1 = x.head(199).dot(x.tail(199)) / x.squaredNorm();
  CHECK(nacf(real, WeightsMatrix::Zero(1, 1), fake, 1, 1) == doctest::Approx(acf1));
}

TEST_CASE("pnacf at lag one is nacf and is shift invariant") {
  const NetworkContext ctx = five_net_context();
  Realization real = noise_panel(5, 120, 4);
  const WeightsMatrix W = ctx.weights.at(0);
  CHECK(pnacf(real, W, ctx.stages, 1, 2) == nacf(real, W, ctx.stages, 1, 2));
  const double before = pnacf(real, W, ctx.stages, 3, 1);
  real.values.array() += 7.5;
  CHECK(pnacf(real, W, ctx.stages, 3, 1) == doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("white noise stays inside the band") {
  const NetworkContext ctx = five_net_context();
  const Realization real = noise_panel(5, 4000, 5);
  const double band = white_noise_band(5, 4000);
  int outside = 0;
  for (int h = 1; h <= 5; ++h)
    for (int r = 1; r <= 3; ++r) outside += std::abs(nacf(real, ctx.weights.at(0), ctx.stages, h, r)) > band;
  CHECK(outside <= 1);
}

TEST_CASE("global GNAR(1,[1]) data cut off after lag one") {
  std::mt19937_64 rng(17);
  const Network net = testing::random_network(rng, 20, 0.05);
  const StageSet st = stage_adjacency(net, 2);
  const NetworkContext ctx{CommunityPartition::single(20), st, WeightsSequence(equal_weights(net, st))};
  ParameterVector theta(2);
  theta << 0.4, 0.35;
  NoiseSpec noise;
  const Realization real = simulate(make_global_order(1, {1}), theta, ctx, 1500, -1, noise);
  const double band = white_noise_band(20, 1500);
  CHECK(std::abs(pnacf(real, ctx.weights.at(0), st, 1, 1)) > band);
  for (int h = 2; h <= 4; ++h) CHECK(std::abs(pnacf(real, ctx.weights.at(0), st, h, 1)) <= band);
}

TEST_CASE("invalid requests") {
  const NetworkContext ctx = five_net_context();
  Realization real = noise_panel(5, 10, 6);
  CHECK_THROWS_AS(nacf(real, ctx.weights.at(0), ctx.stages, 1, 4), ValidationError);
  CHECK_THROWS_AS(pnacf(real, ctx.weights.at(0), ctx.stages, 6, 1), ValidationError);
  real.values.setConstant(1.0);
  CHECK_THROWS_AS(nacf(real, ctx.weights.at(0), ctx.stages, 1, 1), NumericalError);
}

TEST_CASE("Corbit tables and SVG") {
  const NetworkContext ctx = five_net_context();
  const Realization real = noise_panel(5, 200, 7);
  const CorbitTable plain = corbit_data(real, ctx.weights.at(0), ctx.stages, 4, 3, AcfKind::Nacf);
  CHECK(plain.rows.size() == 12);
  const CorbitTable comm =
      corbit_data(real, ctx.weights.at(0), ctx.stages, 4, 2, AcfKind::Pnacf, &ctx.partition);
  CHECK(comm.rows.size() == 4 * 2 * 3);
  const std::string csv = corbit_csv(comm);
  CHECK(csv.rfind("kind,lag,stage,community,value\n", 0) == 0);
  CHECK(count(csv, ",mean,") == 8);

  const std::string svg = render_corbit_svg(plain);
  CHECK(svg == render_corbit_svg(plain));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(count(svg, "class=\"ring\"") == 3);
  CHECK(count(svg, "class=\"sector\"") == 4);
  CHECK(count(svg, "class=\"cell\"") == 12);

  CorbitTable empty;
  const std::string e = render_corbit_svg(empty);
  CHECK(e.find("</svg>") != std::string::npos);
  CHECK(count(e, "class=\"cell\"") == 0);
}

TEST_CASE("cross correlation") {
  Realization real = noise_panel(2, 5000, 8);
  const CrossCorrelation cc = cross_correlation(real, 1);
  CHECK(std::abs(cc.values(0, 1)) < 0.05);
  Realization one = noise_panel(1, 300, 9);
  CHECK(cross_correlation(one, 0).values(0, 0) == doctest::Approx(1.0));
}
