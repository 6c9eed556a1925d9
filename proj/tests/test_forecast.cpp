#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace gnar;

TEST_CASE("standardization") {
  Realization real;
  real.values.resize(2, 4);
  real.values << 1, 2, 3, 4, 10, 10, 14, 14;
  const Standardized s = standardize(real, 4);
  CHECK(s.params.mean(0) == doctest::Approx(2.5));
  CHECK(s.params.scale(0) == doctest::Approx(std::sqrt(5.0 / 4.0)));
  CHECK(s.params.scale(1) == doctest::Approx(2.0));
  CHECK(s.data.values(1, 0) == doctest::Approx(-1.0));
  CHECK(unstandardize(s.data, s.params).values.isApprox(real.values));
  CHECK(unstandardize_forecast(Eigen::VectorXd::Zero(2), s.params).isApprox(s.params.mean));
  CHECK(unstandardize_forecast(s.data.values.col(3), s.params).isApprox(real.values.col(3)));

  Realization flat;
  flat.values = Eigen::MatrixXd::Ones(1, 5);
  CHECK_THROWS_AS(standardize(flat, 5), ValidationError);
}

TEST_CASE("standardization uses only the training window") {
  Realization real;
  real.values.resize(1, 5);
  real.values << 1, 3, 1, 3, 100;
  const Standardized s = standardize(real, 4);
  CHECK(s.params.mean(0) == doctest::Approx(2.0));
  CHECK(s.params.scale(0) == doctest::Approx(1.0));
  CHECK(s.data.values(0, 4) == doctest::Approx(98.0));
}

TEST_CASE("differencing") {
  Realization real;
  real.values.resize(2, 5);
  real.values << 1, 3, 5, 7, 9, 0, -1, -2, -3, -4;
  const Realization d = difference(real);
  CHECK(d.T() == 4);
  CHECK(d.first_time == 2);
  CHECK((d.values.row(0).array() == 2.0).all());
  CHECK((d.values.row(1).array() == -1.0).all());
}

TEST_CASE("one-step forecasts") {
  const NetworkContext ctx{CommunityPartition::single(1), {}, WeightsSequence(WeightsMatrix::Zero(1, 1))};
  Realization hist;
  hist.values.resize(1, 3);
  hist.values << 0.3, -1.0, 2.0;
  ParameterVector theta(1);
  theta << 0.5;
  CHECK(forecast_one_step(theta, make_global_order(1, {0}), hist, ctx)(0) == doctest::Approx(1.0));
  CHECK(forecast_one_step(ParameterVector::Zero(1), make_global_order(1, {0}), hist, ctx)(0) == 0.0);
  CHECK(naive_forecast(hist)(0) == 2.0);
}

TEST_CASE("forecast equals the conditional mean of the fitted model") {
  const NetworkContext ctx = five_net_context();
  NoiseSpec noise;
  const Realization real = simulate(two_community_order(), two_community_theta(), ctx, 60, -1, noise);
  const FitResult fit = fit_ols(build_design(real, two_community_order(), ctx));
  const Eigen::VectorXd f = forecast_one_step(fit, real, ctx);
  const VarMatrices phi = var_matrices(fit.order, fit.theta, ctx.weights.at(0), ctx.stages, ctx.partition);
  const Eigen::VectorXd direct = phi[0] * real.values.col(59) + phi[1] * real.values.col(58);
  CHECK((f - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("RMSPE") {
  Eigen::Vector2d a(1.0, 2.0), b(4.0, 6.0);
  CHECK(rmspe(a, a) == 0.0);
  CHECK(rmspe(a, b) == doctest::Approx(3.5355).epsilon(1e-4));
}

TEST_CASE("VAR baseline") {
  // d = 2 VAR(1)
  Eigen::Matrix2d A;
  A << 0.5, 0.2, -0.3, 0.4;
  std::mt19937_64 rng(12);
  std::normal_distribution<double> N(0.0, 1.0);
  Realization real;
  real.values = Eigen::MatrixXd::Zero(2, 400);
  for (int t = 1; t < 400; ++t) real.values.col(t) = A * real.values.col(t - 1) + Eigen::Vector2d(N(rng), N(rng));
  const VarBaseline vb = fit_var_baseline(real, 1);
  // independent least squares: regress X_t on X_{t-1}
  const Eigen::MatrixXd Y = real.values.rightCols(399), Z = real.values.leftCols(399);
  const Eigen::MatrixXd Ahat = Y * Z.transpose() * (Z * Z.transpose()).inverse();
  CHECK((vb.phi[0] - Ahat).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((vb.phi[0] - A).cwiseAbs().maxCoeff() < 0.15);
  CHECK((vb.forecast - Ahat * real.values.col(399)).cwiseAbs().maxCoeff() < 1e-10);

  Realization wide;
  wide.values = Eigen::MatrixXd::Random(51, 12);
  CHECK_THROWS_WITH_AS(fit_var_baseline(wide, 1), doctest::Contains("underdetermined"), ValidationError);
}
