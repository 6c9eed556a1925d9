#include "support.hpp"

#include <doctest.h>

using namespace gnar;

TEST_CASE("parameter counts") {
  CHECK(ParamLayout(make_global_order(2, {1, 0})).size() == 3);
  CHECK(ParamLayout(make_local_order(7, 1, {1})).size() == 8);

  ModelOrder order = make_community_order(2, 1, {1});
  const auto before = ParamLayout(order).community_params(0).size();
  order.communities[0].interactions = {1};
  CHECK(ParamLayout(order).community_params(0).size() == before + 1);

  for (int d : {2, 3, 5})
    for (int p : {1, 2, 3}) CHECK(ParamLayout(make_var_order(d, p)).size() == p * d * d);
}

TEST_CASE("layout round-trip") {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 30; ++n) {
    const ModelOrder order = testing::random_order(rng, 3, 3, 3, true);
    const ParamLayout layout(order);
    CHECK(layout.size() == layout.coordinate_count());
    for (Eigen::Index j = 0; j < layout.size(); ++j) {
      CHECK(layout.index_of(layout.coordinate(j)) == j);
      CHECK(layout.free_index(j) == j);
    }
  }
}

TEST_CASE("coefficient names follow community, lag, stage order") {
  const ParamLayout layout(two_community_order());
  const std::vector<std::string> expected = {"alpha_1,1",   "beta_1,1,1", "alpha_1,2",
                                             "beta_1,1,2",  "alpha_2,2",  "beta_2,1,2"};
  REQUIRE(layout.size() == 6);
  for (int j = 0; j < 6; ++j) CHECK(layout.name(j) == expected[j]);

  ModelOrder inter = make_community_order(3, 1, {1});
  inter.communities[0].interactions = {1, 2};
  const ParamLayout li(inter);
  CHECK(li.name(2) == "gamma_1,1,1:2");
  CHECK(li.name(3) == "gamma_1,1,1:3");
}

TEST_CASE("tied layout shares neighbourhood coefficients") {
  const ParamLayout layout(make_local_order(4, 2, {2, 1}));
  CHECK(layout.tied());
  CHECK(layout.size() == 4 * 2 + 3);
  const auto b = layout.find({CoefKind::Beta, 1, 2, 3, -1});
  REQUIRE(b.has_value());
  CHECK(layout.name(layout.free_index(*b)) == "beta_1,2");
  CHECK(layout.free_index(*layout.find({CoefKind::Beta, 1, 2, 0, -1})) == layout.free_index(*b));
}

TEST_CASE("invalid orders are rejected") {
  CHECK_THROWS_AS(make_global_order(2, {1}), ValidationError);
  CHECK_THROWS_AS(make_global_order(0, {}), ValidationError);
  ModelOrder o = make_community_order(2, 1, {1});
  o.communities[0].interactions = {0};
  CHECK_THROWS_AS(o.validate(), ValidationError);
  CHECK_THROWS_AS(check_theta(make_global_order(1, {1}), Eigen::VectorXd::Zero(3)), ValidationError);
}

TEST_CASE("sufficient stationarity condition") {
  ParameterVector k1(6);
  k1 << 0.23, 0.47, 0.20, 0.30, 0.18, 0.27;
  const SufficientReport ok = check_stationary_sufficient(two_community_order(), k1);
  CHECK(ok.community_sums[0] == doctest::Approx(0.70));
  CHECK(ok.pass);

  ParameterVector table(9);
  table << 0.393, 0.183, -0.593, 0.558, 0.069, -0.351, 0.905, -0.747, -0.591;
  const SufficientReport bad = check_stationary_sufficient(make_community_order(3, 2, {1, 0}), table);
  CHECK(bad.community_sums[2] == doctest::Approx(2.243));
  CHECK_FALSE(bad.pass);

  const SufficientReport zero = check_stationary_sufficient(two_community_order(), ParameterVector::Zero(6));
  CHECK(zero.pass);
  CHECK(zero.margin == doctest::Approx(1.0));
}

TEST_CASE("VAR matrices by hand") {
  const Network net = build_network({{1, 2}}, 2);
  const StageSet st = stage_adjacency(net, 1);
  const WeightsMatrix W = equal_weights(net, st);
  ParameterVector theta(2);
  theta << 0.5, 0.2;
  const VarMatrices phi = var_matrices(make_global_order(1, {1}), theta, W, st, CommunityPartition::single(2));
  REQUIRE(phi.size() == 1);
  Eigen::Matrix2d expected;
  expected << 0.5, 0.2, 0.2, 0.5;
  CHECK(phi[0].isApprox(expected));

  const VarMatrices z = var_matrices(make_global_order(1, {1}), ParameterVector::Zero(2), W, st,
                                     CommunityPartition::single(2));
  CHECK(z[0].isZero());
}

TEST_CASE("VAR matrices reproduce the conditional mean") {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 20; ++n) {
    const int d = 7, C = 3;
    const Network net = testing::random_network(rng, d, 0.2);
    const CommunityPartition part = testing::random_partition(rng, d, C);
    const StageSet st = stage_adjacency(net, 3);
    const ModelOrder order = testing::random_order(rng, C, 3, static_cast<int>(st.size()), true);
    const WeightsMatrix W = equal_weights(net, st);
    const NetworkContext ctx{part, st, WeightsSequence(W)};
    Eigen::VectorXd theta = Eigen::VectorXd::Random(ParamLayout(order).size());
    const VarMatrices phi = var_matrices(order, theta, W, st, part);
    const Eigen::MatrixXd past = Eigen::MatrixXd::Random(d, order.p());
    Eigen::VectorXd direct = Eigen::VectorXd::Zero(d);
    for (int k = 1; k <= order.p(); ++k) direct += phi[k - 1] * past.col(order.p() - k);
    CHECK((conditional_mean(order, theta, ctx, past, order.p() + 1) - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("full community order is an unrestricted VAR") {
  const int d = 3, p = 2;
  const Network net = build_network({{1, 2}, {2, 3}, {1, 3}}, d);
  const StageSet st = stage_adjacency(net, 1);
  const WeightsMatrix W = WeightsMatrix::Ones(d, d) - WeightsMatrix::Identity(d, d);
  const ModelOrder order = make_var_order(d, p);
  const ParamLayout layout(order);
  // Every VAR entry is driven by exactly one parameter.
  for (Eigen::Index j = 0; j < layout.size(); ++j) {
    ParameterVector e = ParameterVector::Zero(layout.size());
    e(j) = 1.0;
    const VarMatrices phi = var_matrices(order, e, W, st, singleton_partition(d));
    int nonzero = 0;
    for (const auto& m : phi) nonzero += static_cast<int>((m.array() != 0.0).count());
    CHECK(nonzero == 1);
  }
}

TEST_CASE("companion check") {
  VarMatrices half = {0.5 * Eigen::MatrixXd::Identity(3, 3)};
  const CompanionReport a = check_stationary_companion(half);
  CHECK(a.spectral_radius == doctest::Approx(0.5));
  CHECK(a.pass);
  VarMatrices unit = {Eigen::MatrixXd::Identity(3, 3)};
  const CompanionReport b = check_stationary_companion(unit);
  CHECK(b.spectral_radius == doctest::Approx(1.0));
  CHECK_FALSE(b.pass);
  CHECK(companion_matrix({Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)}).rows() == 4);
}

TEST_CASE("companion check refuses time-varying weights") {
  const Network net = five_net();
  const CommunityPartition part = five_net_partition();
  const StageSet st = stage_adjacency(net, 3);
  NetworkContext ctx{part, st, WeightsSequence([&](int) { return equal_weights(net, st); }, 2)};
  CHECK_THROWS_AS(check_stationary_companion(two_community_order(), two_community_theta(), ctx), ValidationError);
}

TEST_CASE("model JSON round-trip") {
  ModelOrder order = three_community_order();
  const ParameterVector theta = sample_stationary_params(order, 5);
  const ModelSpec back = model_from_json(json::parse(model_to_json(order, &theta).dump()));
  REQUIRE(back.theta.has_value());
  CHECK(*back.theta == theta);
  CHECK(back.order.C() == order.C());
  for (int c = 0; c < order.C(); ++c) {
    CHECK(back.order.communities[c].s == order.communities[c].s);
    CHECK(back.order.communities[c].interactions == order.communities[c].interactions);
  }
  json bad = model_to_json(order, &theta);
  bad["layout_version"] = 99;
  CHECK_THROWS_AS(model_from_json(bad), ValidationError);
}
