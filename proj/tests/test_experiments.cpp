#include "support.hpp"

#include <doctest.h>

#include <filesystem>

using namespace gnar;

TEST_CASE("five-node network") {
  const NetworkContext ctx = five_net_context();
  CHECK(ctx.d() == 5);
  CHECK(ctx.stages.size() == 3);
  CHECK(ctx.partition.size(0) == 3);
  CHECK(check_stationary_sufficient(two_community_order(), two_community_theta()).pass);
  CHECK(ParamLayout(three_community_order()).size() == 35);
}

TEST_CASE("recovery study shape and determinism") {
  StudySetup setup;
  setup.order = two_community_order();
  setup.context = five_net_context();
  RecoveryConfig cfg;
  cfg.T_grid = {3, 50, 100};
  cfg.replications = 4;
  const RecoveryResult a = run_recovery_study(setup, cfg);
  const RecoveryResult b = run_recovery_study(setup, cfg);
  CHECK(recovery_csv(a) == recovery_csv(b));
  CHECK(a.rows.size() == 3 * 4 * 3);
  int infeasible = 0;
  for (const auto& r : a.rows) infeasible += !r.feasible;
  CHECK(infeasible == 4 * 3);  // T = 3 leaves too few rows
  const auto curves = median_curves(a, 2);
  REQUIRE(curves.size() == 3);
  CHECK(curves[0].feasible == 0);
  for (const auto& mc : curves) {
    if (mc.feasible == 0) continue;
    for (double v : mc.community) CHECK(mc.whole >= v);
  }

  cfg.replications = 0;
  CHECK(recovery_csv(run_recovery_study(setup, cfg)) == "T,replication,community,delta,status\n");
}

TEST_CASE("bound check at small scale") {
  StudySetup setup;
  setup.order = two_community_order();
  setup.context = five_net_context();
  BoundCheckConfig cfg;
  cfg.replications = 20;
  const BoundCheckResult res = run_bound_check(setup, cfg);
  CHECK(res.deterministic_violations == 0);
  REQUIRE(res.coverage.size() == 3);
  CHECK(res.coverage[0].mean_ceiling == doctest::Approx(1.0));
  for (const auto& c : res.coverage) CHECK(c.rate <= std::min(1.0, c.mean_ceiling) + 1e-12);
}

TEST_CASE("spearman correlation") {
  CHECK(spearman({1, 2, 3, 4}, {10, 8, 6, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {1, 1, 2}) == doctest::Approx(0.8660254));
}

TEST_CASE("election fixture pipeline") {
  namespace fs = std::filesystem;
  const fs::path dir = testing::data_dir();
  const ElectionConfig cfg = election_config_from_json(
      {{"panel", "election_panel.csv"}, {"edges", "usa_borders.csv"}, {"winners", "election_winners.csv"}},
      dir.string());
  const ElectionReport rep = election_pipeline(cfg);
  CHECK(rep.panel.d() == 51);
  CHECK(rep.panel.T() == 12);
  CHECK(rep.r_max == 11);
  CHECK(rep.community_fit.theta.size() == 9);
  CHECK(rep.var_status.find("underdetermined") != std::string::npos);
  CHECK_FALSE(rep.community_stationarity.pass);
  CHECK(rep.files.count("coefficients_community.txt") == 1);
  CHECK(rep.files.at("coefficients_community.txt").find("beta_1,1,3") != std::string::npos);

  // lag-2 partial autocorrelation is negative across stages
  int negative = 0, total = 0;
  for (const auto& row : rep.pnacf_table.rows)
    if (row.lag == 2 && row.community == -1) {
      ++total;
      negative += row.value < 0;
    }
  CHECK(negative == total);

  // standardization spot check against a hand computation for one state
  const int i = rep.panel.index_of("Texas");
  const Eigen::VectorXd x = rep.panel.values.row(i).transpose();
  const double mean = x.mean();
  const double scale = std::sqrt((x.array() - mean).square().sum() / 12.0);
  const Standardized s = standardize(rep.panel.realization(), 12);
  CHECK(s.data.values(i, 5) == doctest::Approx((x(5) - mean) / scale));

  // the Blue-to-Red lag-two interaction is the largest in magnitude
  const auto& inter = rep.interaction_fit;
  double largest = 0.0;
  std::string largest_name;
  for (std::size_t m = 0; m < inter.names.size(); ++m)
    if (inter.names[m].rfind("gamma", 0) == 0 && std::abs(inter.theta(m)) > largest) {
      largest = std::abs(inter.theta(m));
      largest_name = inter.names[m];
    }
  CHECK(largest_name == "gamma_2,1,2:1");

  CHECK(election_pipeline(cfg).files == rep.files);
}
