#include "gnar/election.hpp"

#include "gnar/errors.hpp"
#include "gnar/forecast.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace gnar {

ElectionConfig default_election_config() {
  ElectionConfig cfg;
  cfg.community_order = make_community_order(3, 2, {1, 0});
  cfg.interaction_order.communities = {{2, {1, 1}, {1, 2}, true}, {2, {1, 1}, {0, 2}, true}, {2, {1, 1}, {0, 1}, true}};
  cfg.global_order = make_global_order(2, {1, 0});
  cfg.local_order_shape = make_global_order(2, {1, 0});
  return cfg;
}

namespace {

std::string resolve(const std::string& path, const std::string& base) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute() || base.empty()) return path;
  return (std::filesystem::path(base) / p).string();
}

std::string num(double v, const char* f = "%.6f") {
  char buf[40];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

ElectionConfig election_config_from_json(const json& doc, const std::string& base_dir) {
  ElectionConfig cfg = default_election_config();
  try {
    cfg.panel_path = resolve(doc.at("panel").get<std::string>(), base_dir);
    cfg.edges_path = resolve(doc.at("edges").get<std::string>(), base_dir);
    cfg.winners_path = resolve(doc.at("winners").get<std::string>(), base_dir);
    const std::string schema = doc.value("panel_schema", std::string("long"));
    if (schema != "long" && schema != "wide") throw ValidationError("panel_schema must be long or wide");
    cfg.panel_schema = schema == "long" ? PanelSchema::Long : PanelSchema::Wide;
    cfg.output_dir = doc.value("output_dir", std::string());
    cfg.train_window = doc.value("train_window", cfg.train_window);
    cfg.threshold = doc.value("threshold", cfg.threshold);
    cfg.nacf_max_lag = doc.value("nacf_max_lag", cfg.nacf_max_lag);
    cfg.pnacf_max_lag = doc.value("pnacf_max_lag", cfg.pnacf_max_lag);
    cfg.max_stage = doc.value("max_stage", cfg.max_stage);
    if (doc.value("weights", std::string("equal")) != "equal")
      throw ValidationError("only the equal weight scheme is supported");
    if (doc.contains("models")) {
      const auto& m = doc.at("models");
      if (m.contains("community")) cfg.community_order = model_from_json(m.at("community")).order;
      if (m.contains("interaction")) cfg.interaction_order = model_from_json(m.at("interaction")).order;
      if (m.contains("global")) cfg.global_order = model_from_json(m.at("global")).order;
      if (m.contains("local")) cfg.local_order_shape = model_from_json(m.at("local")).order;
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed election config: ") + e.what());
  }
  return cfg;
}

ElectionReport election_pipeline(const ElectionConfig& cfg) {
  ElectionReport rep;
  rep.panel = read_panel_csv(cfg.panel_path, cfg.panel_schema);
  if (rep.panel.missing.size() > 0) throw ValidationError("election panel has missing cells");
  const int d = rep.panel.d(), T = rep.panel.T(), T0 = cfg.train_window;
  if (T0 >= T) throw ValidationError("training window must leave a time point to forecast");
  rep.network = read_edges_csv(cfg.edges_path, rep.panel.nodes);
  rep.partition = classify_parties(read_winners_csv(cfg.winners_path, rep.panel.nodes), cfg.threshold);
  if (cfg.community_order.C() != rep.partition.C() || cfg.interaction_order.C() != rep.partition.C())
    throw ValidationError("community models must have one entry per party class");

  StageSet stages = stage_adjacency(rep.network, rep.network.d);
  rep.r_max = static_cast<int>(stages.size());
  const WeightsMatrix W = equal_weights(rep.network, stages);
  const NetworkContext ctx_comm{rep.partition, stages, WeightsSequence(W)};
  const NetworkContext ctx_glob{CommunityPartition::single(d), stages, WeightsSequence(W)};
  const NetworkContext ctx_loc{singleton_partition(d), stages, WeightsSequence(W)};

  const Realization X = rep.panel.realization();
  const Standardized Ys = standardize(X, T0);
  const Realization& Y = Ys.data;

  rep.community_fit = fit_ols(build_design(Y, cfg.community_order, ctx_comm));
  rep.interaction_fit = fit_ols(build_design(Y, cfg.interaction_order, ctx_comm));
  rep.community_stationarity = check_stationary_sufficient(cfg.community_order, rep.community_fit.theta);

  // One-step forecast of the last time point from the first T0.
  Realization X_train, Y_train;
  X_train.values = X.values.leftCols(T0);
  Y_train.values = Y.values.leftCols(T0);
  rep.actual = X.values.col(T0);
  const ModelOrder& ls = cfg.local_order_shape;
  const ModelOrder local = make_local_order(d, ls.communities.at(0).p, ls.communities.at(0).s);

  ModelScore naive{"naive", 0, {}, {}, "ok"};
  rep.forecasts["naive"] = naive_forecast(X_train);
  naive.rmspe_x = rmspe(rep.forecasts["naive"], rep.actual);
  naive.rmspe_y = naive.rmspe_x;
  rep.comparison.push_back(naive);

  struct Candidate {
    std::string name;
    const ModelOrder* order;
    const NetworkContext* ctx;
  };
  const std::vector<Candidate> menu = {{"glo", &cfg.global_order, &ctx_glob},
                                       {"com", &cfg.community_order, &ctx_comm},
                                       {"int", &cfg.interaction_order, &ctx_comm},
                                       {"loc", &local, &ctx_loc}};
  for (const auto& cand : menu) {
    ModelScore s;
    s.name = cand.name;
    s.parameters = static_cast<int>(ParamLayout(*cand.order).size());
    try {
      const FitResult fx = fit_ols(build_design(X_train, *cand.order, *cand.ctx));
      const Eigen::VectorXd xh = forecast_one_step(fx, X_train, *cand.ctx);
      const FitResult fy = fit_ols(build_design(Y_train, *cand.order, *cand.ctx));
      const Eigen::VectorXd yh = unstandardize_forecast(forecast_one_step(fy, Y_train, *cand.ctx), Ys.params);
      s.rmspe_x = rmspe(xh, rep.actual);
      s.rmspe_y = rmspe(yh, rep.actual);
      rep.forecasts[cand.name + "_x"] = xh;
      rep.forecasts[cand.name + "_y"] = yh;
    } catch (const std::exception& e) {
      s.status = e.what();
    }
    rep.comparison.push_back(s);
  }
  ModelScore var{"var", d * d, {}, {}, "ok"};
  try {
    const VarBaseline vb = fit_var_baseline(X_train, 1);
    var.rmspe_x = rmspe(vb.forecast, rep.actual);
  } catch (const ValidationError& e) {
    var.status = e.what();
  }
  rep.var_status = var.status;
  rep.comparison.push_back(var);

  const int max_r = std::min(cfg.max_stage, rep.r_max);
  rep.nacf_table = corbit_data(X, W, stages, std::min(cfg.nacf_max_lag, T - 2), max_r, AcfKind::Nacf, &rep.partition);
  rep.pnacf_table = corbit_data(X, W, stages, std::min(cfg.pnacf_max_lag, (T - 1) / 2), max_r, AcfKind::Pnacf,
                                &rep.partition);
  const Realization D = difference(X, 1);
  const int diff_h = std::min(cfg.pnacf_max_lag, (D.T() - 1) / 2);
  rep.pnacf_diff_table = corbit_data(D, W, stages, diff_h, max_r, AcfKind::Pnacf, &rep.partition);
  rep.pnacf_diff_global = corbit_data(D, W, stages, 1, max_r, AcfKind::Pnacf);
  rep.diff_lag1_inside_band = true;
  for (const auto& row : rep.pnacf_diff_global.rows)
    if (std::abs(row.value) > white_noise_band(d, D.T())) rep.diff_lag1_inside_band = false;
  for (const auto& row : rep.pnacf_diff_table.rows)
    if (row.lag == 1 && row.community > 0 &&
        std::abs(row.value) > white_noise_band(rep.partition.size(row.community - 1), D.T()))
      rep.diff_lag1_inside_band = false;

  // Bundle.
  auto& F = rep.files;
  {
    std::ostringstream os;
    os << "node,community,class\n";
    const char* names[] = {"", "red", "blue", "swing"};
    for (int i = 0; i < d; ++i)
      os << csv_escape(rep.panel.nodes[i]) << ',' << rep.partition.labels()[i] << ','
         << names[rep.partition.labels()[i]] << '\n';
    F["communities.csv"] = os.str();
  }
  F["coefficients_community.txt"] = coefficient_table(rep.community_fit);
  F["coefficients_community.json"] = fit_to_json(rep.community_fit).dump(2) + "\n";
  F["coefficients_interaction.txt"] = coefficient_table(rep.interaction_fit);
  F["coefficients_interaction.json"] = fit_to_json(rep.interaction_fit).dump(2) + "\n";
  {
    std::ostringstream os;
    os << "metric";
    for (const auto& s : rep.comparison) os << ',' << s.name;
    os << "\nrmspe_x";
    for (const auto& s : rep.comparison) os << ',' << (s.rmspe_x ? num(*s.rmspe_x) : "");
    os << "\nrmspe_y";
    for (const auto& s : rep.comparison) os << ',' << (s.rmspe_y ? num(*s.rmspe_y) : "");
    os << "\nparameters";
    for (const auto& s : rep.comparison) os << ',' << s.parameters;
    os << "\nstatus";
    for (const auto& s : rep.comparison) os << ',' << csv_escape(s.status);
    os << '\n';
    F["comparison.csv"] = os.str();
  }
  {
    std::ostringstream os;
    os << "node,actual";
    for (const auto& [name, _] : rep.forecasts) os << ',' << name;
    os << '\n';
    for (int i = 0; i < d; ++i) {
      os << csv_escape(rep.panel.nodes[i]) << ',' << num(rep.actual(i));
      for (const auto& [_, v] : rep.forecasts) os << ',' << num(v(i));
      os << '\n';
    }
    F["forecasts.csv"] = os.str();
  }
  F["nacf.csv"] = corbit_csv(rep.nacf_table);
  F["pnacf.csv"] = corbit_csv(rep.pnacf_table);
  F["pnacf.svg"] = render_corbit_svg(rep.pnacf_table, {520, 0.0, "PNACF R-Corbit"});
  F["pnacf_diff.csv"] = corbit_csv(rep.pnacf_diff_table);
  F["pnacf_diff.svg"] = render_corbit_svg(rep.pnacf_diff_table, {520, 0.0, "PNACF R-Corbit, differenced"});
  {
    json s;
    s["nodes"] = d;
    s["time_points"] = T;
    s["r_max"] = rep.r_max;
    s["community_sizes"] = {rep.partition.size(0), rep.partition.size(1), rep.partition.size(2)};
    s["community_fit_stationary"] = rep.community_stationarity.pass;
    s["community_fit_abs_sums"] = rep.community_stationarity.community_sums;
    s["var_status"] = rep.var_status;
    s["band"] = white_noise_band(d, T);
    s["diff_band"] = white_noise_band(d, D.T());
    s["diff_lag1_inside_band"] = rep.diff_lag1_inside_band;
    json cmp = json::object();
    for (const auto& m : rep.comparison)
      cmp[m.name] = {{"rmspe_x", m.rmspe_x ? json(*m.rmspe_x) : json(nullptr)},
                     {"rmspe_y", m.rmspe_y ? json(*m.rmspe_y) : json(nullptr)},
                     {"parameters", m.parameters},
                     {"status", m.status}};
    s["comparison"] = cmp;
    F["summary.json"] = s.dump(2) + "\n";
  }
  return rep;
}

void write_bundle(const std::map<std::string, std::string>& files, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir);
  for (const auto& [name, content] : files) write_text_file((std::filesystem::path(dir) / name).string(), content);
}

}  // namespace gnar
