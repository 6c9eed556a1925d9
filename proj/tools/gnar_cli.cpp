#include "gnar/gnar.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef GNAR_DEFAULT_FIXTURE_DIR
#define GNAR_DEFAULT_FIXTURE_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace gnar;

namespace {

struct Common {
  std::uint64_t seed = 2024;
  std::string out_dir = ".";
  std::string format = "csv";
};

struct NetworkArgs {
  std::string panel;
  std::string schema = "long";
  std::string edges;
  std::string communities;
};

std::string fixture_dir() {
  if (const char* env = std::getenv("GNAR_FIXTURE_DIR"); env && *env) return env;
  return GNAR_DEFAULT_FIXTURE_DIR;
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("cannot parse " + path + ": " + e.what());
  }
}

void emit(const Common& c, const std::string& name, const std::string& content) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  const std::string path = (fs::path(c.out_dir) / name).string();
  write_text_file(path, content);
  std::cout << path << '\n';
}

PanelSchema schema_of(const std::string& s) { return s == "wide" ? PanelSchema::Wide : PanelSchema::Long; }

std::vector<std::string> community_roster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  const auto rows = parse_csv(in);
  std::vector<std::string> roster;
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (!rows[r].empty()) roster.push_back(rows[r][0]);
  std::sort(roster.begin(), roster.end());
  return roster;
}

// Network, stages, equal weights and partition over a label roster.
struct Built {
  Network net;
  NetworkContext ctx;
};

Built build_context(const std::vector<std::string>& roster, const std::string& edges,
                    const std::string& communities, int stage_cap = 0) {
  Built b;
  b.net = read_edges_csv(edges, roster);
  StageSet stages = stage_adjacency(b.net, stage_cap > 0 ? stage_cap : b.net.d);
  WeightsMatrix W = equal_weights(b.net, stages);
  CommunityPartition part = communities.empty() ? CommunityPartition::single(b.net.d)
                                                : read_communities_csv(communities, roster);
  b.ctx = {std::move(part), std::move(stages), WeightsSequence(std::move(W))};
  return b;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void add_network_options(CLI::App* app, NetworkArgs& a, bool panel, bool communities_required) {
  if (panel) {
    app->add_option("--panel", a.panel, "panel CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--schema", a.schema, "panel layout")->check(CLI::IsMember({"long", "wide"}));
  }
  app->add_option("--edges", a.edges, "edge list CSV (from,to)")->required()->check(CLI::ExistingFile);
  auto* c = app->add_option("--communities", a.communities, "community CSV (node,community)")->check(CLI::ExistingFile);
  if (communities_required) c->required();
}

int cmd_simulate(const Common& c, const NetworkArgs& a, const std::string& model, int T, int burn_in, double sigma) {
  const ModelSpec spec = model_from_json(read_json(model));
  if (!spec.theta) throw ValidationError("model document has no theta");
  const auto roster = community_roster(a.communities);
  const Built b = build_context(roster, a.edges, a.communities);
  const auto suff = check_stationary_sufficient(spec.order, *spec.theta);
  if (!suff.pass) std::cerr << "warning: parameters fail the sufficient stationarity condition\n";
  NoiseSpec noise;
  noise.sigma = sigma;
  noise.seed = c.seed;
  const Realization real = simulate(spec.order, *spec.theta, b.ctx, T, burn_in, noise);
  const Panel panel = panel_from_realization(real, roster);
  json side;
  side["seed"] = c.seed;
  side["T"] = T;
  side["burn_in"] = burn_in < 0 ? default_burn_in(spec.order.p()) : burn_in;
  side["sigma"] = sigma;
  side["model"] = model_to_json(spec.order, &*spec.theta);
  side["nodes"] = panel.nodes;
  if (c.format == "json") {
    json values = json::object();
    for (int i = 0; i < panel.d(); ++i) {
      std::vector<double> row(panel.T());
      for (int j = 0; j < panel.T(); ++j) row[j] = panel.values(i, j);
      values[panel.nodes[i]] = row;
    }
    side["values"] = values;
    emit(c, "realization.json", side.dump(2) + "\n");
    return 0;
  }
  std::ostringstream lo, wi;
  write_panel_csv(lo, panel, PanelSchema::Long);
  write_panel_csv(wi, panel, PanelSchema::Wide);
  emit(c, "realization_long.csv", lo.str());
  emit(c, "realization_wide.csv", wi.str());
  emit(c, "realization.json", side.dump(2) + "\n");
  return 0;
}

int cmd_fit(const Common& c, const NetworkArgs& a, const std::string& model, const std::string& convention,
            double ridge) {
  const ModelSpec spec = model_from_json(read_json(model));
  const Panel panel = read_panel_csv(a.panel, schema_of(a.schema));
  const Built b = build_context(panel.nodes, a.edges, a.communities);
  FitOptions opts;
  opts.sigma = convention == "cells" ? SigmaConvention::CellCount : SigmaConvention::DegreesOfFreedom;
  opts.ridge = ridge;
  const FitResult fit = fit_ols(build_design(panel.realization(), spec.order, b.ctx), opts);
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';
  emit(c, "coefficients.txt", coefficient_table(fit));
  if (c.format == "json") {
    emit(c, "fit.json", fit_to_json(fit).dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "name,estimate,se,t\n";
    for (std::size_t m = 0; m < fit.names.size(); ++m)
      os << fit.names[m] << ',' << fmt(fit.theta(m)) << ',' << fmt(fit.se(m)) << ',' << fmt(fit.t_values(m)) << '\n';
    emit(c, "coefficients.csv", os.str());
    emit(c, "fit.json", fit_to_json(fit).dump(2) + "\n");
  }
  return 0;
}

int cmd_stationarity(const Common& c, const std::string& model, const std::string& edges,
                     const std::string& communities) {
  const ModelSpec spec = model_from_json(read_json(model));
  if (!spec.theta) throw ValidationError("model document has no theta");
  const auto suff = check_stationary_sufficient(spec.order, *spec.theta);
  std::optional<CompanionReport> comp;
  if (!edges.empty() && !communities.empty()) {
    const Built b = build_context(community_roster(communities), edges, communities);
    comp = check_stationary_companion(spec.order, *spec.theta, b.ctx);
  }
  const json doc = stationarity_to_json(suff, comp ? &*comp : nullptr);
  emit(c, "stationarity.json", doc.dump(2) + "\n");
  std::cout << "sufficient: " << (suff.pass ? "pass" : "fail") << " (margin " << fmt(suff.margin) << ")\n";
  if (comp) std::cout << "companion: " << (comp->pass ? "pass" : "fail") << " (spectral radius "
                      << fmt(comp->spectral_radius) << ")\n";
  return 0;
}

int cmd_acf(const Common& c, const NetworkArgs& a, int max_lag, int max_stage, const std::string& kind, bool svg) {
  const Panel panel = read_panel_csv(a.panel, schema_of(a.schema));
  const Built b = build_context(panel.nodes, a.edges, a.communities);
  const CommunityPartition* part = a.communities.empty() ? nullptr : &b.ctx.partition;
  const CorbitTable tb = corbit_data(panel.realization(), b.ctx.weights.at(0), b.ctx.stages, max_lag,
                                     std::min<int>(max_stage, static_cast<int>(b.ctx.stages.size())),
                                     kind == "nacf" ? AcfKind::Nacf : AcfKind::Pnacf, part);
  const std::string base = kind_name(tb.kind);
  if (c.format == "json") {
    json rows = json::array();
    for (const auto& r : tb.rows)
      rows.push_back({{"lag", r.lag}, {"stage", r.stage},
                      {"community", r.community > 0 ? json(r.community) : r.community < 0 ? json("mean") : json(nullptr)},
                      {"value", r.value}});
    emit(c, base + ".json", json{{"kind", base}, {"T", tb.T}, {"d", tb.d}, {"band", white_noise_band(tb.d, tb.T)},
                                 {"rows", rows}}.dump(2) + "\n");
  } else {
    emit(c, base + ".csv", corbit_csv(tb));
  }
  if (svg) emit(c, base + ".svg", render_corbit_svg(tb));
  return 0;
}

int cmd_forecast(const Common& c, const NetworkArgs& a, const std::string& fit_path, bool holdout) {
  const json doc = read_json(fit_path);
  if (!doc.contains("model") || !doc.contains("coefficients")) throw ValidationError("not a fit document");
  FitResult fit;
  fit.order = model_from_json(doc.at("model")).order;
  std::vector<double> th;
  for (const auto& co : doc.at("coefficients")) th.push_back(co.at("estimate").get<double>());
  fit.theta = Eigen::Map<const Eigen::VectorXd>(th.data(), static_cast<Eigen::Index>(th.size()));
  check_theta(fit.order, fit.theta);
  const Panel panel = read_panel_csv(a.panel, schema_of(a.schema));
  const Built b = build_context(panel.nodes, a.edges, a.communities);
  Realization hist = panel.realization();
  std::optional<Eigen::VectorXd> actual;
  if (holdout) {
    if (hist.T() < 2) throw ValidationError("holdout needs at least two time points");
    actual = hist.values.col(hist.T() - 1);
    hist.values = hist.values.leftCols(hist.T() - 1).eval();
  }
  const Eigen::VectorXd f = forecast_one_step(fit, hist, b.ctx);
  const Eigen::VectorXd naive = naive_forecast(hist);
  std::ostringstream os;
  os << "node,forecast,naive" << (actual ? ",actual" : "") << '\n';
  for (int i = 0; i < panel.d(); ++i) {
    os << csv_escape(panel.nodes[i]) << ',' << fmt(f(i)) << ',' << fmt(naive(i));
    if (actual) os << ',' << fmt((*actual)(i));
    os << '\n';
  }
  emit(c, "forecast.csv", os.str());
  if (actual) {
    const json s = {{"rmspe", rmspe(f, *actual)}, {"rmspe_naive", rmspe(naive, *actual)}};
    emit(c, "forecast_score.json", s.dump(2) + "\n");
    std::cout << "rmspe " << fmt(rmspe(f, *actual)) << " naive " << fmt(rmspe(naive, *actual)) << '\n';
  }
  return 0;
}

int cmd_bound(const Common& c, const NetworkArgs& a, const std::string& model, double sigma, double delta) {
  const ModelSpec spec = model_from_json(read_json(model));
  const Panel panel = read_panel_csv(a.panel, schema_of(a.schema));
  const Built b = build_context(panel.nodes, a.edges, a.communities);
  const DesignSystem ds = build_design(panel.realization(), spec.order, b.ctx);
  std::optional<Eigen::VectorXd> u;
  if (spec.theta) u = design_noise(ds, *spec.theta);
  const BoundReport br = error_bound(ds, sigma, delta, u ? &*u : nullptr);
  json doc = bound_to_json(br);
  if (spec.theta) doc["error"] = (fit_ols(ds).theta - *spec.theta).norm();
  emit(c, "bound.json", doc.dump(2) + "\n");
  return 0;
}

int cmd_study(const Common& c, const std::string& config_path, bool full_sweep) {
  json cfg = config_path.empty() ? json::object() : read_json(config_path);
  const std::string base = config_path.empty() ? fixture_dir() : fs::path(config_path).parent_path().string();
  StudySetup setup;
  const std::string preset = cfg.value("setup", std::string("three_community"));
  if (preset == "two_community") {
    setup.order = two_community_order();
    setup.context = five_net_context();
    setup.fixed_theta = two_community_theta();
  } else if (preset == "three_community") {
    auto path = [&](const char* key, const char* def) {
      fs::path p = cfg.value(key, std::string(def));
      return p.is_absolute() ? p.string() : (fs::path(config_path.empty() ? fixture_dir() : base) / p).string();
    };
    const Panel panel = read_panel_csv(path("panel", "election_panel.csv"), PanelSchema::Long);
    const Network net = read_edges_csv(path("edges", "usa_borders.csv"), panel.nodes);
    const CommunityPartition part = classify_parties(read_winners_csv(path("winners", "election_winners.csv"), panel.nodes));
    setup.order = three_community_order();
    setup.context = periodic_context(net, part);
  } else {
    throw ValidationError("unknown study setup '" + preset + "'");
  }
  RecoveryConfig rc;
  rc.master_seed = c.seed;
  rc.replications = cfg.value("replications", rc.replications);
  rc.T_grid = cfg.value("T_grid", rc.T_grid);
  if (full_sweep || cfg.value("full_sweep", false)) {
    rc.T_grid.clear();
    for (int T = 25; T <= 1000; T += 25) rc.T_grid.push_back(T);
  }
  const RecoveryResult res = run_recovery_study(setup, rc);
  emit(c, "curves.csv", recovery_csv(res));
  std::ostringstream os;
  os << "T,feasible,whole";
  for (int k = 1; k <= setup.order.C(); ++k) os << ",community_" << k;
  os << '\n';
  for (const auto& mc : median_curves(res, setup.order.C())) {
    os << mc.T << ',' << mc.feasible << ',' << fmt(mc.whole);
    for (double v : mc.community) os << ',' << fmt(v);
    os << '\n';
  }
  emit(c, "median_curves.csv", os.str());
  return 0;
}

int cmd_convert(const Common& c, const std::string& raw_path) {
  const RawElection raw = read_mit_president(raw_path);
  std::ostringstream panel, winners;
  write_panel_csv(panel, raw.share, PanelSchema::Long);
  write_winners_csv(winners, raw);
  emit(c, "election_panel.csv", panel.str());
  emit(c, "election_winners.csv", winners.str());
  return 0;
}

int cmd_election(const Common& c, const std::string& config_path) {
  ElectionConfig cfg;
  if (config_path.empty()) {
    const fs::path dir = fixture_dir();
    cfg = election_config_from_json({{"panel", "election_panel.csv"},
                                     {"edges", "usa_borders.csv"},
                                     {"winners", "election_winners.csv"}},
                                    dir.string());
  } else {
    cfg = election_config_from_json(read_json(config_path), fs::path(config_path).parent_path().string());
  }
  const ElectionReport rep = election_pipeline(cfg);
  const std::string dir = cfg.output_dir.empty() || c.out_dir != "." ? c.out_dir : cfg.output_dir;
  write_bundle(rep.files, dir);
  std::cout << rep.files.at("coefficients_community.txt");
  for (const auto& [name, _] : rep.files) std::cout << (fs::path(dir) / name).string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network autoregression toolkit"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "random seed")->capture_default_str();
  app.add_option("--out-dir", common.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  // Global options are accepted after the subcommand as well.
  app.fallthrough();

  NetworkArgs net;
  std::string model, config, fit_path, kind = "pnacf", convention = "df";
  int T = 100, burn_in = -1, max_lag = 6, max_stage = 3;
  double sigma = 1.0, delta = 1.0, ridge = 0.0;
  bool holdout = false, full_sweep = false;
  std::string raw_path;

  auto* sim = app.add_subcommand("simulate", "simulate a GNAR process");
  sim->add_option("--model", model, "model JSON with theta")->required()->check(CLI::ExistingFile);
  add_network_options(sim, net, false, true);
  sim->add_option("--T", T, "series length")->check(CLI::PositiveNumber);
  sim->add_option("--burn-in", burn_in, "burn-in steps (negative: default)");
  sim->add_option("--sigma", sigma, "noise standard deviation")->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit", "least-squares fit");
  fit->add_option("--model", model, "model JSON")->required()->check(CLI::ExistingFile);
  add_network_options(fit, net, true, false);
  fit->add_option("--sigma-convention", convention, "residual variance denominator")
      ->check(CLI::IsMember({"df", "cells"}));
  fit->add_option("--ridge", ridge, "ridge epsilon for exploratory fits")->check(CLI::NonNegativeNumber);

  auto* st = app.add_subcommand("stationarity", "stationarity checks");
  st->add_option("--model", model, "model JSON with theta")->required()->check(CLI::ExistingFile);
  st->add_option("--edges", net.edges, "edge list CSV")->check(CLI::ExistingFile);
  st->add_option("--communities", net.communities, "community CSV")->check(CLI::ExistingFile);

  auto* nacf_cmd = app.add_subcommand("nacf", "network autocorrelation table");
  auto* corbit_cmd = app.add_subcommand("corbit", "Corbit table and SVG");
  for (auto* sc : {nacf_cmd, corbit_cmd}) {
    add_network_options(sc, net, true, false);
    sc->add_option("--max-lag", max_lag, "maximum lag")->check(CLI::PositiveNumber);
    sc->add_option("--max-stage", max_stage, "maximum stage")->check(CLI::PositiveNumber);
    sc->add_option("--kind", kind, "nacf or pnacf")->check(CLI::IsMember({"nacf", "pnacf"}));
  }

  auto* fc = app.add_subcommand("forecast", "one-step forecast");
  fc->add_option("--fit", fit_path, "fit JSON")->required()->check(CLI::ExistingFile);
  add_network_options(fc, net, true, false);
  fc->add_flag("--holdout", holdout, "forecast the last observation from the rest and score it");

  auto* bd = app.add_subcommand("bound", "finite-sample error bound");
  bd->add_option("--model", model, "model JSON; theta enables the deterministic bound")->required()->check(CLI::ExistingFile);
  add_network_options(bd, net, true, false);
  bd->add_option("--sigma", sigma, "noise standard deviation")->check(CLI::PositiveNumber);
  bd->add_option("--delta", delta, "deviation parameter")->check(CLI::NonNegativeNumber);

  auto* sd = app.add_subcommand("study", "recovery study");
  sd->add_option("--config", config, "study JSON")->check(CLI::ExistingFile);
  sd->add_flag("--full-sweep", full_sweep, "T = 25, 50, ..., 1000 instead of the default grid");

  auto* el = app.add_subcommand("election", "election analysis bundle");
  el->add_option("--config", config, "election JSON")->check(CLI::ExistingFile);

  auto* cv = app.add_subcommand("convert", "convert raw presidential returns to panel and winners CSVs");
  cv->add_option("--raw", raw_path, "returns CSV, one row per candidate")->required()->check(CLI::ExistingFile);

  if (argc <= 1) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(common, net, model, T, burn_in, sigma);
    if (*fit) return cmd_fit(common, net, model, convention, ridge);
    if (*st) return cmd_stationarity(common, model, net.edges, net.communities);
    if (*nacf_cmd) return cmd_acf(common, net, max_lag, max_stage, kind == "pnacf" && nacf_cmd->count("--kind") == 0 ? "nacf" : kind, false);
    if (*corbit_cmd) return cmd_acf(common, net, max_lag, max_stage, kind, true);
    if (*fc) return cmd_forecast(common, net, fit_path, holdout);
    if (*bd) return cmd_bound(common, net, model, sigma, delta);
    if (*sd) return cmd_study(common, config, full_sweep);
    if (*cv) return cmd_convert(common, raw_path);
    if (*el) return cmd_election(common, config);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
