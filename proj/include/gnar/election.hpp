#pragma once

#include "gnar/acf.hpp"
#include "gnar/fit.hpp"
#include "gnar/io.hpp"
#include "gnar/model_order.hpp"
#include "gnar/serialize.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gnar {

struct ElectionConfig {
  std::string panel_path;
  PanelSchema panel_schema = PanelSchema::Long;
  std::string edges_path;
  std::string winners_path;
  std::string output_dir;
  int train_window = 11;
  double threshold = 0.75;
  int nacf_max_lag = 8;
  int pnacf_max_lag = 5;
  int max_stage = 11;
  ModelOrder community_order;    // default GNAR(2, {[1,0]}, 3)
  ModelOrder interaction_order;  // default (2, [1,1]) with I = {2,3}, {1,3}, {1,2}
  ModelOrder global_order;       // default GNAR(2, [1,0])
  ModelOrder local_order_shape;  // p and s reused for the local-alpha model
};

ElectionConfig default_election_config();
// Relative paths in the document resolve against base_dir.
ElectionConfig election_config_from_json(const json& doc, const std::string& base_dir);

struct ModelScore {
  std::string name;
  int parameters = 0;
  std::optional<double> rmspe_x;  // fit on raw data
  std::optional<double> rmspe_y;  // fit on standardized data, forecast mapped back
  std::string status = "ok";
};

struct ElectionReport {
  Panel panel;
  Network network;
  CommunityPartition partition;
  FitResult community_fit;    // standardized data, all time points
  FitResult interaction_fit;  // standardized data, all time points
  SufficientReport community_stationarity;
  std::vector<ModelScore> comparison;
  Eigen::VectorXd actual;
  std::map<std::string, Eigen::VectorXd> forecasts;
  CorbitTable nacf_table;
  CorbitTable pnacf_table;
  CorbitTable pnacf_diff_table;
  CorbitTable pnacf_diff_global;
  bool diff_lag1_inside_band = false;
  std::string var_status;
  int r_max = 0;
  // file name -> content
  std::map<std::string, std::string> files;
};

ElectionReport election_pipeline(const ElectionConfig& config);
void write_bundle(const std::map<std::string, std::string>& files, const std::string& dir);

}  // namespace gnar
