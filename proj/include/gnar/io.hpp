#pragma once

#include "gnar/network.hpp"
#include "gnar/simulate.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace gnar {

using CsvRow = std::vector<std::string>;

// RFC 4180 style: quoted fields, doubled quotes, CRLF tolerated.
std::vector<CsvRow> parse_csv(std::istream& in);
std::string csv_escape(const std::string& field);

// Node-by-time panel keyed by labels. Nodes are sorted by label, times ascending.
struct Panel {
  std::vector<std::string> nodes;
  std::vector<long long> times;
  Eigen::MatrixXd values;
  BoolMatrix missing;

  int d() const { return static_cast<int>(nodes.size()); }
  int T() const { return static_cast<int>(times.size()); }
  int index_of(const std::string& node) const;
  Realization realization() const;
  // Keeps the first `count` time points.
  Panel head(int count) const;
};

// Long: `node,t,value`. Wide: `t,<node>,<node>,...`, one row per time point.
enum class PanelSchema { Long, Wide };

Panel read_panel_csv(const std::string& path, PanelSchema schema);
Panel parse_panel_csv(std::istream& in, PanelSchema schema);
void write_panel_csv(std::ostream& out, const Panel& panel, PanelSchema schema);
Panel panel_from_realization(const Realization& real, std::vector<std::string> labels = {});

// `from,to` by label against a roster, or by 1-based index when the roster is empty.
Network read_edges_csv(const std::string& path, const std::vector<std::string>& roster, int d = 0);
Network parse_edges_csv(std::istream& in, const std::vector<std::string>& roster, int d = 0);

// `node,community` with 1-based community ids; node by label or 1-based index.
CommunityPartition read_communities_csv(const std::string& path, const std::vector<std::string>& roster);
CommunityPartition parse_communities_csv(std::istream& in, const std::vector<std::string>& roster);

// `state,year,winner` with winner R or D; returns per-node Republican win flags ordered by year.
std::vector<std::vector<bool>> read_winners_csv(const std::string& path, const std::vector<std::string>& roster);
std::vector<std::vector<bool>> parse_winners_csv(std::istream& in, const std::vector<std::string>& roster);

inline constexpr int kRed = 1;
inline constexpr int kBlue = 2;
inline constexpr int kSwing = 3;

CommunityPartition classify_parties(const std::vector<std::vector<bool>>& republican_wins,
                                    double threshold = 0.75);

// Presidential returns with one row per candidate (year, state, candidatevotes, totalvotes,
// party_simplified columns). State names are title-cased to match the bundled fixtures.
struct RawElection {
  Panel share;                // Republican percentage of the total vote
  BoolMatrix republican_won;  // Republican votes exceed Democrat votes
};
RawElection parse_mit_president(std::istream& in);
RawElection read_mit_president(const std::string& path);
void write_winners_csv(std::ostream& out, const RawElection& raw);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gnar
