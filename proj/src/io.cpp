#include "gnar/io.hpp"

#include "gnar/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace gnar {

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false, any = false;
  char ch;
  auto end_field = [&] {
    row.push_back(field);
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(row);
    row.clear();
  };
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') quoted = true;
    else if (ch == ',') end_field();
    else if (ch == '\n') end_row();
    else if (ch != '\r') field += ch;
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  if (any && (!field.empty() || !row.empty())) end_row();
  return rows;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double parse_double(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ValidationError("unparseable number '" + raw + "' at " + where);
  return v;
}

long long parse_int(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ValidationError("unparseable integer '" + raw + "' at " + where);
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  return in;
}

std::string line_ref(std::size_t row) { return "line " + std::to_string(row + 1); }

// Resolves a node by label, or by 1-based index when the roster is empty.
int resolve_node(const std::string& raw, const std::vector<std::string>& roster,
                 const std::map<std::string, int>& lookup, int d, const std::string& where) {
  const std::string key = trim(raw);
  if (!roster.empty()) {
    auto it = lookup.find(key);
    if (it != lookup.end()) return it->second;
    throw ValidationError("unknown node label '" + key + "' at " + where);
  }
  const long long v = parse_int(key, where);
  if (v < 1 || v > d) throw ValidationError("node index " + key + " out of range at " + where);
  return static_cast<int>(v) - 1;
}

std::map<std::string, int> roster_lookup(const std::vector<std::string>& roster) {
  std::map<std::string, int> lookup;
  for (int i = 0; i < static_cast<int>(roster.size()); ++i)
    if (!lookup.emplace(roster[i], i).second) throw ValidationError("duplicate node label " + roster[i]);
  return lookup;
}

void require_header(const std::vector<CsvRow>& rows, std::size_t min_cols, const std::string& what) {
  if (rows.empty()) throw ValidationError(what + ": empty file");
  if (rows[0].size() < min_cols) throw ValidationError(what + ": header has too few columns");
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != rows[0].size()) throw ValidationError(what + ": ragged row at " + line_ref(r));
}

}  // namespace

int Panel::index_of(const std::string& node) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
  if (it == nodes.end() || *it != node) return -1;
  return static_cast<int>(it - nodes.begin());
}

Realization Panel::realization() const {
  Realization r;
  r.values = values;
  if (missing.size() > 0 && missing.any()) r.missing = missing;
  r.first_time = 1;
  return r;
}

Panel Panel::head(int count) const {
  if (count < 1 || count > T()) throw ValidationError("panel head length out of range");
  Panel p = *this;
  p.times.resize(count);
  p.values = values.leftCols(count);
  if (missing.size() > 0) p.missing = missing.leftCols(count);
  return p;
}

namespace {

struct Cell {
  double value;
  bool missing;
};

Panel assemble(std::map<std::string, std::map<long long, Cell>>& cells, const std::set<long long>& times) {
  Panel p;
  for (const auto& [node, _] : cells) p.nodes.push_back(node);
  p.times.assign(times.begin(), times.end());
  p.values = Eigen::MatrixXd::Zero(p.d(), p.T());
  p.missing = BoolMatrix::Constant(p.d(), p.T(), false);
  int i = 0;
  for (const auto& [node, row] : cells) {
    int j = 0;
    for (long long t : p.times) {
      auto it = row.find(t);
      if (it == row.end() || it->second.missing) {
        p.values(i, j) = std::numeric_limits<double>::quiet_NaN();
        p.missing(i, j) = true;
      } else {
        p.values(i, j) = it->second.value;
      }
      ++j;
    }
    ++i;
  }
  if (!p.missing.any()) p.missing.resize(0, 0);
  return p;
}

}  // namespace

Panel parse_panel_csv(std::istream& in, PanelSchema schema) {
  const auto rows = parse_csv(in);
  std::map<std::string, std::map<long long, Cell>> cells;
  std::set<long long> times;
  if (schema == PanelSchema::Long) {
    require_header(rows, 3, "long panel");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const std::string node = trim(rows[r][0]);
      const long long t = parse_int(rows[r][1], line_ref(r));
      const std::string v = trim(rows[r][2]);
      Cell cell{v.empty() ? 0.0 : parse_double(v, line_ref(r)), v.empty()};
      if (!cells[node].emplace(t, cell).second)
        throw ValidationError("duplicate cell (" + node + ", " + std::to_string(t) + ") at " + line_ref(r));
      times.insert(t);
    }
  } else {
    require_header(rows, 2, "wide panel");
    std::vector<std::string> nodes;
    for (std::size_t k = 1; k < rows[0].size(); ++k) {
      nodes.push_back(trim(rows[0][k]));
      if (cells.count(nodes.back())) throw ValidationError("duplicate node column " + nodes.back());
      cells[nodes.back()];
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const long long t = parse_int(rows[r][0], line_ref(r));
      if (!times.insert(t).second) throw ValidationError("duplicate time " + std::to_string(t));
      for (std::size_t k = 1; k < rows[r].size(); ++k) {
        const std::string v = trim(rows[r][k]);
        cells[nodes[k - 1]][t] = {v.empty() ? 0.0 : parse_double(v, line_ref(r)), v.empty()};
      }
    }
  }
  if (cells.empty() || times.empty()) throw ValidationError("panel has no data");
  return assemble(cells, times);
}

Panel read_panel_csv(const std::string& path, PanelSchema schema) {
  auto in = open_in(path);
  return parse_panel_csv(in, schema);
}

void write_panel_csv(std::ostream& out, const Panel& panel, PanelSchema schema) {
  char buf[40];
  auto num = [&](int i, int j) -> std::string {
    if (panel.missing.size() > 0 && panel.missing(i, j)) return "";
    std::snprintf(buf, sizeof buf, "%.17g", panel.values(i, j));
    return buf;
  };
  if (schema == PanelSchema::Long) {
    out << "node,t,value\n";
    for (int i = 0; i < panel.d(); ++i)
      for (int j = 0; j < panel.T(); ++j)
        out << csv_escape(panel.nodes[i]) << ',' << panel.times[j] << ',' << num(i, j) << '\n';
    return;
  }
  out << 't';
  for (const auto& n : panel.nodes) out << ',' << csv_escape(n);
  out << '\n';
  for (int j = 0; j < panel.T(); ++j) {
    out << panel.times[j];
    for (int i = 0; i < panel.d(); ++i) out << ',' << num(i, j);
    out << '\n';
  }
}

Panel panel_from_realization(const Realization& real, std::vector<std::string> labels) {
  Panel p;
  if (labels.empty())
    for (int i = 0; i < real.d(); ++i) labels.push_back(std::to_string(i + 1));
  if (static_cast<int>(labels.size()) != real.d()) throw ValidationError("label count does not match nodes");
  // Keep label-sorted order so that the panel invariant holds.
  std::vector<int> order(real.d());
  for (int i = 0; i < real.d(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return labels[a] < labels[b]; });
  for (int i : order) p.nodes.push_back(labels[i]);
  for (int j = 0; j < real.T(); ++j) p.times.push_back(real.first_time + j);
  p.values = real.values(order, Eigen::all);
  if (real.missing.size() > 0) p.missing = real.missing(order, Eigen::all);
  return p;
}

Network parse_edges_csv(std::istream& in, const std::vector<std::string>& roster, int d) {
  const auto rows = parse_csv(in);
  require_header(rows, 2, "edge list");
  const auto lookup = roster_lookup(roster);
  const int n = roster.empty() ? d : static_cast<int>(roster.size());
  if (n <= 0) throw ValidationError("edge list needs a roster or a node count");
  std::vector<std::pair<int, int>> edges;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int a = resolve_node(rows[r][0], roster, lookup, n, line_ref(r));
    const int b = resolve_node(rows[r][1], roster, lookup, n, line_ref(r));
    edges.push_back({a + 1, b + 1});
  }
  return build_network(edges, n, roster);
}

Network read_edges_csv(const std::string& path, const std::vector<std::string>& roster, int d) {
  auto in = open_in(path);
  return parse_edges_csv(in, roster, d);
}

CommunityPartition parse_communities_csv(std::istream& in, const std::vector<std::string>& roster) {
  const auto rows = parse_csv(in);
  require_header(rows, 2, "community file");
  const auto lookup = roster_lookup(roster);
  std::vector<int> labels(roster.size(), 0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int i = resolve_node(rows[r][0], roster, lookup, static_cast<int>(roster.size()), line_ref(r));
    if (labels[i] != 0) throw ValidationError("node listed twice in community file at " + line_ref(r));
    const long long c = parse_int(rows[r][1], line_ref(r));
    if (c < 1) throw ValidationError("community ids start at 1 (" + line_ref(r) + ")");
    labels[i] = static_cast<int>(c);
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 0) throw ValidationError("node " + roster[i] + " has no community");
  return CommunityPartition(labels);
}

CommunityPartition read_communities_csv(const std::string& path, const std::vector<std::string>& roster) {
  auto in = open_in(path);
  return parse_communities_csv(in, roster);
}

std::vector<std::vector<bool>> parse_winners_csv(std::istream& in, const std::vector<std::string>& roster) {
  const auto rows = parse_csv(in);
  require_header(rows, 3, "winner file");
  const auto lookup = roster_lookup(roster);
  std::vector<std::map<long long, bool>> by_node(roster.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int i = resolve_node(rows[r][0], roster, lookup, static_cast<int>(roster.size()), line_ref(r));
    const long long year = parse_int(rows[r][1], line_ref(r));
    const std::string w = trim(rows[r][2]);
    if (w != "R" && w != "D") throw ValidationError("winner must be R or D at " + line_ref(r));
    if (!by_node[i].emplace(year, w == "R").second)
      throw ValidationError("duplicate winner record at " + line_ref(r));
  }
  std::vector<std::vector<bool>> wins;
  for (const auto& m : by_node) {
    std::vector<bool> v;
    for (const auto& [_, rep] : m) v.push_back(rep);
    wins.push_back(std::move(v));
  }
  return wins;
}

std::vector<std::vector<bool>> read_winners_csv(const std::string& path, const std::vector<std::string>& roster) {
  auto in = open_in(path);
  return parse_winners_csv(in, roster);
}

CommunityPartition classify_parties(const std::vector<std::vector<bool>>& republican_wins, double threshold) {
  if (republican_wins.empty()) throw ValidationError("no win records");
  const std::size_t n = republican_wins.front().size();
  std::vector<int> labels;
  for (const auto& rec : republican_wins) {
    if (rec.empty()) throw ValidationError("empty win record");
    if (rec.size() != n) throw ValidationError("win records have unequal lengths");
    const auto r = std::count(rec.begin(), rec.end(), true);
    const double rep = static_cast<double>(r) / rec.size();
    const double dem = static_cast<double>(rec.size() - r) / rec.size();
    labels.push_back(rep >= threshold ? kRed : dem >= threshold ? kBlue : kSwing);
  }
  return CommunityPartition(labels, 3);
}

std::string read_text_file(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
}

namespace {

std::string title_case(const std::string& raw) {
  std::string out;
  std::istringstream words(trim(raw));
  std::string w;
  while (words >> w) {
    for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (!(w == "of" && !out.empty())) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    out += (out.empty() ? "" : " ") + w;
  }
  return out;
}

}  // namespace

RawElection parse_mit_president(std::istream& in) {
  const auto rows = parse_csv(in);
  if (rows.empty()) throw ValidationError("raw returns: empty file");
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < rows[0].size(); ++k) col[trim(rows[0][k])] = k;
  for (const char* need : {"year", "state", "candidatevotes", "totalvotes", "party_simplified"})
    if (!col.count(need)) throw ValidationError(std::string("raw returns: missing column ") + need);

  struct Tally {
    double rep = 0.0, dem = 0.0, total = 0.0;
  };
  std::map<std::string, std::map<long long, Tally>> tally;
  std::set<long long> years;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != rows[0].size()) throw ValidationError("raw returns: ragged row at " + line_ref(r));
    const long long year = parse_int(row[col["year"]], line_ref(r));
    Tally& t = tally[title_case(row[col["state"]])][year];
    const double votes = parse_double(row[col["candidatevotes"]], line_ref(r));
    const double total = parse_double(row[col["totalvotes"]], line_ref(r));
    if (t.total != 0.0 && t.total != total)
      throw ValidationError("raw returns: inconsistent total votes at " + line_ref(r));
    t.total = total;
    const std::string party = trim(row[col["party_simplified"]]);
    if (party == "REPUBLICAN") t.rep += votes;
    if (party == "DEMOCRAT") t.dem += votes;
    years.insert(year);
  }
  std::map<std::string, std::map<long long, Cell>> cells;
  for (const auto& [state, by_year] : tally)
    for (const auto& [year, t] : by_year) {
      if (!(t.total > 0.0)) throw ValidationError("raw returns: zero total votes for " + state);
      cells[state][year] = {100.0 * t.rep / t.total, false};
    }
  RawElection out;
  out.share = assemble(cells, years);
  out.republican_won = BoolMatrix::Constant(out.share.d(), out.share.T(), false);
  for (int i = 0; i < out.share.d(); ++i)
    for (int j = 0; j < out.share.T(); ++j) {
      auto it = tally[out.share.nodes[i]].find(out.share.times[j]);
      if (it != tally[out.share.nodes[i]].end()) out.republican_won(i, j) = it->second.rep > it->second.dem;
    }
  return out;
}

RawElection read_mit_president(const std::string& path) {
  auto in = open_in(path);
  return parse_mit_president(in);
}

void write_winners_csv(std::ostream& out, const RawElection& raw) {
  out << "state,year,winner\n";
  for (int i = 0; i < raw.share.d(); ++i)
    for (int j = 0; j < raw.share.T(); ++j) {
      if (raw.share.missing.size() > 0 && raw.share.missing(i, j)) continue;
      out << csv_escape(raw.share.nodes[i]) << ',' << raw.share.times[j] << ','
          << (raw.republican_won(i, j) ? 'R' : 'D') << '\n';
    }
}

}  // namespace gnar
