#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace gnar;

TEST_CASE("CSV parsing handles quotes") {
  std::istringstream in("a,b\n\"x, y\",\"he said \"\"hi\"\"\"\n");
  const auto rows = parse_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "x, y");
  CHECK(rows[1][1] == "he said \"hi\"");
  CHECK(csv_escape("x, y") == "\"x, y\"");
  CHECK(csv_escape("plain") == "plain");
}

TEST_CASE("wide and long panels") {
  std::istringstream wide("t,a,b\n1,1.5,2\n2,3,4\n");
  const Panel p = parse_panel_csv(wide, PanelSchema::Wide);
  CHECK(p.d() == 2);
  CHECK(p.T() == 2);
  CHECK(p.values(1, 1) == 4.0);

  std::istringstream lng("node,t,value\nb,1,2\na,1,1\na,2,\nb,2,5\n");
  const Panel q = parse_panel_csv(lng, PanelSchema::Long);
  CHECK(q.nodes == std::vector<std::string>{"a", "b"});
  CHECK(q.missing(0, 1));
  CHECK_FALSE(q.missing(1, 1));
  CHECK(q.realization().has_missing());
}

TEST_CASE("panel round-trip") {
  const NetworkContext ctx = five_net_context();
  NoiseSpec noise;
  const Realization real = simulate(two_community_order(), two_community_theta(), ctx, 30, -1, noise);
  const Panel panel = panel_from_realization(real);
  for (auto schema : {PanelSchema::Long, PanelSchema::Wide}) {
    std::stringstream ss;
    write_panel_csv(ss, panel, schema);
    const Panel back = parse_panel_csv(ss, schema);
    CHECK(back.values == panel.values);
    CHECK(back.times == panel.times);
  }
}

TEST_CASE("malformed panels") {
  std::istringstream dup("node,t,value\na,1,1\na,1,2\n");
  CHECK_THROWS_AS(parse_panel_csv(dup, PanelSchema::Long), ValidationError);
  std::istringstream bad("node,t,value\na,1,abc\n");
  CHECK_THROWS_AS(parse_panel_csv(bad, PanelSchema::Long), ValidationError);
}

TEST_CASE("edge and community files") {
  const std::vector<std::string> roster = {"a", "b", "c"};
  std::istringstream edges("from,to\na,b\nc,b\n");
  const Network net = parse_edges_csv(edges, roster);
  CHECK(net.edges.size() == 2);
  std::istringstream unknown("from,to\na,z\n");
  CHECK_THROWS_AS(parse_edges_csv(unknown, roster), ValidationError);
  std::istringstream comm("node,community\na,2\nb,1\nc,2\n");
  const CommunityPartition part = parse_communities_csv(comm, roster);
  CHECK(part.C() == 2);
  CHECK(part.community_of(0) == 1);
}

TEST_CASE("party classification thresholds") {
  auto wins = [](int r, int n) {
    std::vector<bool> v(n, false);
    for (int k = 0; k < r; ++k) v[k] = true;
    return v;
  };
  const CommunityPartition part = classify_parties({wins(9, 12), wins(6, 12), wins(0, 12), wins(3, 12), wins(8, 12)});
  CHECK(part.labels() == std::vector<int>{kRed, kSwing, kBlue, kBlue, kSwing});
}

TEST_CASE("winners file") {
  std::istringstream in("state,year,winner\nb,2000,R\na,2000,D\na,2004,R\nb,2004,R\n");
  const auto w = parse_winners_csv(in, {"a", "b"});
  CHECK(w[0] == std::vector<bool>{false, true});
  CHECK(w[1] == std::vector<bool>{true, true});
}

TEST_CASE("raw returns conversion") {
  std::istringstream in(
      "year,state,state_po,candidate,candidatevotes,totalvotes,party_simplified\n"
      "2016,\"DISTRICT OF COLUMBIA\",DC,A,10,100,REPUBLICAN\n"
      "2016,\"DISTRICT OF COLUMBIA\",DC,B,85,100,DEMOCRAT\n"
      "2016,\"DISTRICT OF COLUMBIA\",DC,C,5,100,OTHER\n"
      "2016,OHIO,OH,A,55,100,REPUBLICAN\n"
      "2016,OHIO,OH,B,40,100,DEMOCRAT\n"
      "2020,OHIO,OH,A,53,100,REPUBLICAN\n"
      "2020,OHIO,OH,B,45,100,DEMOCRAT\n");
  const RawElection raw = parse_mit_president(in);
  CHECK(raw.share.nodes == std::vector<std::string>{"District of Columbia", "Ohio"});
  CHECK(raw.share.values(0, 0) == doctest::Approx(10.0));
  CHECK(raw.share.missing(0, 1));
  CHECK(raw.share.values(1, 1) == doctest::Approx(53.0));
  CHECK(raw.republican_won(1, 0));
  CHECK_FALSE(raw.republican_won(0, 0));
  std::ostringstream out;
  write_winners_csv(out, raw);
  CHECK(out.str() == "state,year,winner\nDistrict of Columbia,2016,D\nOhio,2016,R\nOhio,2020,R\n");
}

TEST_CASE("ingestion is keyed by label") {
  std::istringstream a("node,t,value\na,1,1\nb,1,2\na,2,3\nb,2,4\n");
  std::istringstream b("node,t,value\nb,2,4\na,2,3\nb,1,2\na,1,1\n");
  const Panel pa = parse_panel_csv(a, PanelSchema::Long), pb = parse_panel_csv(b, PanelSchema::Long);
  CHECK(pa.values == pb.values);
  CHECK(pa.nodes == pb.nodes);
}

TEST_CASE("classification is monotone in Republican wins") {
  for (int r = 0; r < 12; ++r) {
    std::vector<bool> before(12, false), after(12, false);
    for (int k = 0; k < r; ++k) before[k] = after[k] = true;
    after[r] = true;
    const int lb = classify_parties({before}).labels()[0], la = classify_parties({after}).labels()[0];
    // order along the Blue -> Swing -> Red axis
    auto rank = [](int label) { return label == kBlue ? 0 : label == kSwing ? 1 : 2; };
    CHECK(rank(la) >= rank(lb));
  }
}
