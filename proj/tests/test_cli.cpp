#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace gnar;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / ("gnar_cli_test_" + std::to_string(::getpid()) + ".log");
  const std::string cmd = std::string(GNAR_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text_file(log.string())};
  fs::remove(log);
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gnar_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& s) { write_text_file(p.string(), s); }

// Five-node network files and the two-community model.
fs::path five_node_fixture() {
  const fs::path dir = scratch("fixture");
  write(dir / "edges.csv", "from,to\nn1,n4\nn1,n5\nn2,n3\nn2,n4\nn3,n4\n");
  write(dir / "communities.csv", "node,community\nn1,2\nn2,1\nn3,1\nn4,1\nn5,2\n");
  const ParameterVector theta = two_community_theta();
  write(dir / "model.json", model_to_json(two_community_order(), &theta).dump(2));
  write(dir / "order.json", model_to_json(two_community_order()).dump(2));
  return dir;
}

}  // namespace

TEST_CASE("usage and exit codes") {
  CHECK(run("").code == 2);
  const Run bad = run("fit --no-such-flag");
  CHECK(bad.code == 2);
  CHECK(bad.out.find("Usage") != std::string::npos);
  CHECK(run("--help").code == 0);
  CHECK(run("simulate --model /no/such/file.json --edges x --communities y").code == 2);
}

TEST_CASE("simulate then fit recovers the parameters") {
  const fs::path fx = five_node_fixture();
  const fs::path out = scratch("roundtrip");
  const std::string net = " --edges " + (fx / "edges.csv").string() + " --communities " + (fx / "communities.csv").string();
  REQUIRE(run("simulate --model " + (fx / "model.json").string() + net + " --T 3000 --seed 9 --out-dir " + out.string()).code == 0);
  REQUIRE(fs::exists(out / "realization_long.csv"));
  REQUIRE(fs::exists(out / "realization_wide.csv"));
  const json side = json::parse(read_text_file((out / "realization.json").string()));
  CHECK(side.at("seed") == 9);

  REQUIRE(run("fit --model " + (fx / "order.json").string() + " --panel " + (out / "realization_long.csv").string() + net +
              " --out-dir " + out.string() + " --format json").code == 0);
  const json fit = json::parse(read_text_file((out / "fit.json").string()));
  const ParameterVector truth = two_community_theta();
  int j = 0;
  for (const auto& c : fit.at("coefficients")) CHECK(std::abs(c.at("estimate").get<double>() - truth(j++)) < 0.1);

  REQUIRE(run("forecast --fit " + (out / "fit.json").string() + " --panel " + (out / "realization_long.csv").string() + net +
              " --holdout --out-dir " + out.string()).code == 0);
  CHECK(fs::exists(out / "forecast.csv"));
  CHECK(fs::exists(out / "forecast_score.json"));

  REQUIRE(run("bound --model " + (fx / "model.json").string() + " --panel " + (out / "realization_long.csv").string() +
              net + " --out-dir " + out.string()).code == 0);
  const json bound = json::parse(read_text_file((out / "bound.json").string()));
  CHECK(bound.at("error").get<double>() <= bound.at("deterministic_bound").get<double>());

  REQUIRE(run("stationarity --model " + (fx / "model.json").string() + net + " --out-dir " + out.string()).code == 0);
  const Run c1 = run("corbit --panel " + (out / "realization_long.csv").string() + net + " --out-dir " + out.string());
  REQUIRE(c1.code == 0);
  const std::string svg1 = read_text_file((out / "pnacf.svg").string());
  REQUIRE(run("corbit --panel " + (out / "realization_long.csv").string() + net + " --out-dir " + out.string()).code == 0);
  CHECK(read_text_file((out / "pnacf.svg").string()) == svg1);
  fs::remove_all(out);
  fs::remove_all(fx);
}

TEST_CASE("election bundle is deterministic") {
  const fs::path a = scratch("election_a"), b = scratch("election_b");
  const Run ra = run("election --out-dir " + a.string());
  REQUIRE(ra.code == 0);
  CHECK(ra.out.find("beta_1,1,3") != std::string::npos);
  REQUIRE(run("election --out-dir " + b.string()).code == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    CHECK(read_text_file(e.path().string()) == read_text_file((b / e.path().filename()).string()));
  }
  CHECK(files >= 10);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("validation errors exit with code 2") {
  const fs::path fx = five_node_fixture();
  write(fx / "bad_edges.csv", "from,to\nn1,n1\n");
  const Run r = run("simulate --model " + (fx / "model.json").string() + " --edges " + (fx / "bad_edges.csv").string() +
                    " --communities " + (fx / "communities.csv").string() + " --out-dir " + fx.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("self-loop") != std::string::npos);
  fs::remove_all(fx);
}
