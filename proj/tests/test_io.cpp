#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "replboost/domain_io.hpp"
#include "replboost/experiment.hpp"
#include "replboost/random_tape.hpp"

namespace fs = std::filesystem;
using namespace replboost;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("replboost_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

int cli(const std::string& args) {
  const std::string cmd = std::string(REPLBOOST_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig small_experiment(const TempDir& dir) {
  MarginDomainSpec spec;
  spec.size = 16;
  spec.seed = 3;
  save_problem(generate_margin_domain(spec), dir / "domain.json");
  ExperimentConfig cfg;
  cfg.algorithm = "rboost-star";
  cfg.boost.eps = 1.0 / 16.0;
  cfg.boost.gamma = 0.1;
  cfg.boost.mode = Mode::kSampled;
  cfg.boost.sample_cap = 2000;
  cfg.trials = 4;
  cfg.seed = 12;
  cfg.domain_path = dir / "domain.json";
  return cfg;
}

}  // namespace

TEST_CASE("domain JSON round trip") {
  TempDir dir;
  const Problem p = generate_margin_domain({});
  save_problem(p, dir / "d.json");
  const Problem q = load_problem(dir / "d.json");
  REQUIRE(q.size() == p.size());
  CHECK(q.domain->dimension() == p.domain->dimension());
  for (PointId x = 0; x < p.size(); ++x) {
    CHECK(q.target(x) == p.target(x));
    CHECK(q.dist(x) == p.dist(x));
    for (std::size_t f = 0; f < p.domain->dimension(); ++f) {
      CHECK(q.domain->features(x)[f] == p.domain->features(x)[f]);
    }
  }
  CHECK(problem_to_json(q) == problem_to_json(p));
}

TEST_CASE("malformed domains are configuration errors") {
  TempDir dir;
  auto kind_of = [&](const std::string& path) {
    try {
      load_problem(path);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kPreconditionUnmet;
  };
  CHECK(kind_of(dir / "missing.json") == ErrorKind::kConfiguration);
  write(dir / "bad.json", "{not json");
  CHECK(kind_of(dir / "bad.json") == ErrorKind::kConfiguration);
  write(dir / "labels.json", R"({"points": [[0], [1]], "probs": [0.5, 0.5], "labels": [1, 0]})");
  CHECK_THROWS_AS(load_problem(dir / "labels.json"), Error);
  write(dir / "sum.json", R"({"points": [[0], [1]], "probs": [0.5, 0.6], "labels": [1, -1]})");
  CHECK_THROWS_AS(load_problem(dir / "sum.json"), Error);
}

TEST_CASE("dataset CSV") {
  TempDir dir;
  write(dir / "data.csv", "x,y,label\n0.1,0.2,1\n0.3,0.4,-1\n0.1,0.2,1\n0.5,0.5,1\n");
  const Problem p = load_dataset_csv(dir / "data.csv");
  REQUIRE(p.size() == 3);
  CHECK(p.dist(0) == doctest::Approx(0.5));
  CHECK(p.dist(1) == doctest::Approx(0.25));
  CHECK(p.target(1) == -1);

  write(dir / "conflict.csv", "0.1,1\n0.1,-1\n");
  CHECK_THROWS_AS(load_dataset_csv(dir / "conflict.csv"), Error);
  write(dir / "label.csv", "0.1,2\n");
  CHECK_THROWS_AS(load_dataset_csv(dir / "label.csv"), Error);
}

TEST_CASE("margin domains admit a weak stump under any reweighting") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MarginDomainSpec spec;
    spec.seed = seed;
    const Problem p = generate_margin_domain(spec);
    CHECK(p.size() == spec.size);
    for (PointId x = 0; x < p.size(); ++x) {
      for (double v : p.domain->features(x)) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
    const StumpTable table(p, StumpGrid(*p.domain));
    Rng rng = RandomTape(seed).stream();
    for (int k = 0; k < 50; ++k) {
      std::vector<double> w(p.size());
      // Heavy-tailed weights stress the guarantee.
      for (double& x : w) x = std::pow(rng.uniform(), 6.0);
      const auto errs = table.errors(FiniteDistribution::from_weights(w).probs(), 1.0);
      CHECK(*std::min_element(errs.begin(), errs.end()) <= 0.5 - spec.margin + 1e-12);
    }
  }
  CHECK(problem_to_json(generate_margin_domain({})) == problem_to_json(generate_margin_domain({})));
}

TEST_CASE("config JSON") {
  ExperimentConfig cfg;
  apply_config_json(cfg, nlohmann::json{{"eps", 0.2}, {"trials", 7}, {"mode", "exact"}});
  CHECK(cfg.boost.eps == 0.2);
  CHECK(cfg.trials == 7);
  CHECK(cfg.boost.mode == Mode::kExact);
  CHECK_THROWS_AS(apply_config_json(cfg, nlohmann::json{{"epsilon", 0.2}}), Error);
  CHECK_THROWS_AS(apply_config_json(cfg, nlohmann::json{{"eps", "x"}}), Error);

  ExperimentConfig round;
  apply_config_json(round, to_json(cfg));
  CHECK(to_json(round) == to_json(cfg));
}

TEST_CASE("experiments are reproducible across job counts") {
  TempDir dir;
  ExperimentConfig cfg = small_experiment(dir);
  std::ostringstream log;
  cfg.output_dir = dir / "a";
  REQUIRE(run_experiment(cfg, log) == 0);
  cfg.output_dir = dir / "b";
  cfg.jobs = 3;
  REQUIRE(run_experiment(cfg, log) == 0);
  const std::string a = slurp(dir / "a/summary.csv");
  CHECK(a == slurp(dir / "b/summary.csv"));
  CHECK(a.rfind(summary_header(), 0) == 0);
  CHECK(fs::exists(dir / "a/trial_0003.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "a/manifest.json"));
  CHECK(manifest["status"] == "complete");
  CHECK(manifest["root_seed"] == 12);
}

TEST_CASE("a missing domain writes nothing") {
  TempDir dir;
  ExperimentConfig cfg = small_experiment(dir);
  cfg.domain_path = dir / "nope.json";
  cfg.output_dir = dir / "out";
  std::ostringstream log;
  CHECK(run_experiment(cfg, log) == 2);
  CHECK(!fs::exists(dir / "out"));
}

TEST_CASE("command line") {
  TempDir dir;
  CHECK(cli("gen-domain --size 16 --seed 4 --out " + (dir / "d.json")) == 0);
  CHECK(load_problem(dir / "d.json").size() == 16);

  CHECK(cli("rboost-star --domain " + (dir / "missing.json") + " --out " + (dir / "o1")) == 2);
  CHECK(!fs::exists(dir / "o1"));
  CHECK(cli("rboost-star --no-such-flag") == 2);
  CHECK(cli("") == 2);
  CHECK(cli("rboost-star --mode fuzzy") == 2);

  // Flags override the config file.
  write(dir / "cfg.json", R"({"trials": 5, "eps": 0.0625, "gamma": 0.1, "sample_cap": 2000,
                              "seed": 8, "domain": ")" + (dir / "d.json") + "\"}");
  CHECK(cli("rboost-star --config " + (dir / "cfg.json") + " --trials 2 --out " + (dir / "o2")) == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "o2/manifest.json"));
  CHECK(manifest["config"]["trials"] == 2);
  CHECK(manifest["config"]["seed"] == 8);
  CHECK(fs::exists(dir / "o2/trial_0001.json"));
  CHECK(!fs::exists(dir / "o2/trial_0002.json"));

  CHECK(cli("threshold-test --z 0.1 --trials 3 --budget-scale 0.01 --out " + (dir / "t.csv")) == 0);
  const std::string csv = slurp(dir / "t.csv");
  CHECK(csv.rfind("trial,b,phi_bar,z0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
