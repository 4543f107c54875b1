#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "ail/algorithms.hpp"
#include "ail/cli.hpp"
#include "ail/config.hpp"
#include "ail/format.hpp"
#include "ail/harness.hpp"

using namespace ail;
namespace fs = std::filesystem;

namespace {

std::string config_path(const std::string& name) { return std::string(AIL_CONFIG_DIR) + "/" + name + ".ini"; }

RunConfig load(const std::string& name) { return parse_config(read_file(config_path(name))); }

fs::path scratch(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("ail-test-" + tag + "-" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Cli {
  int code;
  std::string out, err;
};

Cli cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  int code = cli_main(args, o, e);
  return {code, o.str(), e.str()};
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  auto text = read_file(path);
  for (auto line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    std::vector<std::string> row;
    for (auto cell : split(line, ',')) row.emplace_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* kAllConfigs[] = {"lemma1_worst_case", "corollary1_growth", "delayed_gd_quadratic", "piag_theorem1",
                             "piag_theorem2",     "sgd_noiseless",     "sgd_stochastic",       "sgd_convex",
                             "arock_affine",      "block_partial",     "block_linear",         "lemma1_tau_sweep"};

}  // namespace

TEST_CASE("minimal rate config parses") {
  auto c = parse_config("[experiment]\nkind = rate\n\n[rate]\nlemma = 1\nq = 0.5\np = 0.3\ntau = 3\n");
  CHECK(c.kind() == ExperimentKind::rate);
  CHECK(c.real("rate", "q", 0) == 0.5);
  CHECK(c.count("rate", "tau", 0) == 3);
}

TEST_CASE("config round trip on the shipped configs") {
  for (const char* name : kAllConfigs) {
    INFO(name);
    auto c = load(name);
    CHECK(parse_config(render_config(c)) == c);
    CHECK(render_config(parse_config(render_config(c))) == render_config(c));
  }
}

TEST_CASE("config round trip on random valid configs") {
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    RunConfig c;
    c.set("experiment", "kind", "rate");
    c.set("experiment", "seed", std::to_string(g()));
    c.set("experiment", "K", std::to_string(1 + g() % 100000));
    const int lemma = static_cast<int>(g() % 3);
    if (lemma == 0) {
      double s = u(g) * 0.999, q = s * u(g);
      c.set("rate", "lemma", "1");
      c.set("rate", "q", fmt_real(q));
      c.set("rate", "p", fmt_real(s - q));
      c.set("rate", "tau", std::to_string(g() % 50));
    } else if (lemma == 1) {
      c.set("rate", "lemma", "corollary1");
      c.set("rate", "q", "0");
      c.set("rate", "p", fmt_real(u(g) * 0.99));
      c.set("rate", "alpha", fmt_real(0.01 + 0.9 * u(g)));
      c.set("rate", "beta", fmt_real(10 * u(g)));
    } else {
      c.set("rate", "lemma", "lemma4");
      c.set("rate", "flavor", "contractive");
      c.set("rate", "q", fmt_real(0.9 + 0.09 * u(g)));
      c.set("rate", "p", fmt_real(0.01 * u(g)));
      c.set("rate", "r", fmt_real(1 + u(g)));
      c.set("rate", "e", fmt_real(u(g) * 1e-3));
      c.set("rate", "tau", std::to_string(g() % 5));
    }
    if (g() % 2) {
      c.set("tolerance", "rel", fmt_real(std::pow(10.0, -15 * u(g))));
      c.set("tolerance", "abs", fmt_real(std::pow(10.0, -15 * u(g))));
    }
    validate_config(c);
    CHECK(parse_config(render_config(c)) == c);
  }
}

TEST_CASE("config errors are collected") {
  const char* text =
      "[experiment]\nkind = run\nK = 0\n\n[problem]\nfamily = least-squares\nn = 10\nd = 3\n\n"
      "[algorithm]\nname = newton\ngamma = -1\nbogus = 3\n";
  try {
    parse_config(text);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.code() == Errc::semantic_error);
    std::string all;
    for (const auto& p : e.problems()) all += p + "\n";
    INFO(all);
    CHECK(e.problems().size() >= 4);
    CHECK(all.find("experiment.K") != std::string::npos);
    CHECK(all.find("algorithm.name") != std::string::npos);
    CHECK(all.find("algorithm.gamma") != std::string::npos);
    CHECK(all.find("algorithm.bogus") != std::string::npos);
  }
}

TEST_CASE("unknown algorithm and negative step are semantic errors") {
  auto base = std::string("[experiment]\nkind = run\nK = 10\n\n[problem]\nfamily = least-squares\nn = 10\nd = 3\n\n[delay]\nmodel = cyclic\n\n");
  try {
    parse_config(base + "[algorithm]\nname = adam\ngamma = 0.1\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.code() == Errc::semantic_error);
  }
  try {
    parse_config(base + "[algorithm]\nname = piag\ngamma = -1\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.code() == Errc::semantic_error);
    REQUIRE(e.problems().size() == 1);
    CHECK(e.problems()[0].find("algorithm.gamma") != std::string::npos);
  }
  try {
    parse_config("kind = run\n[experiment\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.code() == Errc::parse_error);
  }
}

TEST_CASE("command line exit codes") {
  auto rate = cli({"rate", "--lemma", "1", "--q", "0.5", "--p", "0.3", "--tau", "3"});
  CHECK(rate.code == exit_pass);
  CHECK(rate.out.find("rho = " + fmt_real(std::pow(0.8, 0.25))) != std::string::npos);
  CHECK(rate.out.find("PASS") != std::string::npos);

  CHECK(cli({}).code == exit_usage);
  CHECK(cli({"frobnicate"}).code == exit_usage);
  CHECK(cli({"run"}).code == exit_usage);
  CHECK(cli({"run", "--config", "/nonexistent/ail.ini"}).code == exit_usage);
  CHECK(cli({"run", "--config", config_path("lemma1_worst_case")}).code == exit_usage);
  CHECK(cli({"rate", "--lemma", "1", "--q", "0.7", "--p", "0.3", "--tau", "2"}).code == exit_fail);
  CHECK(cli({"rate", "--lemma", "7", "--q", "0.5", "--p", "0.3"}).code == exit_usage);

  auto dir = scratch("cli");
  auto ok = cli({"rate", "--config", config_path("lemma1_worst_case"), "--out", dir.string()});
  CHECK(ok.code == exit_pass);
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "report.kv"));

  // a verify run on a corrupted trace: the recursion breaks at the corrupted index
  auto t = worst_case_trace(0.5, 0.3, 3, 1.0, 50);
  t.V[20] *= 2.0;
  write_file((dir / "bad.csv").string(), trace_to_csv(t));
  write_file((dir / "verify.ini").string(), "[experiment]\nkind = verify\n\n[verify]\ntrace = " + (dir / "bad.csv").string() +
                                                "\nform = eq3\nq = 0.5\np = 0.3\n");
  auto fail = cli({"verify", "--config", (dir / "verify.ini").string(), "--out", (dir / "v").string()});
  CHECK(fail.code == exit_fail);
  CHECK(fail.out.find("FAIL k=20") != std::string::npos);

  write_file((dir / "junk.csv").string(), "not a trace\n");
  write_file((dir / "junk.ini").string(), "[experiment]\nkind = verify\n\n[verify]\ntrace = " + (dir / "junk.csv").string() +
                                              "\nform = eq3\nq = 0.5\np = 0.3\n");
  CHECK(cli({"verify", "--config", (dir / "junk.ini").string(), "--out", (dir / "j").string()}).code == exit_internal);
  fs::remove_all(dir);
}

TEST_CASE("verify recognizes a stored worst-case trace as tight") {
  auto dir = scratch("verify");
  write_file((dir / "wc.csv").string(), trace_to_csv(worst_case_trace(0.4, 0.5, 6, 2.0, 400)));
  auto c = parse_config("[experiment]\nkind = verify\n\n[verify]\ntrace = " + (dir / "wc.csv").string() + "\nform = eq3\nq = 0.4\np = 0.5\n");
  auto out = run_single(c);
  CHECK(out.pass());
  CHECK(out.verdict_line() == "PASS");
  CHECK(out.report.get("verify.equality") == std::optional<std::string>("true"));
  fs::remove_all(dir);
}

TEST_CASE("runs are byte-for-byte reproducible") {
  for (const char* name : {"piag_theorem1", "sgd_noiseless", "block_partial", "lemma1_worst_case"}) {
    INFO(name);
    auto c = load(name);
    auto a = scratch("det-a"), b = scratch("det-b");
    execute(c, a.string());
    execute(c, b.string());
    for (const char* f : {"trace.csv", "bound.csv", "monitored.csv", "report.kv"}) {
      REQUIRE(fs::exists(a / f));
      CHECK(read_file((a / f).string()) == read_file((b / f).string()));
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("delay sweep reports a non-decreasing rate") {
  auto dir = scratch("sweep");
  auto rep = execute(load("lemma1_tau_sweep"), dir.string());
  CHECK(rep.pass());
  auto rows = read_csv((dir / "sweep.csv").string());
  REQUIRE(rows.size() == 6);
  REQUIRE(rows[0].size() == 5);
  CHECK(rows[0][4] == "rho");
  double prev = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double tau = *parse_real(rows[i][1]);
    double rho = *parse_real(rows[i][4]);
    CHECK(rho == doctest::Approx(std::pow(0.8, 1.0 / (1.0 + tau))).epsilon(1e-15));
    CHECK(rho >= prev);
    CHECK(rows[i][2] == "PASS");
    prev = rho;
  }
  fs::remove_all(dir);
}

TEST_CASE("PIAG bound file matches the closed form") {
  auto c = load("piag_theorem1");
  c.set("experiment", "K", "400");
  auto dir = scratch("piag");
  execute(c, dir.string());
  // rebuild the instance independently from the seed plan
  auto F = make_least_squares(20, 10, SeedPlan::from_root(4).problem);
  Vec x0 = Vec::Zero(10);
  const double gamma = 1.0 / (F.L() * 39.0);
  const double gap0 = F.value(x0) - F.F_star(), d0 = (x0 - F.x_star()).squaredNorm();
  auto rows = read_csv((dir / "bound.csv").string());
  REQUIRE(rows.size() == 402);
  CHECK(rows[0] == std::vector<std::string>{"k", "bound"});
  for (std::size_t k = 0; k <= 400; ++k) {
    double want = (d0 / (2 * gamma) + 19.0 * gap0) / double(k + 19);
    CHECK(*parse_real(rows[k + 1][1]) == doctest::Approx(want).epsilon(1e-12));
  }
  fs::remove_all(dir);
}

TEST_CASE("default output directory") {
  auto c = load("lemma1_worst_case");
  c.set("experiment", "output", "somewhere");
  CHECK(default_output_dir(c) == "somewhere");
}
