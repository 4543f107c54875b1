#include "ail/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "ail/config.hpp"
#include "ail/error.hpp"
#include "ail/format.hpp"
#include "ail/harness.hpp"

namespace ail {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  // rate shortcuts
  std::string lemma;
  std::optional<double> q, p, alpha, beta, V0;
  std::optional<std::uint64_t> tau, K;
};

void add_common(CLI::App* sub, Options& o, bool config_required) {
  auto* c = sub->add_option("--config", o.config, "experiment config file");
  if (config_required) c->required();
  sub->add_option("--out", o.out, "output directory (default: experiment.output, $ASYNC_ITER_LAB_OUT, ./out)");
  sub->add_option("--seed", o.seed, "root seed override");
}

RunConfig rate_from_flags(const Options& o) {
  RunConfig c;
  c.set("experiment", "kind", "rate");
  c.set("rate", "lemma", o.lemma);
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) c.set("rate", key, fmt_real(*v));
  };
  put("q", o.q);
  put("p", o.p);
  put("alpha", o.alpha);
  put("beta", o.beta);
  put("V0", o.V0);
  if (o.tau) c.set("rate", "tau", std::to_string(*o.tau));
  if (o.K) c.set("experiment", "K", std::to_string(*o.K));
  validate_config(c);
  return c;
}

void print_problems(std::ostream& err, const ConfigError& e) {
  err << "config error (" << errc_name(e.code()) << "):\n";
  for (const auto& p : e.problems()) err << "  " << p << '\n';
}

int run_command(const std::string& cmd, const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig c;
  const bool shortcut = cmd == "rate" && o.config.empty();
  try {
    if (shortcut) {
      if (o.lemma.empty()) {
        err << "rate: give --config or --lemma\n";
        return exit_usage;
      }
      c = rate_from_flags(o);
    } else {
      std::string text;
      try {
        text = read_file(o.config);
      } catch (const Error&) {
        err << cmd << ": cannot read config '" << o.config << "'\n";
        return exit_usage;
      }
      c = parse_config(text);
      if (experiment_kind_name(c.kind()) != cmd) {
        err << cmd << ": config is a '" << experiment_kind_name(c.kind()) << "' experiment\n";
        return exit_usage;
      }
    }
    if (o.seed) c.set("experiment", "seed", std::to_string(*o.seed));
  } catch (const ConfigError& e) {
    print_problems(err, e);
    return exit_usage;
  }

  try {
    Report rep;
    if (shortcut && o.out.empty() && !std::getenv("ASYNC_ITER_LAB_OUT")) {
      rep.runs.push_back(run_single(c));
      rep.kv = rep.runs.back().report;
    } else {
      const std::string dir = o.out.empty() ? default_output_dir(c) : o.out;
      rep = execute(c, dir);
    }
    if (c.kind() == ExperimentKind::rate)
      for (const char* key : {"cert.rho", "cert.eta", "cert.v_bound", "cert.x_sum_bound"})
        if (auto v = rep.kv.get(key)) out << std::string(key).substr(5) << " = " << *v << '\n';
    for (const auto& r : rep.runs) out << (rep.runs.size() > 1 ? r.id + " " : "") << r.verdict_line() << '\n';
    if (rep.runs.size() > 1) out << (rep.pass() ? "PASS" : "FAIL") << '\n';
    return rep.pass() ? exit_pass : exit_fail;
  } catch (const ConfigError& e) {
    print_problems(err, e);
    return exit_usage;
  } catch (const Error& e) {
    err << "error (" << errc_name(e.code()) << "): " << e.what() << '\n';
    return exit_internal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delayed-recursion rate certificates and asynchronous method simulator", "ail"};
  app.require_subcommand(1, 1);
  Options o;
  auto* rate = app.add_subcommand("rate", "rate certificate for a delayed recursion");
  add_common(rate, o, false);
  rate->add_option("--lemma", o.lemma, "1, corollary1 or lemma4");
  rate->add_option("--q", o.q);
  rate->add_option("--p", o.p);
  rate->add_option("--tau", o.tau);
  rate->add_option("--alpha", o.alpha);
  rate->add_option("--beta", o.beta);
  rate->add_option("--V0", o.V0);
  rate->add_option("--K", o.K, "also build the worst-case trace up to K");
  add_common(app.add_subcommand("run", "run an algorithm and check its bound"), o, true);
  add_common(app.add_subcommand("verify", "check a stored trace against a recursion"), o, true);
  add_common(app.add_subcommand("sweep", "run a config over a list of parameter values"), o, true);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_pass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << "run with --help for usage\n";
    return exit_usage;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  return run_command(cmd, o, out, err);
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace ail
