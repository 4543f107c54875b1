#include "ail/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ail/format.hpp"

namespace ail {

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::run: return "run";
    case ExperimentKind::verify: return "verify";
    case ExperimentKind::sweep: return "sweep";
  }
  return "?";
}

namespace {

std::string join_problems(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& p : v) s += (s.empty() ? "" : "; ") + p;
  return s;
}

}  // namespace

ConfigError::ConfigError(Errc code, std::vector<std::string> problems)
    : Error(code, join_problems(problems)), problems_(std::move(problems)) {}

namespace {

enum class FType { text, count, real, flag, reals, choice };

struct Range {
  double lo = -HUGE_VAL, hi = HUGE_VAL;
  bool lo_open = false, hi_open = false;
};

struct FieldSpec {
  std::string section, key;
  FType type;
  std::vector<std::string> choices;
  Range range;
};

Range at_least(double v) { return {v, HUGE_VAL, false, false}; }
Range above(double v) { return {v, HUGE_VAL, true, false}; }
Range open_unit() { return {0.0, 1.0, true, true}; }
Range half_open_unit() { return {0.0, 1.0, false, true}; }

const std::vector<FieldSpec>& schema() {
  static const std::vector<FieldSpec> s = [] {
    std::vector<FieldSpec> f;
    auto add = [&](const char* sec, const char* key, FType t, Range r = {}) { f.push_back({sec, key, t, {}, r}); };
    auto choice = [&](const char* sec, const char* key, std::vector<std::string> c) {
      f.push_back({sec, key, FType::choice, std::move(c), {}});
    };
    choice("experiment", "kind", {"rate", "run", "verify", "sweep"});
    add("experiment", "seed", FType::count);
    add("experiment", "K", FType::count, at_least(1));
    add("experiment", "seeds", FType::count, at_least(1));
    add("experiment", "output", FType::text);

    choice("problem", "family", {"least-squares", "logistic", "quadratic", "affine-euclidean", "affine-block-max"});
    add("problem", "n", FType::count, at_least(1));
    add("problem", "d", FType::count, at_least(1));
    add("problem", "rank", FType::count);
    add("problem", "mu", FType::real, above(0));
    add("problem", "L", FType::real, above(0));
    add("problem", "c", FType::real, open_unit());
    add("problem", "blocks", FType::count, at_least(1));
    choice("problem", "regularizer", {"none", "l1", "sq-l2", "box", "elastic"});
    add("problem", "lambda", FType::real, at_least(0));
    add("problem", "lambda2", FType::real, at_least(0));
    add("problem", "lo", FType::real);
    add("problem", "hi", FType::real);
    add("problem", "centered", FType::flag);
    add("problem", "x0_shift", FType::real);
    choice("problem", "noise", {"gaussian", "sampling"});
    add("problem", "sigma", FType::real, at_least(0));

    choice("delay", "model", {"constant", "uniform", "linear", "sqrt-floor", "cyclic", "two-speed",
                              "workers-deterministic", "workers-exponential", "shared-memory", "agents-partial",
                              "agents-linear"});
    add("delay", "tau", FType::count);
    add("delay", "M", FType::count, at_least(1));
    add("delay", "ratio", FType::real, above(0));
    add("delay", "alpha", FType::real, half_open_unit());
    add("delay", "beta", FType::real, at_least(0));
    add("delay", "times", FType::reals, above(0));
    add("delay", "rates", FType::reals, above(0));
    choice("delay", "jlaw", {"full-window", "random-subset"});
    add("delay", "B", FType::count);
    add("delay", "D", FType::count);

    choice("algorithm", "name", {"delayed-gd", "pg", "piag", "async-sgd", "arock", "totally-async"});
    add("algorithm", "gamma", FType::real, above(0));
    choice("algorithm", "gamma_rule", {"two-over-mu-plus-L", "inverse-L", "piag-max", "convex-max", "sconvex-max",
                                       "convex-eps", "sconvex-eps", "convex-horizon", "sconvex-horizon"});
    choice("algorithm", "lyapunov", {"sq-dist", "fn-gap"});
    choice("algorithm", "mode", {"theorem1", "theorem2"});
    add("algorithm", "h", FType::real, {0.0, 1.0, true, false});
    choice("algorithm", "regime", {"convex", "strongly-convex"});
    choice("algorithm", "policy", {"constant", "delay-adaptive"});
    add("algorithm", "tau_th", FType::count);
    add("algorithm", "eps", FType::real, above(0));
    add("algorithm", "horizon", FType::real, above(0));
    add("algorithm", "checkpoint_every", FType::count);
    add("algorithm", "diagnostics", FType::flag);

    add("tolerance", "rel", FType::real, at_least(0));
    add("tolerance", "abs", FType::real, at_least(0));
    add("tolerance", "margin", FType::real, at_least(1));

    choice("rate", "lemma", {"1", "corollary1", "lemma4"});
    add("rate", "q", FType::real, at_least(0));
    add("rate", "p", FType::real, at_least(0));
    add("rate", "r", FType::real);
    add("rate", "e", FType::real, at_least(0));
    add("rate", "tau", FType::count);
    add("rate", "alpha", FType::real, half_open_unit());
    add("rate", "beta", FType::real, at_least(0));
    add("rate", "V0", FType::real, at_least(0));
    choice("rate", "flavor", {"unit-q", "contractive"});

    add("verify", "trace", FType::text);
    choice("verify", "form", {"eq3", "eq4"});
    add("verify", "q", FType::real, at_least(0));
    add("verify", "p", FType::real, at_least(0));
    add("verify", "r", FType::real);
    add("verify", "e", FType::real, at_least(0));
    add("verify", "window", FType::count);
    add("verify", "tau", FType::count);
    choice("verify", "flavor", {"unit-q", "contractive"});
    add("verify", "q_floor", FType::real, at_least(0));
    add("verify", "rho", FType::real, at_least(0));

    choice("sweep", "base", {"rate", "run"});
    add("sweep", "param", FType::text);
    add("sweep", "values", FType::text);
    add("sweep", "parallel", FType::count, at_least(1));
    return f;
  }();
  return s;
}

const FieldSpec* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : schema())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

bool section_known(std::string_view section) {
  for (const auto& f : schema())
    if (f.section == section) return true;
  return false;
}

bool in_range(double v, const Range& r) {
  if (!std::isfinite(v)) return false;
  if (r.lo_open ? !(v > r.lo) : !(v >= r.lo)) return false;
  if (r.hi_open ? !(v < r.hi) : !(v <= r.hi)) return false;
  return true;
}

std::string range_text(const Range& r) {
  std::string lo = r.lo == -HUGE_VAL ? "(-inf" : (r.lo_open ? "(" : "[") + fmt_real(r.lo);
  std::string hi = r.hi == HUGE_VAL ? "inf)" : fmt_real(r.hi) + (r.hi_open ? ")" : "]");
  return lo + ", " + hi;
}

// Canonical form of a value, or an error message.
std::optional<std::string> canonical(const FieldSpec& f, std::string_view raw, std::string& err) {
  const std::string where = f.section + "." + f.key;
  std::string_view v = trim(raw);
  switch (f.type) {
    case FType::text:
      if (v.empty()) {
        err = where + ": empty value";
        return std::nullopt;
      }
      return std::string(v);
    case FType::choice:
      if (std::find(f.choices.begin(), f.choices.end(), v) == f.choices.end()) {
        std::string all;
        for (const auto& c : f.choices) all += (all.empty() ? "" : ", ") + c;
        err = where + ": unknown value '" + std::string(v) + "' (expected one of " + all + ")";
        return std::nullopt;
      }
      return std::string(v);
    case FType::flag:
      if (v == "true" || v == "1" || v == "yes") return std::string("true");
      if (v == "false" || v == "0" || v == "no") return std::string("false");
      err = where + ": expected true or false, got '" + std::string(v) + "'";
      return std::nullopt;
    case FType::count: {
      auto n = parse_u64(v);
      if (!n) {
        err = where + ": expected a non-negative integer, got '" + std::string(v) + "'";
        return std::nullopt;
      }
      if (!in_range(static_cast<double>(*n), f.range)) {
        err = where + ": " + std::to_string(*n) + " outside " + range_text(f.range);
        return std::nullopt;
      }
      return std::to_string(*n);
    }
    case FType::real: {
      auto x = parse_real(v);
      if (!x) {
        err = where + ": expected a number, got '" + std::string(v) + "'";
        return std::nullopt;
      }
      if (!in_range(*x, f.range)) {
        err = where + ": " + fmt_real(*x) + " outside " + range_text(f.range);
        return std::nullopt;
      }
      return fmt_real(*x);
    }
    case FType::reals: {
      std::string out;
      auto parts = split(v, ',');
      if (v.empty()) {
        err = where + ": empty list";
        return std::nullopt;
      }
      for (auto p : parts) {
        auto x = parse_real(trim(p));
        if (!x || !in_range(*x, f.range)) {
          err = where + ": list entry '" + std::string(trim(p)) + "' is not a number in " + range_text(f.range);
          return std::nullopt;
        }
        out += (out.empty() ? "" : ",") + fmt_real(*x);
      }
      return out;
    }
  }
  return std::nullopt;
}

std::pair<std::string, std::string> split_dotted(std::string_view dotted) {
  auto dot = dotted.find('.');
  if (dot == std::string_view::npos) return {std::string(dotted), ""};
  return {std::string(dotted.substr(0, dot)), std::string(dotted.substr(dot + 1))};
}

struct Checker {
  const RunConfig& c;
  std::vector<std::string>& errs;
  // fields that were given but rejected; they count as present for cross-field checks
  const std::set<std::string>* rejected = nullptr;

  bool has(const char* s, const char* k) const {
    return c.has(s, k) || (rejected && rejected->count(std::string(s) + "." + k));
  }
  std::string val(const char* s, const char* k) const { return c.text(s, k, ""); }
  void need(const char* s, const char* k, const std::string& why) {
    if (!has(s, k)) errs.push_back(std::string(s) + "." + k + ": required " + why);
  }
  void forbid(const char* s, const char* k, const std::string& why) {
    if (has(s, k)) errs.push_back(std::string(s) + "." + k + ": not allowed " + why);
  }
};

void check_rate(Checker& ck) {
  if (!ck.has("rate", "lemma")) {
    ck.errs.push_back("rate.lemma: required for kind = rate");
    return;
  }
  std::string lemma = ck.val("rate", "lemma");
  ck.need("rate", "p", "for kind = rate");
  if (lemma == "1") {
    ck.need("rate", "q", "for lemma 1");
    ck.need("rate", "tau", "for lemma 1");
  } else if (lemma == "corollary1") {
    ck.need("rate", "alpha", "for corollary1");
  } else {
    ck.need("rate", "r", "for lemma4");
    ck.need("rate", "tau", "for lemma4");
    if (ck.val("rate", "flavor") == "contractive") ck.need("rate", "q", "for a contractive recursion");
    if (!ck.c.K()) ck.errs.push_back("experiment.K: required for lemma4");
  }
}

void check_verify(Checker& ck) {
  ck.need("verify", "trace", "for kind = verify");
  ck.need("verify", "form", "for kind = verify");
  if (ck.val("verify", "form") == "eq3") {
    ck.need("verify", "q", "for eq3");
    ck.need("verify", "p", "for eq3");
  } else if (ck.val("verify", "form") == "eq4") {
    ck.need("verify", "p", "for eq4");
    ck.need("verify", "r", "for eq4");
    ck.need("verify", "tau", "for eq4");
    if (ck.val("verify", "flavor") == "contractive") {
      ck.need("verify", "q", "for a contractive recursion");
      ck.need("verify", "q_floor", "for a contractive recursion");
    }
  }
}

bool one_of(const std::string& v, std::initializer_list<const char*> opts) {
  for (auto* o : opts)
    if (v == o) return true;
  return false;
}

void check_run(Checker& ck) {
  if (!ck.c.K()) ck.errs.push_back("experiment.K: required for kind = run");
  ck.need("problem", "family", "for kind = run");
  ck.need("algorithm", "name", "for kind = run");
  if (!ck.has("problem", "family") || !ck.has("algorithm", "name")) return;
  const std::string fam = ck.val("problem", "family"), alg = ck.val("algorithm", "name");
  const bool smooth = one_of(fam, {"least-squares", "logistic", "quadratic"});
  const std::string model = ck.val("delay", "model");

  // problem parameters
  if (fam == "least-squares" || fam == "logistic") {
    ck.need("problem", "n", "for " + fam);
    ck.need("problem", "d", "for " + fam);
  }
  if (fam == "logistic" && ck.has("problem", "n") && ck.has("problem", "d") &&
      ck.c.count("problem", "n", 0) < 2 * ck.c.count("problem", "d", 0))
    ck.errs.push_back("problem.n: logistic needs n >= 2d");
  if (fam == "least-squares" && ck.has("problem", "rank") &&
      ck.c.count("problem", "rank", 0) > std::min(ck.c.count("problem", "n", 0), ck.c.count("problem", "d", 0)))
    ck.errs.push_back("problem.rank: exceeds min(n, d)");
  if (fam != "least-squares") ck.forbid("problem", "rank", "outside least-squares");
  if (fam == "quadratic") {
    ck.need("problem", "d", "for quadratic");
    ck.need("problem", "mu", "for quadratic");
    ck.need("problem", "L", "for quadratic");
    if (ck.c.real("problem", "mu", 0) > ck.c.real("problem", "L", HUGE_VAL)) ck.errs.push_back("problem.mu: exceeds problem.L");
  } else if (smooth) {
    ck.forbid("problem", "centered", "outside quadratic and the affine operators");
  }
  if (!smooth) {
    ck.need("problem", "d", "for " + fam);
    ck.need("problem", "c", "for " + fam);
    ck.forbid("problem", "sigma", "for operator families");
    if (ck.has("problem", "blocks") && ck.has("problem", "d") &&
        ck.c.count("problem", "blocks", 1) > ck.c.count("problem", "d", 1))
      ck.errs.push_back("problem.blocks: more blocks than coordinates");
  } else {
    ck.forbid("problem", "c", "for smooth families");
  }
  const std::string reg = ck.c.text("problem", "regularizer", "none");
  if (reg == "l1" || reg == "sq-l2" || reg == "elastic") ck.need("problem", "lambda", "for regularizer " + reg);
  if (reg == "elastic") ck.need("problem", "lambda2", "for regularizer elastic");
  if (reg == "box") {
    ck.need("problem", "lo", "for regularizer box");
    ck.need("problem", "hi", "for regularizer box");
    if (ck.c.real("problem", "lo", 0) > ck.c.real("problem", "hi", 0)) ck.errs.push_back("problem.lo: exceeds problem.hi");
  }
  if (reg != "none" && !(alg == "pg" || alg == "piag")) ck.errs.push_back("problem.regularizer: only pg and piag take a regularizer");

  // method versus problem
  if (alg == "arock" && fam != "affine-euclidean") ck.errs.push_back("algorithm.name: arock needs problem.family = affine-euclidean");
  if (alg == "totally-async" && fam != "affine-block-max")
    ck.errs.push_back("algorithm.name: totally-async needs problem.family = affine-block-max");
  if (!(alg == "arock" || alg == "totally-async") && !smooth)
    ck.errs.push_back("algorithm.name: " + alg + " needs a smooth problem family");
  if (alg != "async-sgd") {
    ck.forbid("problem", "sigma", "outside async-sgd");
    ck.forbid("problem", "noise", "outside async-sgd");
  }

  // delay model
  auto allow = [&](std::initializer_list<const char*> models) {
    if (!ck.has("delay", "model")) {
      ck.errs.push_back("delay.model: required for " + alg);
      return;
    }
    if (!one_of(model, models)) ck.errs.push_back("delay.model: " + model + " cannot drive " + alg);
  };
  if (alg == "delayed-gd") allow({"constant", "uniform", "linear", "sqrt-floor", "two-speed"});
  if (alg == "pg") ck.forbid("delay", "model", "for pg");
  if (alg == "piag") allow({"cyclic", "two-speed", "workers-deterministic", "workers-exponential"});
  if (alg == "async-sgd")
    allow({"constant", "uniform", "linear", "sqrt-floor", "two-speed", "workers-deterministic", "workers-exponential"});
  if (alg == "arock") allow({"shared-memory"});
  if (alg == "totally-async") allow({"agents-partial", "agents-linear"});
  if (model == "constant" || model == "uniform" || model == "shared-memory") ck.need("delay", "tau", "for model " + model);
  if (model == "linear" || model == "agents-linear") ck.need("delay", "alpha", "for model " + model);
  if (model == "agents-linear") ck.need("delay", "beta", "for model agents-linear");
  if (model == "two-speed") {
    ck.need("delay", "M", "for model two-speed");
    ck.need("delay", "ratio", "for model two-speed");
  }
  if (model == "workers-deterministic") ck.need("delay", "times", "for model workers-deterministic");
  if (model == "workers-exponential") ck.need("delay", "rates", "for model workers-exponential");
  if (model == "agents-partial") {
    ck.need("delay", "B", "for model agents-partial");
    ck.need("delay", "D", "for model agents-partial");
  }
  if (alg == "piag" && model != "cyclic" && ck.has("delay", "model") && ck.has("problem", "n")) {
    std::size_t M = 0;
    if (model == "two-speed") M = ck.c.count("delay", "M", 0);
    else M = ck.c.reals("delay", model == "workers-deterministic" ? "times" : "rates").size();
    if (M != ck.c.count("problem", "n", 0)) ck.errs.push_back("delay: piag server mode needs one worker per component");
  }

  // step size
  const bool stepped = one_of(alg, {"delayed-gd", "pg", "piag", "async-sgd"});
  if (stepped) {
    if (ck.has("algorithm", "gamma") == ck.has("algorithm", "gamma_rule"))
      ck.errs.push_back("algorithm.gamma: give exactly one of gamma and gamma_rule");
    const std::string rule = ck.val("algorithm", "gamma_rule");
    if (!rule.empty()) {
      bool ok = (rule == "two-over-mu-plus-L" && alg == "delayed-gd") || (rule == "inverse-L" && (alg == "pg" || alg == "delayed-gd")) ||
                (rule == "piag-max" && alg == "piag" && model == "cyclic") ||
                (alg == "async-sgd" && rule.find("convex-") != std::string::npos);
      if (!ok) ck.errs.push_back("algorithm.gamma_rule: " + rule + " does not apply to " + alg + (alg == "piag" ? " with this delay model" : ""));
      if (rule.find("-eps") != std::string::npos) {
        ck.need("algorithm", "eps", "for gamma_rule " + rule);
        if (ck.c.real("problem", "sigma", 0.0) <= 0.0) ck.errs.push_back("problem.sigma: must be positive for gamma_rule " + rule);
      }
      if (rule.find("-horizon") != std::string::npos) {
        ck.need("algorithm", "horizon", "for gamma_rule " + rule);
        if (ck.c.real("problem", "sigma", 0.0) <= 0.0) ck.errs.push_back("problem.sigma: must be positive for gamma_rule " + rule);
      }
    }
  } else {
    ck.forbid("algorithm", "gamma", "for " + alg);
    ck.forbid("algorithm", "gamma_rule", "for " + alg);
  }
  if (alg != "delayed-gd") ck.forbid("algorithm", "lyapunov", "outside delayed-gd");
  if (alg != "piag") ck.forbid("algorithm", "mode", "outside piag");
  if (!(alg == "piag" || alg == "arock")) ck.forbid("algorithm", "h", "outside piag and arock");
  if (alg != "async-sgd") {
    ck.forbid("algorithm", "regime", "outside async-sgd");
    ck.forbid("algorithm", "policy", "outside async-sgd");
    ck.forbid("algorithm", "tau_th", "outside async-sgd");
  }
  if (alg == "async-sgd" && ck.val("algorithm", "policy") == "delay-adaptive" && !ck.has("algorithm", "tau_th") &&
      !one_of(model, {"two-speed", "workers-deterministic", "workers-exponential"}))
    ck.errs.push_back("algorithm.tau_th: required for a delay-adaptive policy without a worker model");
  if (alg != "arock") {
    ck.forbid("algorithm", "checkpoint_every", "outside arock");
    ck.forbid("algorithm", "diagnostics", "outside arock");
  }
}

}  // namespace

bool config_field_known(std::string_view dotted) {
  auto [s, k] = split_dotted(dotted);
  return find_field(s, k) != nullptr;
}

ExperimentKind RunConfig::kind() const {
  std::string k = text("experiment", "kind", "run");
  if (k == "rate") return ExperimentKind::rate;
  if (k == "verify") return ExperimentKind::verify;
  if (k == "sweep") return ExperimentKind::sweep;
  return ExperimentKind::run;
}

std::uint64_t RunConfig::seed() const { return count("experiment", "seed", 0); }

std::optional<std::size_t> RunConfig::K() const {
  auto k = count("experiment", "K");
  if (!k) return std::nullopt;
  return static_cast<std::size_t>(*k);
}

std::size_t RunConfig::seed_count() const { return static_cast<std::size_t>(count("experiment", "seeds", 1)); }

std::optional<std::string> RunConfig::output() const { return get("experiment", "output"); }

bool RunConfig::has(const std::string& section, const std::string& key) const { return get(section, key).has_value(); }

std::optional<std::string> RunConfig::get(const std::string& section, const std::string& key) const {
  auto s = doc.find(section);
  if (s == doc.end()) return std::nullopt;
  auto v = s->second.find(key);
  if (v == s->second.end()) return std::nullopt;
  return v->second;
}

std::string RunConfig::text(const std::string& section, const std::string& key, const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

std::optional<double> RunConfig::real(const std::string& section, const std::string& key) const {
  auto v = get(section, key);
  if (!v) return std::nullopt;
  return parse_real(*v);
}

double RunConfig::real(const std::string& section, const std::string& key, double fallback) const {
  return real(section, key).value_or(fallback);
}

std::optional<std::uint64_t> RunConfig::count(const std::string& section, const std::string& key) const {
  auto v = get(section, key);
  if (!v) return std::nullopt;
  return parse_u64(*v);
}

std::uint64_t RunConfig::count(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  return count(section, key).value_or(fallback);
}

bool RunConfig::flag(const std::string& section, const std::string& key, bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  return *v == "true";
}

std::vector<double> RunConfig::reals(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  auto v = get(section, key);
  if (!v) return out;
  for (auto p : split(*v, ','))
    if (auto x = parse_real(trim(p))) out.push_back(*x);
  return out;
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  const FieldSpec* f = find_field(section, key);
  if (!f) throw ConfigError(Errc::semantic_error, {section + "." + key + ": unknown field"});
  std::string err;
  auto v = canonical(*f, value, err);
  if (!v) throw ConfigError(Errc::semantic_error, {err});
  doc[section][key] = *v;
}

void RunConfig::erase(const std::string& section, const std::string& key) {
  auto s = doc.find(section);
  if (s == doc.end()) return;
  s->second.erase(key);
  if (s->second.empty()) doc.erase(s);
}

namespace {

void semantic_checks(const RunConfig& c, std::vector<std::string>& errs, const std::set<std::string>* rejected) {
  Checker ck{c, errs, rejected};
  if (!c.has("experiment", "kind")) {
    errs.push_back("experiment.kind: required");
    return;
  }
  switch (c.kind()) {
    case ExperimentKind::rate: check_rate(ck); break;
    case ExperimentKind::verify: check_verify(ck); break;
    case ExperimentKind::run: check_run(ck); break;
    case ExperimentKind::sweep: {
      ck.need("sweep", "base", "for kind = sweep");
      ck.need("sweep", "param", "for kind = sweep");
      ck.need("sweep", "values", "for kind = sweep");
      if (!c.has("sweep", "base") || !c.has("sweep", "param") || !c.has("sweep", "values")) return;
      const std::string param = c.text("sweep", "param", "");
      auto [s, k] = split_dotted(param);
      const FieldSpec* f = find_field(s, k);
      if (!f || s == "sweep" || s == "experiment" || f->type == FType::reals) {
        errs.push_back("sweep.param: '" + param + "' is not a sweepable field");
        return;
      }
      std::size_t before = errs.size();
      const std::string raw_values = c.text("sweep", "values", "");
      auto vals = split(raw_values, ',');
      for (auto v : vals) {
        std::string err;
        if (!canonical(*f, v, err)) errs.push_back("sweep.values: " + err);
      }
      if (errs.size() != before) return;
      // the first point stands in for all of them; per-point range errors surface at run time
      RunConfig base = c;
      base.doc.erase("sweep");
      base.doc["experiment"]["kind"] = c.text("sweep", "base", "run");
      base.set(s, k, std::string(trim(vals.front())));
      semantic_checks(base, errs, nullptr);
      break;
    }
  }
}

}  // namespace

void validate_config(const RunConfig& c) {
  std::vector<std::string> errs;
  semantic_checks(c, errs, nullptr);
  if (!errs.empty()) throw ConfigError(Errc::semantic_error, std::move(errs));
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::vector<std::string> parse_errs, sem_errs;
  std::string section;
  std::set<std::string> seen_sections, rejected;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    const std::string at = "line " + std::to_string(lineno) + ": ";
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        parse_errs.push_back(at + "malformed section header '" + std::string(line) + "'");
        section.clear();
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!section_known(section)) sem_errs.push_back(at + "unknown section [" + section + "]");
      if (!seen_sections.insert(section).second) parse_errs.push_back(at + "section [" + section + "] repeated");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      parse_errs.push_back(at + "expected 'key = value', got '" + std::string(line) + "'");
      continue;
    }
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) {
      parse_errs.push_back(at + "missing key");
      continue;
    }
    if (section.empty()) {
      parse_errs.push_back(at + "'" + key + "' appears before any section");
      continue;
    }
    if (!section_known(section)) continue;
    const FieldSpec* f = find_field(section, key);
    if (!f) {
      sem_errs.push_back(at + section + "." + key + ": unknown key");
      continue;
    }
    if (c.has(section, key)) {
      parse_errs.push_back(at + section + "." + key + ": duplicate key");
      continue;
    }
    std::string err;
    auto v = canonical(*f, value, err);
    if (!v) {
      sem_errs.push_back(at + err);
      rejected.insert(section + "." + key);
      continue;
    }
    c.doc[section][key] = *v;
  }
  // cross-field problems are reported alongside the field errors
  if (parse_errs.empty()) semantic_checks(c, sem_errs, &rejected);
  if (!parse_errs.empty()) {
    parse_errs.insert(parse_errs.end(), sem_errs.begin(), sem_errs.end());
    throw ConfigError(Errc::parse_error, std::move(parse_errs));
  }
  if (!sem_errs.empty()) throw ConfigError(Errc::semantic_error, std::move(sem_errs));
  // canonical sweep values
  if (c.kind() == ExperimentKind::sweep) {
    auto [s, k] = split_dotted(c.text("sweep", "param", ""));
    const FieldSpec* f = find_field(s, k);
    std::string out, err;
    const std::string raw_values = c.text("sweep", "values", "");
    for (auto v : split(raw_values, ',')) out += (out.empty() ? "" : ",") + *canonical(*f, v, err);
    c.doc["sweep"]["values"] = out;
  }
  return c;
}

std::string render_config(const RunConfig& c) {
  std::ostringstream os;
  bool first = true;
  // schema order for sections, sorted keys within a section
  std::vector<std::string> order;
  for (const auto& f : schema())
    if (std::find(order.begin(), order.end(), f.section) == order.end()) order.push_back(f.section);
  for (const auto& s : order) {
    auto it = c.doc.find(s);
    if (it == c.doc.end() || it->second.empty()) continue;
    if (!first) os << '\n';
    first = false;
    os << '[' << s << "]\n";
    for (const auto& [k, v] : it->second) os << k << " = " << v << '\n';
  }
  return os.str();
}

}  // namespace ail
