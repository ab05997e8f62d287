// SPDX-License-Identifier: Apache-2.0
#include "ratgreedy/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ratgreedy {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Strict reading

/// Object reader that records which keys were consumed so leftovers can be
/// rejected by name.
class Reader {
public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key))
      throw ConfigError(name(key), "required key is missing");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number())
      throw ConfigError(name(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double def) { return has(key) ? number(key) : def; }

  long long integer(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number_integer())
      throw ConfigError(name(key), "expected an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long def) { return has(key) ? integer(key) : def; }

  std::string string(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string())
      throw ConfigError(name(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& def) {
    return has(key) ? string(key) : def;
  }

  std::pair<double, double> pair(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ConfigError(name(key), "expected [lo, hi]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  template <class T>
  std::vector<T> list(const std::string& key, std::vector<T> def) {
    if (!has(key))
      return def;
    const Json& v = at(key);
    if (!v.is_array() || v.empty())
      throw ConfigError(name(key), "expected a non-empty array");
    std::vector<T> out;
    for (const auto& e : v) {
      if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer())
          throw ConfigError(name(key), "expected integers");
      } else if (!e.is_number()) {
        throw ConfigError(name(key), "expected numbers");
      }
      out.push_back(e.get<T>());
    }
    return out;
  }

  Reader child(const std::string& key) { return Reader(at(key), name(key)); }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError(name(it.key()), "unknown key");
  }

private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E>
E pick(const std::string& key, const std::string& value,
       std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [n, e] : options) {
    if (value == n)
      return e;
    names += names.empty() ? n : std::string(", ") + n;
  }
  throw ConfigError(key, "unknown value '" + value + "' (expected one of " + names + ")");
}

int positive_int(Reader& r, const std::string& key, long long def) {
  const long long v = r.integer(key, def);
  if (v < 1 || v > 1'000'000)
    throw ConfigError(r.name(key), "must be a positive integer");
  return static_cast<int>(v);
}

TargetFunction read_target(Reader r) {
  const std::string kind = r.string("kind");
  TargetFunction out = TargetFunction::inverse_power(0.5);
  if (kind == "inverse_power") {
    out = TargetFunction::inverse_power(r.number("alpha"));
  } else if (kind == "two_term") {
    const double s = r.number("s");
    const double t = r.number("t");
    const double alpha = r.number("alpha");
    const double beta = r.number("beta");
    out = TargetFunction::two_term(s, t, alpha, beta);
  } else if (kind == "rescaled_interface") {
    const double mu = r.number("mu");
    const double K = r.number("K");
    const double c = r.number("c");
    out = TargetFunction::rescaled_interface(mu, K, c);
  } else {
    throw ConfigError(r.name("kind"),
                      "unknown target '" + kind + "' (expected inverse_power, two_term, rescaled_interface)");
  }
  r.finish();
  return out;
}

Json target_json(const TargetFunction& f) {
  Json j;
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, InversePower>) {
          j["kind"] = "inverse_power";
          j["alpha"] = t.alpha;
        } else if constexpr (std::is_same_v<T, TwoTermFrac>) {
          j["kind"] = "two_term";
          j["s"] = t.s;
          j["t"] = t.t;
          j["alpha"] = t.alpha;
          j["beta"] = t.beta;
        } else if constexpr (std::is_same_v<T, RescaledInterface>) {
          j["kind"] = "rescaled_interface";
          j["mu"] = t.mu;
          j["K"] = t.K;
          j["c"] = t.c;
        } else {
          throw ConfigError("target", "custom targets cannot be serialized");
        }
      },
      f.form());
  return j;
}

bool same_target(const TargetFunction& a, const TargetFunction& b) {
  if (a.form().index() != b.form().index())
    return false;
  if (std::holds_alternative<Custom>(a.form()))
    return false;
  return target_json(a) == target_json(b);
}

Json pair_json(double lo, double hi) { return Json::array({lo, hi}); }

std::string dictionary_name(DictionaryKind k) {
  switch (k) {
  case DictionaryKind::NormalizedPole:
    return "normalized_pole";
  case DictionaryKind::PlainPole:
    return "plain_pole";
  case DictionaryKind::NegativePower:
    return "negative_power";
  }
  return "?";
}

std::string mode_name(ImprovedMode m) {
  return m == ImprovedMode::EveryStep ? "every_step" : "final_only";
}

std::string sweep_algorithm_name(SweepAlgorithm a) {
  return a == SweepAlgorithm::Wcga ? "wcga" : "improved_oga";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json config_json(const ExperimentConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = to_string(cfg.command);
  j["target"] = target_json(cfg.target);
  j["fit_interval"] = pair_json(cfg.fit.lo(), cfg.fit.hi());
  j["eval_interval"] = pair_json(cfg.eval.lo(), cfg.eval.hi());
  Json d;
  d["kind"] = dictionary_name(cfg.dictionary);
  d[cfg.dictionary == DictionaryKind::NegativePower ? "eta_range" : "window"] =
      pair_json(cfg.dict_lo, cfg.dict_hi);
  j["dictionary"] = d;
  Json a;
  a["name"] = to_string(cfg.algorithm);
  a["n"] = cfg.n;
  a["mode"] = mode_name(cfg.mode);
  a["target_error"] = cfg.target_error;
  a["pso"] = {{"swarm_size", cfg.pso.swarm_size},
              {"iterations", cfg.pso.iterations},
              {"inertia", cfg.pso.inertia},
              {"cognitive", cfg.pso.cognitive},
              {"social", cfg.pso.social}};
  a["wcga"] = {{"m", cfg.wcga_m}, {"t_exponent", cfg.t_exponent}};
  j["algorithm"] = a;
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  Json formats = Json::array();
  if (cfg.write_csv)
    formats.push_back("csv");
  if (cfg.write_json)
    formats.push_back("json");
  j["formats"] = formats;
  const PrecondSettings& p = cfg.precond;
  j["precond"] = {{"mu", p.mu},
                  {"K", p.K},
                  {"n", p.n},
                  {"algorithm", sweep_algorithm_name(p.algorithm)},
                  {"target_error", p.target_error},
                  {"max_terms", p.max_terms},
                  {"tol", p.tol},
                  {"max_it", p.max_it},
                  {"window", pair_json(p.window.left(), p.window.right())}};
  return j;
}

Json partial_fraction_json(const PartialFraction& pf) {
  return {{"c0", pf.c0}, {"residues", pf.residues}, {"poles", pf.poles}};
}

} // namespace

// ---------------------------------------------------------------------------

bool PrecondSettings::operator==(const PrecondSettings& o) const {
  return mu == o.mu && K == o.K && n == o.n && algorithm == o.algorithm &&
         target_error == o.target_error && max_terms == o.max_terms && tol == o.tol &&
         max_it == o.max_it && window == o.window;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return command == o.command && same_target(target, o.target) && fit == o.fit && eval == o.eval &&
         dictionary == o.dictionary && dict_lo == o.dict_lo && dict_hi == o.dict_hi &&
         algorithm == o.algorithm && n == o.n && mode == o.mode && target_error == o.target_error &&
         pso.swarm_size == o.pso.swarm_size && pso.iterations == o.pso.iterations &&
         pso.inertia == o.pso.inertia && pso.cognitive == o.pso.cognitive &&
         pso.social == o.pso.social && pso.seed == o.pso.seed && wcga_m == o.wcga_m &&
         t_exponent == o.t_exponent && output_dir == o.output_dir && seed == o.seed &&
         write_csv == o.write_csv && write_json == o.write_json && precond == o.precond;
}

std::string to_string(Command c) {
  switch (c) {
  case Command::Approx:
    return "approx";
  case Command::Compare:
    return "compare";
  case Command::PrecondDemo:
    return "precond-demo";
  }
  return "?";
}

std::string to_string(Algorithm a) {
  switch (a) {
  case Algorithm::Oga:
    return "oga";
  case Algorithm::ImprovedOga:
    return "improved_oga";
  case Algorithm::Wcga:
    return "wcga";
  }
  return "?";
}

DictionarySpec ExperimentConfig::dictionary_spec() const {
  switch (dictionary) {
  case DictionaryKind::NormalizedPole:
    return DictionarySpec::normalized_pole(PoleWindow(dict_lo, dict_hi), fit);
  case DictionaryKind::PlainPole:
    return DictionarySpec::plain_pole(PoleWindow(dict_lo, dict_hi));
  case DictionaryKind::NegativePower:
    return DictionarySpec::negative_power(dict_lo, dict_hi);
  }
  throw DomainError("unknown dictionary kind");
}

DictionarySpec ExperimentConfig::wcga_dictionary() const {
  if (dictionary == DictionaryKind::NegativePower)
    return DictionarySpec::negative_power(dict_lo, dict_hi);
  return DictionarySpec::plain_pole(PoleWindow(dict_lo, dict_hi));
}

FitSettings ExperimentConfig::fit_settings() const { return FitSettings(fit, eval); }

WcgaConfig ExperimentConfig::wcga_config() const {
  WcgaConfig w;
  const double e = t_exponent;
  w.t_sequence = [e](int k) { return std::pow(static_cast<double>(k), -e); };
  w.m = wcga_m;
  w.max_terms = n;
  w.target_error = target_error;
  return w;
}

ExperimentConfig parse_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("malformed document: ") + e.what());
  }
  Reader r(doc, "");
  ExperimentConfig cfg;
  const long long version = r.integer("schema_version", kSchemaVersion);
  if (version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(version));
  cfg.command = pick<Command>("command", r.string("command", "approx"),
                              {{"approx", Command::Approx},
                               {"compare", Command::Compare},
                               {"precond-demo", Command::PrecondDemo}});

  if (r.has("target"))
    cfg.target = read_target(r.child("target"));
  else if (cfg.command != Command::PrecondDemo)
    r.at("target"); // reports the missing key

  if (r.has("fit_interval")) {
    const auto [lo, hi] = r.pair("fit_interval");
    cfg.fit = Interval(lo, hi);
  }
  cfg.eval = cfg.fit;
  if (r.has("eval_interval")) {
    const auto [lo, hi] = r.pair("eval_interval");
    cfg.eval = Interval(lo, hi);
  }

  if (r.has("dictionary")) {
    Reader d = r.child("dictionary");
    cfg.dictionary = pick<DictionaryKind>(d.name("kind"), d.string("kind"),
                                          {{"normalized_pole", DictionaryKind::NormalizedPole},
                                           {"plain_pole", DictionaryKind::PlainPole},
                                           {"negative_power", DictionaryKind::NegativePower}});
    if (cfg.dictionary == DictionaryKind::NegativePower) {
      std::tie(cfg.dict_lo, cfg.dict_hi) =
          d.has("eta_range") ? d.pair("eta_range") : std::pair{1e-8, 1.0 - 1e-8};
    } else if (d.has("window")) {
      std::tie(cfg.dict_lo, cfg.dict_hi) = d.pair("window");
    }
    d.finish();
  }

  if (r.has("algorithm")) {
    Reader a = r.child("algorithm");
    cfg.algorithm = pick<Algorithm>(a.name("name"), a.string("name", "improved_oga"),
                                    {{"oga", Algorithm::Oga},
                                     {"improved_oga", Algorithm::ImprovedOga},
                                     {"wcga", Algorithm::Wcga}});
    cfg.n = positive_int(a, "n", cfg.n);
    cfg.mode = pick<ImprovedMode>(a.name("mode"), a.string("mode", "final_only"),
                                  {{"final_only", ImprovedMode::FinalOnly},
                                   {"every_step", ImprovedMode::EveryStep}});
    cfg.target_error = a.number("target_error", 0.0);
    if (!(cfg.target_error >= 0.0))
      throw ConfigError(a.name("target_error"), "must be >= 0");
    if (a.has("pso")) {
      Reader p = a.child("pso");
      cfg.pso.swarm_size = positive_int(p, "swarm_size", cfg.pso.swarm_size);
      cfg.pso.iterations = positive_int(p, "iterations", cfg.pso.iterations);
      cfg.pso.inertia = p.number("inertia", cfg.pso.inertia);
      cfg.pso.cognitive = p.number("cognitive", cfg.pso.cognitive);
      cfg.pso.social = p.number("social", cfg.pso.social);
      p.finish();
      if (cfg.pso.swarm_size < 2)
        throw ConfigError(p.name("swarm_size"), "must be >= 2");
    }
    if (a.has("wcga")) {
      Reader w = a.child("wcga");
      cfg.wcga_m = positive_int(w, "m", cfg.wcga_m);
      cfg.t_exponent = w.number("t_exponent", cfg.t_exponent);
      if (!(cfg.t_exponent >= 0.0))
        throw ConfigError(w.name("t_exponent"), "must be >= 0");
      w.finish();
    }
    a.finish();
  }

  cfg.output_dir = r.string("output_dir", cfg.output_dir);
  if (r.has("seed")) {
    const Json& s = r.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.pso.seed = cfg.seed;

  if (r.has("formats")) {
    const Json& f = r.at("formats");
    if (!f.is_array() || f.empty())
      throw ConfigError("formats", "expected a non-empty array");
    cfg.write_csv = cfg.write_json = false;
    for (const auto& e : f) {
      const std::string v = e.is_string() ? e.get<std::string>() : "";
      if (v == "csv")
        cfg.write_csv = true;
      else if (v == "json")
        cfg.write_json = true;
      else
        throw ConfigError("formats", "entries must be \"csv\" or \"json\"");
    }
  }

  if (r.has("precond")) {
    Reader p = r.child("precond");
    PrecondSettings& s = cfg.precond;
    s.mu = p.list<double>("mu", s.mu);
    s.K = p.list<double>("K", s.K);
    s.n = p.list<int>("n", s.n);
    s.algorithm = pick<SweepAlgorithm>(p.name("algorithm"), p.string("algorithm", "improved_oga"),
                                       {{"improved_oga", SweepAlgorithm::ImprovedOga},
                                        {"wcga", SweepAlgorithm::Wcga}});
    s.target_error = p.number("target_error", s.target_error);
    s.max_terms = positive_int(p, "max_terms", s.max_terms);
    s.tol = p.number("tol", s.tol);
    s.max_it = positive_int(p, "max_it", s.max_it);
    if (p.has("window")) {
      const auto [lo, hi] = p.pair("window");
      s.window = PoleWindow(lo, hi);
    }
    p.finish();
    for (double v : s.mu)
      if (!(v > 0.0))
        throw ConfigError(p.name("mu"), "entries must be > 0");
    for (double v : s.K)
      if (!(v > 0.0))
        throw ConfigError(p.name("K"), "entries must be > 0");
    for (int v : s.n)
      if (v < 1)
        throw ConfigError(p.name("n"), "entries must be >= 1");
    if (!(s.target_error > 0.0))
      throw ConfigError(p.name("target_error"), "must be > 0");
    if (!(s.tol > 0.0))
      throw ConfigError(p.name("tol"), "must be > 0");
  }
  r.finish();

  // Validates the window / range against the dictionary kind.
  (void)cfg.dictionary_spec();
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult out;
  PsoConfig pso = cfg.pso;
  pso.seed = cfg.seed;
  const FitSettings on = cfg.fit_settings();
  auto run = [&](Algorithm a) -> GreedyTrace {
    switch (a) {
    case Algorithm::Oga:
      return run_oga(cfg.target, cfg.dictionary_spec(), on, cfg.n, pso);
    case Algorithm::ImprovedOga:
      return run_improved_oga(cfg.target, cfg.dictionary_spec(), on, cfg.n, pso, cfg.mode,
                              cfg.target_error);
    case Algorithm::Wcga:
      return run_wcga(cfg.target, cfg.wcga_dictionary(), on, cfg.wcga_config());
    }
    throw DomainError("unknown algorithm");
  };

  switch (cfg.command) {
  case Command::Approx:
    out.traces.emplace_back(to_string(cfg.algorithm), run(cfg.algorithm));
    break;
  case Command::Compare:
    for (Algorithm a : {Algorithm::Oga, Algorithm::ImprovedOga, Algorithm::Wcga})
      out.traces.emplace_back(to_string(a), run(a));
    break;
  case Command::PrecondDemo: {
    SweepSettings s;
    s.algorithm = cfg.precond.algorithm;
    s.target_error = cfg.precond.target_error;
    s.max_terms = cfg.precond.max_terms;
    s.tol = cfg.precond.tol;
    s.max_it = cfg.precond.max_it;
    s.pso = pso;
    s.window = cfg.precond.window;
    out.sweep = sweep(cfg.precond.mu, cfg.precond.K, cfg.precond.n, s);
    break;
  }
  }
  return out;
}

std::string trace_csv(const GreedyTrace& trace) {
  std::string s = "j,param,uniform_error,l2_error\n";
  for (std::size_t j = 0; j < trace.iterations.size(); ++j) {
    const auto& it = trace.iterations[j];
    s += std::to_string(j + 1) + "," + num(it.param) + "," + num(it.uniform_error) + "," +
         num(it.l2_error) + "\n";
  }
  return s;
}

std::string plot_csv(const ExperimentConfig& cfg, const GreedyTrace& trace) {
  std::string s = "z,f,R,f_minus_R\n";
  const FitSettings on = cfg.fit_settings();
  for (double z : on.grid.points(on.eval)) {
    const double fz = cfg.target(z);
    const double rz = trace.final(z);
    s += num(z) + "," + num(fz) + "," + num(rz) + "," + num(fz - rz) + "\n";
  }
  return s;
}

std::string approximant_json(const ExperimentConfig& cfg, const std::string& algorithm,
                             const GreedyTrace& trace) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_json(cfg);
  j["seed"] = cfg.seed;
  j["algorithm"] = algorithm;
  const DictionaryKind kind = algorithm == "wcga" ? cfg.wcga_dictionary().kind() : cfg.dictionary;
  j["dictionary"] = dictionary_name(kind);
  j["params"] = trace.final.params();
  j["coeffs"] = trace.final.coeffs();
  if (trace.final.is_pole_kind() && !trace.final.empty())
    j["partial_fraction"] = partial_fraction_json(to_partial_fraction(trace.final));
  else
    j["partial_fraction"] = nullptr;
  Json its = Json::array();
  for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
    const auto& it = trace.iterations[k];
    its.push_back({{"j", k + 1},
                   {"param", it.param},
                   {"coeffs", it.coeffs},
                   {"uniform_error", it.uniform_error},
                   {"l2_error", it.l2_error}});
  }
  j["iterations"] = its;
  j["flags"] = trace.flags;
  return j.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "mu,K,n,n_poles,uniform_error,iterations,exact_iterations,delta,krylov,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    for (char& c : status)
      if (c == ',' || c == '\n')
        c = ';';
    s += num(r.mu) + "," + num(r.K) + "," + std::to_string(r.n) + "," + std::to_string(r.n_poles) +
         "," + num(r.uniform_error) + "," + std::to_string(r.iterations) + "," +
         std::to_string(r.exact_iterations) + "," + std::to_string(r.delta) + "," + r.krylov + "," +
         status + "\n";
  }
  return s;
}

std::string sweep_json(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_json(cfg);
  j["seed"] = cfg.seed;
  Json arr = Json::array();
  for (const auto& r : rows)
    arr.push_back({{"mu", r.mu},
                   {"K", r.K},
                   {"n", r.n},
                   {"n_poles", r.n_poles},
                   {"uniform_error", r.uniform_error},
                   {"iterations", r.iterations},
                   {"exact_iterations", r.exact_iterations},
                   {"delta", r.delta},
                   {"krylov", r.krylov},
                   {"residues_positive", r.min_residue_positive},
                   {"status", r.status},
                   {"partial_fraction", partial_fraction_json(r.approximant)}});
  j["rows"] = arr;
  return j.dump(2) + "\n";
}

std::vector<std::string> write_report(const ExperimentConfig& cfg, const ExperimentResult& result) {
  // Render everything first so a formatting failure leaves no files behind.
  std::vector<std::pair<std::string, std::string>> files;
  const bool single = cfg.command == Command::Approx;
  for (const auto& [name, trace] : result.traces) {
    const std::string suffix = single ? "" : "_" + name;
    if (cfg.write_csv) {
      files.emplace_back("trace" + suffix + ".csv", trace_csv(trace));
      files.emplace_back("plot" + suffix + ".csv", plot_csv(cfg, trace));
    }
    if (cfg.write_json)
      files.emplace_back("approximant" + suffix + ".json", approximant_json(cfg, name, trace));
  }
  if (cfg.command == Command::PrecondDemo) {
    if (cfg.write_csv)
      files.emplace_back("sweep.csv", sweep_csv(result.sweep));
    if (cfg.write_json)
      files.emplace_back("sweep.json", sweep_json(cfg, result.sweep));
  }

  std::vector<std::string> written;
  try {
    fs::create_directories(cfg.output_dir);
    for (const auto& [name, body] : files) {
      const std::string path = (fs::path(cfg.output_dir) / name).string();
      std::ofstream os(path, std::ios::binary | std::ios::trunc);
      if (!os)
        throw IoError("cannot open " + path + " for writing");
      written.push_back(path);
      os << body;
      os.close();
      if (!os)
        throw IoError("failed writing " + path);
    }
  } catch (const std::exception& e) {
    std::error_code ec;
    for (const auto& p : written)
      fs::remove(p, ec);
    if (dynamic_cast<const IoError*>(&e))
      throw;
    throw IoError(e.what());
  }
  return written;
}

} // namespace ratgreedy
