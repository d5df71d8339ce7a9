#pragma once

// Run configurations, machine-readable reports and parameter sweeps.
//
// Reports are deterministic: identical configurations produce identical
// bytes. Floats use the shortest representation that round-trips. Sweeps
// evaluate grid points concurrently and emit them in grid order.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qoptics/analysis.hpp"
#include "qoptics/dsl.hpp"
#include "qoptics/protocols.hpp"

namespace qoptics::runner {

using json = nlohmann::json;

inline constexpr const char* kSchemaTag = "qoptics.run-report/1";
inline constexpr const char* kWorkersEnv = "QOPTICS_WORKERS";

// Bad configuration or unreadable/invalid circuit input (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceArgs {
  std::string kind = "squeezed";  // squeezed | coherent
  double r = 0.5;
  double phi = 0.0;
  double alpha_re = 1.0;
  double alpha_im = 0.0;

  bool operator==(const SourceArgs&) const = default;
};

struct SweepAxis {
  std::string param;
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;

  double value(std::size_t i) const {
    if (steps <= 1) return start;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
};

struct RunConfig {
  std::optional<std::string> protocol;      // superposition | entanglement
  std::optional<std::string> circuit_path;  // .qcirc file
  std::optional<std::string> circuit_text;  // inline circuit (takes the place of a file)
  SourceArgs source;
  std::optional<SourceArgs> source2;  // entanglement only; defaults to `source`
  double tau = std::numbers::pi / 2.0;
  double tau2 = std::numbers::pi / 2.0;
  double theta = 0.0;
  std::optional<std::size_t> cutoff;
  double epsilon = kDefaultLeakage;
  std::string format = "json";
  bool trace = false;
  std::vector<SweepAxis> sweeps;
  std::size_t workers = 1;
};

inline const std::vector<std::string>& sweepable_params() {
  static const std::vector<std::string> p = {"r",  "phi",   "alpha_re", "alpha_im", "r2",  "phi2",
                                             "alpha2_re", "alpha2_im", "tau", "tau2", "theta"};
  return p;
}

// Angle text accepted on the command line and in sweep specs.
inline double parse_angle_arg(const std::string& s) {
  auto v = dsl::detail::parse_angle(s);
  if (!v) throw ConfigError("malformed angle '" + s + "'");
  return *v;
}

// "param:start:stop:steps"
inline SweepAxis parse_sweep(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw ConfigError("sweep spec must be param:start:stop:steps, got '" + spec + "'");
  const auto& names = sweepable_params();
  if (std::find(names.begin(), names.end(), parts[0]) == names.end()) {
    throw ConfigError("parameter '" + parts[0] + "' cannot be swept");
  }
  auto steps = dsl::detail::parse_uint(parts[3]);
  if (!steps || *steps < 1) throw ConfigError("sweep steps must be an integer >= 1");
  return {parts[0], parse_angle_arg(parts[1]), parse_angle_arg(parts[2]), *steps};
}

inline std::size_t default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    if (auto v = dsl::detail::parse_uint(env); v && *v > 0) return *v;
  }
  return 1;
}

inline void validate(const RunConfig& c) {
  const int inputs = (c.protocol ? 1 : 0) + (c.circuit_path || c.circuit_text ? 1 : 0);
  if (inputs != 1) throw ConfigError("exactly one of --protocol or --circuit is required");
  if (c.protocol && *c.protocol != "superposition" && *c.protocol != "entanglement") {
    throw ConfigError("unknown protocol '" + *c.protocol + "'");
  }
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError("--epsilon must lie in (0, 1)");
  if (c.format != "json" && c.format != "csv") throw ConfigError("--format must be json or csv");
  for (const auto* s : {&c.source, c.source2 ? &*c.source2 : &c.source}) {
    if (s->kind != "squeezed" && s->kind != "coherent") throw ConfigError("unknown source kind '" + s->kind + "'");
  }
  for (const auto& ax : c.sweeps) {
    if (ax.steps < 1) throw ConfigError("sweep steps must be >= 1");
  }
  if (!c.sweeps.empty() && !c.protocol) throw ConfigError("sweeps require --protocol");
  if (c.workers < 1) throw ConfigError("--workers must be >= 1");
}

inline SourceSpec to_source_spec(const SourceArgs& a, const RunConfig& c) {
  SourceSpec s;
  if (a.kind == "squeezed") {
    s.kind = SqueezeParam{a.r, a.phi};
  } else {
    s.kind = CoherentParam{{a.alpha_re, a.alpha_im}};
  }
  s.cutoff = c.cutoff;
  s.epsilon = c.epsilon;
  return s;
}

inline std::string load_circuit_text(const RunConfig& c) {
  if (c.circuit_text) return *c.circuit_text;
  std::ifstream in(*c.circuit_path, std::ios::binary);
  if (!in) throw ConfigError("cannot read circuit file '" + *c.circuit_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Circuit parse failure; carries the rendered diagnostics.
class CircuitError : public ConfigError {
 public:
  CircuitError(std::string rendered) : ConfigError("circuit has errors"), rendered_(std::move(rendered)) {}
  const std::string& rendered() const { return rendered_; }

 private:
  std::string rendered_;
};

namespace detail {

inline json source_json(const SourceArgs& s) {
  json j;
  j["kind"] = s.kind;
  if (s.kind == "squeezed") {
    j["r"] = s.r;
    j["phi"] = s.phi;
  } else {
    j["alpha_re"] = s.alpha_re;
    j["alpha_im"] = s.alpha_im;
  }
  return j;
}

inline json config_json(const RunConfig& c) {
  json j;
  if (c.protocol) {
    j["protocol"] = *c.protocol;
    j["source"] = source_json(c.source);
    j["tau"] = c.tau;
    j["theta"] = c.theta;
    if (*c.protocol == "entanglement") {
      j["source2"] = source_json(c.source2.value_or(c.source));
      j["tau2"] = c.tau2;
    }
  } else {
    j["circuit"] = c.circuit_path.value_or("<inline>");
  }
  j["cutoff"] = c.cutoff ? json(*c.cutoff) : json(nullptr);
  j["epsilon"] = c.epsilon;
  j["trace"] = c.trace;
  return j;
}

inline json state_json(const std::string& label, const MultiModeState& s) {
  json amps = json::array();
  for (const auto& a : s.amplitudes()) amps.push_back({a.real(), a.imag()});
  return {{"label", label}, {"modes", s.labels()}, {"cutoffs", s.cutoffs()}, {"amplitudes", std::move(amps)}};
}

inline json branch_json(const Branch& b, const std::optional<AnalysisReport>& rep) {
  json j;
  j["label"] = b.label;
  json outcome = json::array();
  for (const auto& d : b.outcome) outcome.push_back({{"mode", d.mode}, {"n", d.n}});
  j["outcome"] = std::move(outcome);
  j["probability"] = b.probability;
  j["pre_norm"] = std::sqrt(b.probability);
  if (b.state && rep) {
    j["modes"] = b.state->labels();
    j["distribution"] = rep->distribution;
    j["support_residual"] = rep->support_residual;
    j["fidelity"] = rep->fidelity_targets;
    j["schmidt_coefficients"] = rep->schmidt_coefficients;
    j["schmidt_entropy"] = rep->schmidt_entropy ? json(*rep->schmidt_entropy) : json(nullptr);
  } else {
    j["modes"] = nullptr;
  }
  return j;
}

// Analysis targets for the built-in protocols.
inline AnalysisReport analyze_superposition_branch(const Branch& b, const SuperpositionParams& p) {
  const auto& s = *b.state;
  const bool minus = b.label == "Db_fires";
  std::vector<NamedSupport> supports;
  if (p.source_a.is_squeezed()) {
    supports = {{"mod4_0", "a", congruent(4, 0)}, {"mod4_2", "a", congruent(4, 2)}};
  } else {
    supports = {{"even", "a", congruent(2, 0)}, {"odd", "a", congruent(2, 1)}};
  }
  std::vector<NamedTarget> targets;
  for (const auto sign : {CatSign::Plus, CatSign::Minus}) {
    try {
      targets.push_back({sign == CatSign::Plus ? "cat_plus" : "cat_minus",
                         MultiModeState::single("a", p.source_a.cat(sign))});
    } catch (const ZeroStateError&) {
      // |src> - |-src> vanishes for r = 0 or alpha = 0.
    }
  }
  auto form = p.source_a.build_rotated(1, p.tau);
  form += (minus ? -1.0 : 1.0) * std::polar(1.0, p.theta) * p.source_a.build();
  if (form.norm() > kZeroThreshold) {
    targets.push_back({"conditional_form", MultiModeState::single("a", normalized(form))});
  }
  return analyze(s, std::sqrt(b.probability), supports, targets);
}

inline AnalysisReport analyze_entanglement_branch(const Branch& b, const EntanglementParams& p) {
  const bool minus = b.label == "Db_fires";
  auto rotated = tensor_product(MultiModeState::single("a", p.source_a.build_rotated(1, p.tau)),
                                MultiModeState::single("a2", p.source_a2.build_rotated(1, p.tau2)));
  const auto plain = tensor_product(MultiModeState::single("a", p.source_a.build()),
                                    MultiModeState::single("a2", p.source_a2.build()));
  rotated += (minus ? -1.0 : 1.0) * std::polar(1.0, p.theta) * plain;
  std::vector<NamedTarget> targets;
  if (rotated.norm() > kZeroThreshold) targets.push_back({"conditional_form", normalize(rotated).state});
  return analyze(*b.state, std::sqrt(b.probability), {}, targets, {"a"});
}

inline AnalysisReport analyze_circuit_branch(const Branch& b) {
  const auto& s = *b.state;
  std::vector<std::string> left;
  if (s.mode_count() >= 2) left = {s.labels().front()};
  return analyze(s, std::sqrt(b.probability), {}, {}, left);
}

}  // namespace detail

inline SuperpositionParams superposition_params(const RunConfig& c) {
  return {to_source_spec(c.source, c), c.tau, c.theta};
}

inline EntanglementParams entanglement_params(const RunConfig& c) {
  return {to_source_spec(c.source, c), to_source_spec(c.source2.value_or(c.source), c), c.tau, c.tau2, c.theta};
}

struct Report {
  json body;
  ProtocolResult result;
};

// Executes one configuration. Throws ConfigError (incl. CircuitError) for
// bad inputs and qoptics::Error for numerical failures.
inline Report run(const RunConfig& c) {
  validate(c);
  const RunOptions opt{c.trace};
  Report rep;
  std::vector<std::optional<AnalysisReport>> analyses;
  if (c.protocol && *c.protocol == "superposition") {
    const auto p = superposition_params(c);
    rep.result = run_superposition(p, opt);
    for (const auto& b : rep.result.branches) {
      analyses.push_back(b.state ? std::optional(detail::analyze_superposition_branch(b, p)) : std::nullopt);
    }
  } else if (c.protocol) {
    const auto p = entanglement_params(c);
    rep.result = run_entanglement(p, opt);
    for (const auto& b : rep.result.branches) {
      analyses.push_back(b.state ? std::optional(detail::analyze_entanglement_branch(b, p)) : std::nullopt);
    }
  } else {
    const auto text = load_circuit_text(c);
    const auto parsed = dsl::parse(text);
    if (!parsed.ok()) {
      std::string msg;
      for (const auto& d : parsed.diagnostics) msg += dsl::render(d, c.circuit_path.value_or("<inline>"));
      throw CircuitError(msg);
    }
    rep.result = run_circuit(*parsed.program, opt, c.epsilon);
    for (const auto& d : parsed.diagnostics) rep.result.warnings.push_back(dsl::render(d, c.circuit_path.value_or("<inline>")));
    for (const auto& b : rep.result.branches) {
      analyses.push_back(b.state ? std::optional(detail::analyze_circuit_branch(b)) : std::nullopt);
    }
  }

  json& j = rep.body;
  j["schema"] = kSchemaTag;
  j["config"] = detail::config_json(c);
  j["input_norm2"] = rep.result.input_norm2;
  j["branches"] = json::array();
  for (std::size_t i = 0; i < rep.result.branches.size(); ++i) {
    j["branches"].push_back(detail::branch_json(rep.result.branches[i], analyses[i]));
  }
  j["warnings"] = rep.result.warnings;
  if (c.trace) {
    j["trace"] = json::array();
    for (const auto& t : rep.result.trace) j["trace"].push_back(detail::state_json(t.label, t.state));
  }
  return rep;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// --- sweeps --------------------------------------------------------------

inline bool is_source2_param(const std::string& name) {
  return name == "r2" || name == "phi2" || name == "alpha2_re" || name == "alpha2_im";
}

// Field addressed by a sweepable parameter name. Source-2 names require
// `c.source2` to be set.
inline double& param_ref(RunConfig& c, const std::string& name) {
  if (name == "r") return c.source.r;
  if (name == "phi") return c.source.phi;
  if (name == "alpha_re") return c.source.alpha_re;
  if (name == "alpha_im") return c.source.alpha_im;
  if (name == "tau") return c.tau;
  if (name == "tau2") return c.tau2;
  if (name == "theta") return c.theta;
  if (!c.source2) throw ConfigError("parameter '" + name + "' needs a second source");
  if (name == "r2") return c.source2->r;
  if (name == "phi2") return c.source2->phi;
  if (name == "alpha2_re") return c.source2->alpha_re;
  if (name == "alpha2_im") return c.source2->alpha_im;
  throw ConfigError("unknown parameter '" + name + "'");
}

struct GridPoint {
  std::size_t index;
  RunConfig config;
  std::vector<std::pair<std::string, double>> values;
};

// Cartesian grid, first axis varying slowest. An unset second source
// mirrors the primary one (after its overrides) unless a source-2
// parameter is swept, in which case it starts from the overridden primary.
inline std::vector<GridPoint> grid(const RunConfig& base) {
  std::size_t total = 1;
  for (const auto& ax : base.sweeps) total *= ax.steps;
  std::vector<GridPoint> pts;
  pts.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    GridPoint gp{idx, base, {}};
    gp.config.sweeps.clear();
    std::vector<std::size_t> coord(base.sweeps.size());
    std::size_t rem = idx;
    for (std::size_t a = base.sweeps.size(); a-- > 0;) {
      coord[a] = rem % base.sweeps[a].steps;
      rem /= base.sweeps[a].steps;
    }
    for (std::size_t a = 0; a < base.sweeps.size(); ++a) {
      gp.values.emplace_back(base.sweeps[a].param, base.sweeps[a].value(coord[a]));
    }
    for (const auto& [name, v] : gp.values) {
      if (!is_source2_param(name)) param_ref(gp.config, name) = v;
    }
    for (const auto& [name, v] : gp.values) {
      if (!is_source2_param(name)) continue;
      if (!gp.config.source2) gp.config.source2 = gp.config.source;
      param_ref(gp.config, name) = v;
    }
    pts.push_back(std::move(gp));
  }
  return pts;
}

struct PointResult {
  bool done = false;
  std::optional<Report> report;
  std::string error;
};

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "index", "r",    "phi",   "alpha_re", "alpha_im",    "r2",          "phi2",       "alpha2_re",  "alpha2_im",
      "tau",   "tau2", "theta", "cutoff",   "p_Db",        "p_Dc",        "fidelity_Db", "fidelity_Dc", "entropy_Db",
      "entropy_Dc", "error"};
  return cols;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

inline std::string branch_field(const json& body, const std::string& label, const std::string& what,
                                const std::string& protocol) {
  for (const auto& b : body.at("branches")) {
    if (b.at("label") != label) continue;
    if (what == "probability") return dsl::format_double(b.at("probability").get<double>());
    if (!b.contains("fidelity")) return "";
    if (what == "fidelity") {
      const std::string key = protocol == "entanglement" ? "conditional_form"
                              : label == "Db_fires"      ? "cat_minus"
                                                         : "cat_plus";
      const auto& f = b.at("fidelity");
      return f.contains(key) ? dsl::format_double(f.at(key).get<double>()) : "";
    }
    if (what == "entropy") {
      const auto& e = b.at("schmidt_entropy");
      return e.is_null() ? "" : dsl::format_double(e.get<double>());
    }
  }
  return "";
}

}  // namespace detail

inline std::string csv_row(const GridPoint& gp, const PointResult& pr) {
  const auto& c = gp.config;
  const auto s2 = c.source2.value_or(c.source);
  const std::string protocol = c.protocol.value_or("");
  const bool ent = protocol == "entanglement";
  auto f = [](double v) { return dsl::format_double(v); };
  std::vector<std::string> cells = {std::to_string(gp.index), f(c.source.r), f(c.source.phi), f(c.source.alpha_re),
                                    f(c.source.alpha_im), ent ? f(s2.r) : "", ent ? f(s2.phi) : "",
                                    ent ? f(s2.alpha_re) : "", ent ? f(s2.alpha_im) : "", f(c.tau),
                                    ent ? f(c.tau2) : "", f(c.theta), c.cutoff ? std::to_string(*c.cutoff) : ""};
  if (pr.report) {
    const auto& body = pr.report->body;
    for (const auto* what : {"probability", "fidelity", "entropy"}) {
      for (const auto* label : {"Db_fires", "Dc_fires"}) cells.push_back(detail::branch_field(body, label, what, protocol));
    }
    cells.push_back("");
  } else {
    for (int i = 0; i < 6; ++i) cells.emplace_back();
    cells.push_back(detail::csv_escape(pr.error));
  }
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ",";
    line += cells[i];
  }
  return line + "\n";
}

inline std::string json_record(const GridPoint& gp, const PointResult& pr) {
  json point = {{"index", gp.index}};
  json params = json::object();
  for (const auto& [k, v] : gp.values) params[k] = v;
  point["params"] = params;
  json rec;
  if (pr.report) {
    rec = pr.report->body;
  } else {
    rec = {{"schema", kSchemaTag}, {"config", detail::config_json(gp.config)}, {"error", pr.error}};
  }
  rec["point"] = point;
  return rec.dump() + "\n";
}

// Evaluates every grid point with `workers` threads and returns the output
// text in grid order. When `cancel` becomes true, unstarted points are
// skipped and only completed ones are emitted.
inline std::string sweep(const RunConfig& base, const std::atomic<bool>* cancel = nullptr) {
  validate(base);
  const auto pts = grid(base);
  std::vector<PointResult> results(pts.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      if (cancel && cancel->load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= pts.size()) return;
      PointResult pr;
      try {
        pr.report = run(pts[i].config);
      } catch (const std::exception& e) {
        pr.error = e.what();
      }
      pr.done = true;
      results[i] = std::move(pr);
    }
  };
  const std::size_t n = std::min<std::size_t>(std::max<std::size_t>(base.workers, 1), std::max<std::size_t>(pts.size(), 1));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();

  std::string out;
  const bool csv = base.format == "csv";
  if (csv) {
    for (std::size_t i = 0; i < csv_columns().size(); ++i) out += (i ? "," : "") + csv_columns()[i];
    out += "\n";
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!results[i].done) continue;
    out += csv ? csv_row(pts[i], results[i]) : json_record(pts[i], results[i]);
  }
  return out;
}

}  // namespace qoptics::runner
