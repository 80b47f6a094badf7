#include "phdmd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "phdmd/error.hpp"

namespace phdmd {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  fail(ErrorKind::Config, "config: " + field + ": " + what);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) config_error(join(where, it.key()), "unknown field");
  }
}

const json& object_at(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_object()) config_error(join(where, key), "expected an object");
  return v;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) config_error(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(field, "must be finite");
  return d;
}

long long integer(const json& v, const std::string& field) {
  if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  config_error(field, "expected an integer");
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) config_error(field, "expected true or false");
  return v.get<bool>();
}

std::string string(const json& v, const std::string& field) {
  if (!v.is_string()) config_error(field, "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& field) {
  if (!v.is_array()) config_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <class F>
void maybe(const json& obj, const char* key, F&& f) {
  if (obj.contains(key)) f(obj.at(key));
}

InputSignal parse_signal(const json& v, const std::string& field) {
  if (v.is_string()) return parse_signal(json{{"kind", v}}, field);
  if (!v.is_object()) config_error(field, "expected an input object or kind name");
  reject_unknown(v, field, {"kind", "amplitude", "times", "values"});
  if (!v.contains("kind")) config_error(join(field, "kind"), "missing");
  const std::string kind = string(v.at("kind"), join(field, "kind"));
  InputSignal sig;
  if (kind == "zero") {
    sig = InputSignal::zero();
  } else if (kind == "exp_sin") {
    sig = InputSignal::exp_sin();
  } else if (kind == "exp_cos") {
    sig = InputSignal::exp_cos();
  } else if (kind == "step_chirp") {
    sig = InputSignal::step_chirp();
  } else if (kind == "table") {
    if (!v.contains("times") || !v.contains("values")) {
      config_error(field, "table input needs \"times\" and \"values\"");
    }
    try {
      sig = InputSignal::table(number_list(v.at("times"), join(field, "times")),
                               number_list(v.at("values"), join(field, "values")));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config) throw;
      config_error(field, e.what());
    }
  } else {
    config_error(join(field, "kind"),
                 "unknown input kind \"" + kind +
                     "\" (expected zero, exp_sin, exp_cos, step_chirp or table)");
  }
  maybe(v, "amplitude", [&](const json& a) { sig.amplitude = number(a, join(field, "amplitude")); });
  return sig;
}

InputSpec parse_inputs(const json& v, const std::string& field) {
  if (!v.is_array()) config_error(field, "expected an array with one input per port");
  InputSpec out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(parse_signal(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

const char* kind_name(InputSignal::Kind k) {
  switch (k) {
    case InputSignal::Kind::Zero: return "zero";
    case InputSignal::Kind::ExpSin: return "exp_sin";
    case InputSignal::Kind::ExpCos: return "exp_cos";
    case InputSignal::Kind::StepChirp: return "step_chirp";
    case InputSignal::Kind::Table: return "table";
  }
  return "zero";
}

json signal_json(const InputSignal& s) {
  json j{{"kind", kind_name(s.kind)}, {"amplitude", s.amplitude}};
  if (s.kind == InputSignal::Kind::Table) {
    j["times"] = s.times;
    j["values"] = s.values;
  }
  return j;
}

json inputs_json(const InputSpec& spec) {
  json arr = json::array();
  for (const auto& s : spec) arr.push_back(signal_json(s));
  return arr;
}

void apply(ExperimentConfig& cfg, const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) config_error("<root>", "expected a JSON object");
  reject_unknown(doc, "", {"preset", "name", "model", "integration", "inputs", "noise",
                           "reduction", "sweep", "methods", "solver", "frequency",
                           "truncation_tol"});
  maybe(doc, "name", [&](const json& v) { cfg.name = string(v, "name"); });

  if (doc.contains("model")) {
    const json& m = object_at(doc, "model", "");
    reject_unknown(m, "model",
                   {"builder", "n_masses", "mass", "stiffness", "damping", "n_ports", "manifest"});
    maybe(m, "builder", [&](const json& v) {
      const std::string b = string(v, "model.builder");
      if (b != "msd") config_error("model.builder", "unknown builder \"" + b + "\" (expected msd)");
      cfg.model.manifest.reset();
    });
    maybe(m, "n_masses", [&](const json& v) { cfg.model.n_masses = static_cast<int>(integer(v, "model.n_masses")); });
    maybe(m, "mass", [&](const json& v) { cfg.model.mass = number(v, "model.mass"); });
    maybe(m, "stiffness", [&](const json& v) { cfg.model.stiffness = number(v, "model.stiffness"); });
    maybe(m, "damping", [&](const json& v) { cfg.model.damping = number(v, "model.damping"); });
    maybe(m, "n_ports", [&](const json& v) { cfg.model.n_ports = static_cast<int>(integer(v, "model.n_ports")); });
    maybe(m, "manifest", [&](const json& v) {
      if (m.contains("builder")) config_error("model", "give either builder or manifest, not both");
      std::filesystem::path p = string(v, "model.manifest");
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      cfg.model.manifest = p;
    });
  }

  if (doc.contains("integration")) {
    const json& g = object_at(doc, "integration", "");
    reject_unknown(g, "integration", {"dt", "horizon", "test_horizon", "x0"});
    maybe(g, "dt", [&](const json& v) { cfg.dt = number(v, "integration.dt"); });
    maybe(g, "horizon", [&](const json& v) { cfg.horizon = number(v, "integration.horizon"); });
    maybe(g, "test_horizon", [&](const json& v) { cfg.test_horizon = number(v, "integration.test_horizon"); });
    maybe(g, "x0", [&](const json& v) { cfg.x0 = number_list(v, "integration.x0"); });
  }

  if (doc.contains("inputs")) {
    const json& in = object_at(doc, "inputs", "");
    reject_unknown(in, "inputs", {"train", "test"});
    maybe(in, "train", [&](const json& v) { cfg.train_inputs = parse_inputs(v, "inputs.train"); });
    maybe(in, "test", [&](const json& v) { cfg.test_inputs = parse_inputs(v, "inputs.test"); });
  }

  if (doc.contains("noise")) {
    const json& nz = object_at(doc, "noise", "");
    reject_unknown(nz, "noise", {"stddev", "seed"});
    maybe(nz, "stddev", [&](const json& v) { cfg.noise_stddev = number(v, "noise.stddev"); });
    maybe(nz, "seed", [&](const json& v) {
      const long long s = integer(v, "noise.seed");
      if (s < 0) config_error("noise.seed", "must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    });
  }

  maybe(doc, "reduction", [&](const json& v) {
    if (v.is_null()) {
      cfg.reduced_order.reset();
      return;
    }
    if (!v.is_object()) config_error("reduction", "expected an object or null");
    reject_unknown(v, "reduction", {"r"});
    if (!v.contains("r") || v.at("r").is_null()) {
      cfg.reduced_order.reset();
    } else {
      cfg.reduced_order = static_cast<int>(integer(v.at("r"), "reduction.r"));
    }
  });

  maybe(doc, "sweep", [&](const json& v) {
    if (!v.is_array()) config_error("sweep", "expected an array of reduced orders");
    cfg.sweep.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      cfg.sweep.push_back(static_cast<int>(integer(v[i], "sweep[" + std::to_string(i) + "]")));
    }
  });

  maybe(doc, "methods", [&](const json& v) {
    if (!v.is_array()) config_error("methods", "expected an array of method names");
    cfg.methods.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      cfg.methods.push_back(string(v[i], "methods[" + std::to_string(i) + "]"));
    }
  });

  if (doc.contains("solver")) {
    const json& s = object_at(doc, "solver", "");
    reject_unknown(s, "solver", {"epsilon", "max_iters", "alpha1", "restart", "shrink",
                                 "max_halvings", "armijo"});
    auto& o = cfg.solver;
    maybe(s, "epsilon", [&](const json& v) { o.epsilon = number(v, "solver.epsilon"); });
    maybe(s, "max_iters", [&](const json& v) { o.max_iters = static_cast<int>(integer(v, "solver.max_iters")); });
    maybe(s, "alpha1", [&](const json& v) { o.alpha1 = number(v, "solver.alpha1"); });
    maybe(s, "restart", [&](const json& v) { o.restart = boolean(v, "solver.restart"); });
    maybe(s, "shrink", [&](const json& v) { o.shrink = number(v, "solver.shrink"); });
    maybe(s, "max_halvings", [&](const json& v) { o.max_halvings = static_cast<int>(integer(v, "solver.max_halvings")); });
    maybe(s, "armijo", [&](const json& v) { o.armijo = number(v, "solver.armijo"); });
  }

  if (doc.contains("frequency")) {
    const json& f = object_at(doc, "frequency", "");
    reject_unknown(f, "frequency", {"lo", "hi", "count"});
    maybe(f, "lo", [&](const json& v) { cfg.frequency.lo = number(v, "frequency.lo"); });
    maybe(f, "hi", [&](const json& v) { cfg.frequency.hi = number(v, "frequency.hi"); });
    maybe(f, "count", [&](const json& v) { cfg.frequency.count = static_cast<int>(integer(v, "frequency.count")); });
  }

  maybe(doc, "truncation_tol", [&](const json& v) {
    cfg.truncation_tol = number(v, "truncation_tol");
    cfg.solver.truncation_tol = cfg.truncation_tol;
  });
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Eigen::Index ExperimentConfig::train_steps() const {
  return static_cast<Eigen::Index>(std::llround(horizon / dt));
}

Eigen::Index ExperimentConfig::test_steps() const {
  return static_cast<Eigen::Index>(std::llround(test_horizon / dt));
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"msd-siso", "msd-noisy", "msd-mimo-reduction"};
  return names;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.train_inputs = {InputSignal::exp_sin()};
  cfg.test_inputs = {InputSignal::step_chirp()};
  if (name == "msd-siso") return cfg;
  if (name == "msd-noisy") {
    cfg.noise_stddev = 1e-4;
    cfg.seed = 20220617;
    return cfg;
  }
  if (name == "msd-mimo-reduction") {
    cfg.model.n_masses = 50;
    cfg.model.n_ports = 2;
    cfg.dt = 1e-3;
    // Waves need time to travel down the chain; 20 s gives the state snapshots
    // numerical rank above 30.
    cfg.horizon = 20.0;
    cfg.test_horizon = 20.0;
    cfg.train_inputs = {InputSignal::exp_sin(), InputSignal::exp_cos()};
    cfg.test_inputs = {InputSignal::step_chirp(), InputSignal::step_chirp(0.5)};
    cfg.reduced_order = 20;
    for (int r = 2; r <= 20; r += 2) cfg.sweep.push_back(r);
    cfg.methods = {"phdmd", "oi"};
    return cfg;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  fail(ErrorKind::Config, "unknown preset \"" + name + "\" (known: " + known + ")");
}

void check_config(const ExperimentConfig& cfg) {
  if (!(cfg.dt > 0.0)) config_error("integration.dt", "must be positive");
  if (!(cfg.horizon > 0.0)) config_error("integration.horizon", "must be positive");
  if (!(cfg.test_horizon > 0.0)) config_error("integration.test_horizon", "must be positive");
  if (cfg.train_steps() < 1) config_error("integration.horizon", "shorter than one time step");
  if (cfg.test_steps() < 1) config_error("integration.test_horizon", "shorter than one time step");
  if (!cfg.model.manifest) {
    if (cfg.model.n_masses < 1) config_error("model.n_masses", "must be at least 1");
    if (!(cfg.model.mass > 0.0)) config_error("model.mass", "must be positive");
    if (!(cfg.model.stiffness > 0.0)) config_error("model.stiffness", "must be positive");
    if (!(cfg.model.damping >= 0.0)) config_error("model.damping", "must be non-negative");
    if (cfg.model.n_ports != 1 && cfg.model.n_ports != 2) config_error("model.n_ports", "must be 1 or 2");
    if (cfg.model.n_ports == 2 && cfg.model.n_masses < 2) {
      config_error("model.n_ports", "two ports need at least two masses");
    }
    const auto ports = static_cast<std::size_t>(cfg.model.n_ports);
    if (cfg.train_inputs.size() != ports) {
      config_error("inputs.train", "expected " + std::to_string(ports) + " inputs, got " +
                                       std::to_string(cfg.train_inputs.size()));
    }
    if (cfg.test_inputs.size() != ports) {
      config_error("inputs.test", "expected " + std::to_string(ports) + " inputs, got " +
                                      std::to_string(cfg.test_inputs.size()));
    }
    if (!cfg.x0.empty() && cfg.x0.size() != static_cast<std::size_t>(2 * cfg.model.n_masses)) {
      config_error("integration.x0", "expected " + std::to_string(2 * cfg.model.n_masses) +
                                         " entries, got " + std::to_string(cfg.x0.size()));
    }
  }
  if (cfg.train_inputs.size() != cfg.test_inputs.size()) {
    config_error("inputs", "train and test need the same number of inputs");
  }
  if (!(cfg.noise_stddev >= 0.0)) config_error("noise.stddev", "must be non-negative");
  if (cfg.reduced_order && *cfg.reduced_order < 1) config_error("reduction.r", "must be at least 1");
  for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
    if (cfg.sweep[i] < 1) config_error("sweep[" + std::to_string(i) + "]", "must be at least 1");
  }
  if (cfg.methods.empty()) config_error("methods", "at least one method is required");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    const auto& m = cfg.methods[i];
    if (m != "phdmd" && m != "dmd" && m != "oi") {
      config_error("methods[" + std::to_string(i) + "]",
                   "unknown method \"" + m + "\" (expected phdmd, dmd or oi)");
    }
    if (!seen.insert(m).second) config_error("methods[" + std::to_string(i) + "]", "duplicate");
  }
  try {
    check_options(cfg.solver);
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("config: ") + e.what());
  }
  if (!(cfg.frequency.lo > 0.0) || !(cfg.frequency.hi >= cfg.frequency.lo)) {
    config_error("frequency", "need 0 < lo <= hi");
  }
  if (cfg.frequency.count < 2) config_error("frequency.count", "must be at least 2");
  if (!(cfg.truncation_tol >= 0.0)) config_error("truncation_tol", "must be non-negative");
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    const auto pos = msg.find("parse error");
    if (pos != std::string::npos) msg = msg.substr(pos);
    fail(ErrorKind::Config, "config: syntax error at " + line_column(text, e.byte ? e.byte - 1 : 0) +
                                ": " + msg);
  }
  ExperimentConfig cfg;
  if (doc.is_object() && doc.contains("preset")) {
    cfg = preset(string(doc.at("preset"), "preset"));
  } else {
    cfg.train_inputs = {InputSignal::exp_sin()};
    cfg.test_inputs = {InputSignal::step_chirp()};
  }
  apply(cfg, doc, base_dir);
  check_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  if (cfg.model.manifest) {
    j["model"] = {{"manifest", cfg.model.manifest->string()}};
  } else {
    j["model"] = {{"builder", "msd"},           {"n_masses", cfg.model.n_masses},
                  {"mass", cfg.model.mass},      {"stiffness", cfg.model.stiffness},
                  {"damping", cfg.model.damping}, {"n_ports", cfg.model.n_ports}};
  }
  j["integration"] = {{"dt", cfg.dt}, {"horizon", cfg.horizon}, {"test_horizon", cfg.test_horizon},
                      {"x0", cfg.x0}};
  j["inputs"] = {{"train", inputs_json(cfg.train_inputs)}, {"test", inputs_json(cfg.test_inputs)}};
  j["noise"] = {{"stddev", cfg.noise_stddev}, {"seed", cfg.seed}};
  j["reduction"] = cfg.reduced_order ? json{{"r", *cfg.reduced_order}} : json(nullptr);
  j["sweep"] = cfg.sweep;
  j["methods"] = cfg.methods;
  const auto& o = cfg.solver;
  j["solver"] = {{"epsilon", o.epsilon}, {"max_iters", o.max_iters},       {"alpha1", o.alpha1},
                 {"restart", o.restart}, {"shrink", o.shrink},             {"max_halvings", o.max_halvings},
                 {"armijo", o.armijo}};
  j["frequency"] = {{"lo", cfg.frequency.lo}, {"hi", cfg.frequency.hi}, {"count", cfg.frequency.count}};
  j["truncation_tol"] = cfg.truncation_tol;
  return j.dump(2);
}

}  // namespace phdmd
