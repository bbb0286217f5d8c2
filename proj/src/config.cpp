#include "nmchaos/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "nmchaos/csv_io.hpp"
#include "nmchaos/presets.hpp"

namespace nmchaos {

namespace {

const toml::Table kEmpty;

class Section {
 public:
  Section(const toml::Document& doc, std::string name) : name_(std::move(name)) {
    const auto it = doc.tables.find(name_);
    table_ = it == doc.tables.end() ? &kEmpty : &it->second;
  }

  std::string qualified(std::string_view key) const { return name_ + "." + std::string(key); }

  const toml::Value* find(std::string_view key) {
    const auto it = table_->find(key);
    if (it == table_->end()) return nullptr;
    used_.insert(std::string(key));
    return &it->second;
  }

  void real(std::string_view key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) throw ValidationError(qualified(key) + " must be a real number");
      out = v->as_number();
    }
  }

  void count(std::string_view key, std::size_t& out) {
    if (const auto* v = find(key)) {
      if (!v->is_int() || v->as_int() < 0)
        throw ValidationError(qualified(key) + " must be a non-negative integer");
      out = static_cast<std::size_t>(v->as_int());
    }
  }

  void integer(std::string_view key, int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_int() || v->as_int() < std::numeric_limits<int>::min() ||
          v->as_int() > std::numeric_limits<int>::max())
        throw ValidationError(qualified(key) + " must be an integer");
      out = static_cast<int>(v->as_int());
    }
  }

  std::optional<std::string> string(std::string_view key) {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ValidationError(qualified(key) + " must be a string");
    return v->as_string();
  }

  std::optional<std::vector<double>> reals(std::string_view key) {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) throw ValidationError(qualified(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v->as_array()) {
      if (!e.is_number()) throw ValidationError(qualified(key) + " must be an array of numbers");
      out.push_back(e.as_number());
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(std::string_view key) {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) throw ValidationError(qualified(key) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v->as_array()) {
      if (!e.is_string()) throw ValidationError(qualified(key) + " must be an array of strings");
      out.push_back(e.as_string());
    }
    return out;
  }

  void reject_unknown(bool lenient) const {
    if (lenient) return;
    for (const auto& [key, value] : *table_)
      if (!used_.count(key))
        throw UnknownKey("unknown key '" + qualified(key) + "' (line " + std::to_string(value.line) +
                         ")");
  }

 private:
  std::string name_;
  const toml::Table* table_;
  std::set<std::string, std::less<>> used_;
};

const std::set<std::string, std::less<>> kSections = {"system",      "environment", "initial",
                                                      "integration", "model",       "lyapunov",
                                                      "sweep"};

// "axis1" for "axis1", "axis1_min", ...; empty otherwise.
std::string axis_prefix(std::string_view key) {
  for (std::string p : {"axis1", "axis2"})
    if (key == p || key.starts_with(p + "_")) return p;
  return {};
}

// Keys of the preset's axis definitions that a user key supersedes: a new
// axis name drops the whole preset axis, explicit values drop the preset
// range and range keys drop preset values.
bool superseded(std::string_view preset_key, const toml::Table& user) {
  const std::string p = axis_prefix(preset_key);
  if (p.empty()) return false;
  if (user.count(p)) return true;
  const bool is_values = preset_key == p + "_values";
  if (is_values) {
    for (const auto& [key, value] : user)
      if (axis_prefix(key) == p && key != p + "_values") return true;
    return false;
  }
  return preset_key != p && user.count(p + "_values");
}

toml::Document overlay(toml::Document base, const toml::Document& top) {
  for (const auto& [name, table] : top.tables) {
    auto& dst = base.tables[name];
    if (name == "sweep")
      for (auto it = dst.begin(); it != dst.end();)
        it = superseded(it->first, table) ? dst.erase(it) : std::next(it);
    for (const auto& [key, value] : table) dst.insert_or_assign(key, value);
  }
  return base;
}

void read_system(Section s, SystemParams& p, bool lenient) {
  s.real("omega1", p.omega1);
  s.real("omega2", p.omega2);
  s.real("omega_c", p.omega_c);
  s.real("g1", p.g1);
  s.real("g2", p.g2);
  for (auto [key, dst] : {std::pair{"kappa1", &p.kappa1}, std::pair{"kappa2", &p.kappa2}}) {
    const auto* v = s.find(key);
    if (!v) continue;
    if (!v->is_number()) throw ValidationError(s.qualified(key) + " must be real");
    *dst = v->as_number();
  }
  s.reject_unknown(lenient);
}

void read_environment(Section s, EnvParams& p, bool lenient) {
  s.real("big_gamma", p.big_gamma);
  s.real("gamma", p.gamma);
  s.real("big_omega", p.big_omega);
  if (s.find("tau")) {
    if (s.find("gamma")) throw ValidationError("environment.tau and environment.gamma are exclusive");
    double tau = 0;
    s.real("tau", tau);
    if (!(tau > 0)) throw ValidationError("environment.tau must be > 0");
    p.gamma = 1.0 / tau;
  }
  s.reject_unknown(lenient);
}

void read_initial(Section s, ObservableState& p, bool lenient) {
  s.real("q1", p.q1);
  s.real("q2", p.q2);
  s.real("p1", p.p1);
  s.real("p2", p.p2);
  s.real("n", p.n);
  s.reject_unknown(lenient);
}

void read_integration(Section s, IntegrationSettings& p, bool lenient) {
  s.real("t_max", p.t_max);
  s.real("dt_out", p.dt_out);
  s.real("rel_tol", p.rel_tol);
  s.real("abs_tol", p.abs_tol);
  s.reject_unknown(lenient);
}

void read_model(Section s, ModelToggles& p, bool lenient) {
  s.integer("damping_factor", p.damping_factor);
  if (auto h = s.string("harmonic_placement")) p.harmonic_placement = parse_harmonic_placement(*h);
  s.reject_unknown(lenient);
}

void read_lyapunov(Section s, LyapunovConfig& p, bool lenient) {
  if (auto m = s.string("method")) p.method = parse_le_method(*m);
  s.count("embed_dim", p.embedding.dim);
  std::size_t delay = p.embedding.delay.value_or(0);
  s.count("delay", delay);
  p.embedding.delay = delay == 0 ? std::nullopt : std::optional(delay);
  if (const auto* v = s.find("theiler")) {
    if (v->is_string() && v->as_string() == "auto") {
      p.embedding.theiler.reset();
    } else if (v->is_int() && v->as_int() >= 0) {
      p.embedding.theiler = static_cast<std::size_t>(v->as_int());
    } else {
      throw ValidationError("lyapunov.theiler must be a non-negative integer or \"auto\"");
    }
  }
  s.real("epsilon_frac", p.embedding.epsilon_frac);
  s.count("evolve_steps", p.embedding.evolve_steps);
  s.real("delta0", p.delta0);
  s.real("renorm_dt", p.renorm_dt);
  s.reject_unknown(lenient);
}

std::optional<SweepAxis> read_axis(Section& s, const std::string& p) {
  const auto name = s.string(p);
  auto values = s.reals(p + "_values");
  double lo = 0, hi = 0;
  std::size_t count = 0;
  const bool ranged = s.find(p + "_min") || s.find(p + "_max") || s.find(p + "_count") ||
                      s.find(p + "_spacing");
  if (!name) {
    if (values || ranged) throw ValidationError("sweep." + p + " (parameter name) is missing");
    return std::nullopt;
  }
  if (values && ranged)
    throw ValidationError("sweep." + p + "_values excludes " + p + "_min/_max/_count/_spacing");
  if (!values) {
    if (!s.find(p + "_min") || !s.find(p + "_max") || !s.find(p + "_count"))
      throw ValidationError("sweep." + p + " needs " + p + "_values or " + p + "_min/_max/_count");
    s.real(p + "_min", lo);
    s.real(p + "_max", hi);
    s.count(p + "_count", count);
    const std::string spacing = s.string(p + "_spacing").value_or("linear");
    if (count == 0) throw ValidationError("sweep." + p + "_count must be >= 1");
    if (!(hi >= lo)) throw ValidationError("sweep." + p + "_max must be >= " + p + "_min");
    if (spacing == "linear") {
      values = linear_spaced(lo, hi, count);
    } else if (spacing == "log") {
      if (!(lo > 0)) throw ValidationError("sweep." + p + "_min must be > 0 for log spacing");
      values = log_spaced(lo, hi, count);
    } else {
      throw ValidationError("sweep." + p + "_spacing must be \"linear\" or \"log\"");
    }
  }
  return SweepAxis{*name, std::move(*values)};
}

void read_sweep(Section s, SweepConfig& p, bool lenient) {
  if (auto f = s.string("figure")) p.figure = parse_figure(*f);
  p.axes.clear();
  auto a1 = read_axis(s, "axis1");
  auto a2 = read_axis(s, "axis2");
  if (a2 && !a1) throw ValidationError("sweep.axis2 requires sweep.axis1");
  if (a1) p.axes.push_back(std::move(*a1));
  if (a2) p.axes.push_back(std::move(*a2));
  if (auto o = s.strings("observables")) p.observables = std::move(*o);
  if (auto g = s.strings("max_group")) p.max_group = std::move(*g);
  if (auto w = s.reals("window")) {
    if (w->size() != 2) throw ValidationError("sweep.window must be [lo, hi]");
    p.window = std::pair{(*w)[0], (*w)[1]};
  }
  s.real("record_dt", p.record_dt);
  s.count("threads", p.threads);
  s.reject_unknown(lenient);
}

}  // namespace

void RunConfig::validate() const {
  system.validate();
  environment.validate();
  if (!initial.all_finite()) throw ValidationError("initial values must be finite");
  integration.validate();
  model.validate();
  lyapunov.embedding.validate();
  to_benettin_settings(*this).validate();
  if (sweep.threads < 1) throw ValidationError("sweep.threads must be >= 1");
  if (!(sweep.record_dt >= 0) || !std::isfinite(sweep.record_dt))
    throw ValidationError("sweep.record_dt must be >= 0");
  if (sweep.window && !(sweep.window->first < sweep.window->second))
    throw ValidationError("sweep.window requires lo < hi");
  if (!sweep.axes.empty()) to_sweep_spec(*this).validate();
}

RunConfig parse_config_text(std::string_view text, const ConfigOptions& options) {
  toml::Document doc = toml::parse(text);
  if (options.figure) {
    if (*options.figure != Figure::custom) doc = overlay(toml::parse(preset_text(*options.figure)), doc);
    doc.tables["sweep"].insert_or_assign("figure", toml::Value{std::string(to_string(*options.figure))});
  }

  if (!options.lenient)
    for (const auto& [name, table] : doc.tables)
      if (!name.empty() && !kSections.count(name)) throw UnknownKey("unknown table [" + name + "]");
  if (!options.lenient && doc.tables.count(""))
    for (const auto& [key, value] : doc.tables.at(""))
      throw UnknownKey("unknown top-level key '" + key + "' (line " + std::to_string(value.line) + ")");

  RunConfig c;
  read_system(Section(doc, "system"), c.system, options.lenient);
  read_environment(Section(doc, "environment"), c.environment, options.lenient);
  read_initial(Section(doc, "initial"), c.initial, options.lenient);
  read_integration(Section(doc, "integration"), c.integration, options.lenient);
  read_model(Section(doc, "model"), c.model, options.lenient);
  read_lyapunov(Section(doc, "lyapunov"), c.lyapunov, options.lenient);
  read_sweep(Section(doc, "sweep"), c.sweep, options.lenient);
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& path, const ConfigOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), options);
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  auto num = [](double v) { return format_double(v); };
  auto list = [&](const auto& xs, auto fmt) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
    return out + "]";
  };
  auto str = [](const std::string& s) { return toml::quote(s); };

  os << "[system]\n"
     << "omega1 = " << num(c.system.omega1) << "\nomega2 = " << num(c.system.omega2)
     << "\nomega_c = " << num(c.system.omega_c) << "\ng1 = " << num(c.system.g1)
     << "\ng2 = " << num(c.system.g2) << "\nkappa1 = " << num(c.system.kappa1)
     << "\nkappa2 = " << num(c.system.kappa2) << "\n\n";
  os << "[environment]\n"
     << "big_gamma = " << num(c.environment.big_gamma) << "\ngamma = " << num(c.environment.gamma)
     << "\nbig_omega = " << num(c.environment.big_omega) << "\n\n";
  os << "[initial]\n"
     << "q1 = " << num(c.initial.q1) << "\nq2 = " << num(c.initial.q2) << "\np1 = "
     << num(c.initial.p1) << "\np2 = " << num(c.initial.p2) << "\nn = " << num(c.initial.n)
     << "\n\n";
  os << "[integration]\n"
     << "t_max = " << num(c.integration.t_max) << "\ndt_out = " << num(c.integration.dt_out)
     << "\nrel_tol = " << num(c.integration.rel_tol) << "\nabs_tol = " << num(c.integration.abs_tol)
     << "\n\n";
  os << "[model]\n"
     << "damping_factor = " << c.model.damping_factor << "\nharmonic_placement = "
     << str(std::string(to_string(c.model.harmonic_placement))) << "\n\n";
  const auto& e = c.lyapunov.embedding;
  os << "[lyapunov]\n"
     << "method = " << str(std::string(to_string(c.lyapunov.method))) << "\nembed_dim = " << e.dim
     << "\ndelay = " << e.delay.value_or(0) << "\ntheiler = "
     << (e.theiler ? std::to_string(*e.theiler) : str("auto"))
     << "\nepsilon_frac = " << num(e.epsilon_frac) << "\nevolve_steps = " << e.evolve_steps
     << "\ndelta0 = " << num(c.lyapunov.delta0) << "\nrenorm_dt = " << num(c.lyapunov.renorm_dt)
     << "\n\n";
  os << "[sweep]\n"
     << "figure = " << str(std::string(to_string(c.sweep.figure))) << '\n';
  for (std::size_t a = 0; a < c.sweep.axes.size(); ++a) {
    const std::string p = "axis" + std::to_string(a + 1);
    os << p << " = " << str(c.sweep.axes[a].name) << '\n'
       << p << "_values = " << list(c.sweep.axes[a].values, num) << '\n';
  }
  os << "observables = " << list(c.sweep.observables, str) << '\n'
     << "max_group = " << list(c.sweep.max_group, str) << '\n';
  if (c.sweep.window)
    os << "window = [" << num(c.sweep.window->first) << ", " << num(c.sweep.window->second) << "]\n";
  os << "record_dt = " << num(c.sweep.record_dt) << '\n' << "threads = " << c.sweep.threads << '\n';
  return os.str();
}

SweepSpec to_sweep_spec(const RunConfig& c) {
  SweepSpec s;
  s.figure = c.sweep.figure;
  s.sys = c.system;
  s.env = c.environment;
  s.init = c.initial;
  s.integration = c.integration;
  s.toggles = c.model;
  s.method = c.lyapunov.method;
  s.embedding = c.lyapunov.embedding;
  s.benettin = to_benettin_settings(c);
  s.axes = c.sweep.axes;
  s.observables = c.sweep.observables;
  s.max_group = c.sweep.max_group;
  s.window = c.sweep.window;
  s.record_dt = c.sweep.record_dt;
  s.threads = c.sweep.threads;
  return s;
}

BenettinSettings to_benettin_settings(const RunConfig& c) {
  BenettinSettings b;
  b.delta0 = c.lyapunov.delta0;
  b.renorm_dt = c.lyapunov.renorm_dt;
  b.horizon = c.integration.t_max;
  b.ode.rel_tol = c.integration.rel_tol;
  b.ode.abs_tol = c.integration.abs_tol;
  return b;
}

FullState initial_state(const RunConfig& c) {
  FullState s;
  s.obs = c.initial;
  return s;
}

}  // namespace nmchaos
