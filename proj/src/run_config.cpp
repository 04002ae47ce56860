#include "blackstock/run_config.hpp"

#include "blackstock/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

namespace blackstock {

using nlohmann::json;

namespace {

// Object section with a path for messages; every key must be consumed or
// listed, anything else is rejected.
class Section {
 public:
  Section(const json& node, std::string path, std::initializer_list<const char*> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("must be an object");
    for (const auto& [key, _] : node_.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) throw ConfigError("unknown key '" + key + "' in " + where());
    }
  }

  bool has(const char* key) const { return node_.contains(key); }
  const json& at(const char* key) const { return node_.at(key); }
  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(child(key) + " must be a number");
    return v.get<double>();
  }

  long long integer(const char* key, long long fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(child(key) + " must be an integer");
    return v.get<long long>();
  }

  std::string string(const char* key, std::string fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(child(key) + " must be a string");
    return v.get<std::string>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(child(key) + " must be true or false");
    return v.get<bool>();
  }

  std::vector<int> int_list(const char* key, std::vector<int> fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (v.is_number_integer()) return {v.get<int>()};
    if (!v.is_array()) throw ConfigError(child(key) + " must be an integer or a list of integers");
    std::vector<int> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError(child(key) + " must contain integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  std::vector<double> number_list(const char* key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(child(key) + " must be a number or a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(child(key) + " must contain numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<std::pair<double, double>> window(const char* key) const {
    if (!has(key)) return std::nullopt;
    const auto w = number_list(key, {});
    if (w.size() != 2 || !(w[0] < w[1])) throw ConfigError(child(key) + " must be [t_start, t_end] with t_start < t_end");
    return std::pair{w[0], w[1]};
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where() + " " + what); }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& node_;
  std::string path_;
};

template <class F>
void checked(const std::string& section, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(section + ": " + e.what());
  }
}

Grid parse_grid(const json& node) {
  Section s(node, "grid", {"dim", "extents", "modes"});
  auto extents = s.number_list("extents", {});
  auto modes = s.int_list("modes", {});
  std::size_t dim = s.has("dim") ? static_cast<std::size_t>(s.integer("dim", 1))
                                 : std::max<std::size_t>({1, extents.size(), modes.size()});
  if (dim < 1 || dim > 3) throw ConfigError("grid: grid dimension must be 1, 2 or 3");
  if (extents.empty()) extents.assign(dim, std::numbers::pi);
  if (modes.empty()) modes.assign(dim, 64);
  if (extents.size() == 1 && dim > 1) extents.assign(dim, extents[0]);
  if (modes.size() == 1 && dim > 1) modes.assign(dim, modes[0]);
  if (extents.size() != dim || modes.size() != dim) {
    throw ConfigError("grid: extents and modes must have dim = " + std::to_string(dim) + " entries");
  }
  std::optional<Grid> grid;
  checked("grid", [&] { grid.emplace(extents, modes); });
  return *grid;
}

MediumParams parse_medium(const json& node) {
  Section s(node, "medium", {"c", "b", "k", "sigma"});
  MediumParams p;
  p.c = s.number("c", p.c);
  p.b = s.number("b", p.b);
  p.k = s.number("k", p.k);
  p.sigma = s.number("sigma", p.sigma);
  checked("medium", [&] { p.validate(); });
  return p;
}

InitialDataSpec parse_initial_spec(const json& node, const std::string& path) {
  Section s(node, path, {"kind", "mode", "amplitude", "terms", "exponent"});
  const std::string kind = s.string("kind", "zero");
  InitialDataSpec spec;
  checked(path, [&] {
    if (kind == "zero") {
      spec = InitialDataSpec::zero();
    } else if (kind == "single_mode") {
      spec = InitialDataSpec::single_mode(s.int_list("mode", {1}), s.number("amplitude", 0.0));
    } else if (kind == "multi_mode") {
      if (!s.has("terms") || !s.at("terms").is_array()) throw ConfigError(path + ".terms must be a list");
      std::vector<ModeAmplitude> terms;
      for (const auto& t : s.at("terms")) {
        Section ts(t, path + ".terms[]", {"mode", "amplitude"});
        terms.push_back({ts.int_list("mode", {}), ts.number("amplitude", 0.0)});
      }
      spec = InitialDataSpec::multi_mode(std::move(terms));
    } else if (kind == "power_law") {
      spec = InitialDataSpec::power_law(s.number("exponent", 2.0), s.number("amplitude", 0.0));
    } else {
      throw ConfigError(path + ".kind '" + kind + "' is not one of zero, single_mode, multi_mode, power_law");
    }
    spec.validate();
  });
  return spec;
}

IntegratorSettings parse_integrator(const json& node) {
  Section s(node, "integrator",
            {"scheme", "dt", "T", "sample_every", "picard_tol", "picard_max_iter", "checkpoint_every"});
  IntegratorSettings out;
  checked("integrator", [&] {
    out.step.scheme = parse_scheme(s.string("scheme", to_string(out.step.scheme)));
    out.step.dt = s.number("dt", out.step.dt);
    out.step.picard_tol = s.number("picard_tol", out.step.picard_tol);
    out.step.picard_max_iter = static_cast<int>(s.integer("picard_max_iter", out.step.picard_max_iter));
    out.step.validate();
  });
  out.final_time = s.number("T", out.final_time);
  out.sample_every = static_cast<int>(s.integer("sample_every", out.sample_every));
  out.checkpoint_every = static_cast<int>(s.integer("checkpoint_every", out.checkpoint_every));
  if (!(out.final_time > 0.0)) throw ConfigError("integrator: final time T must be positive");
  if (out.sample_every < 1) throw ConfigError("integrator: sample_every must be at least 1");
  if (out.checkpoint_every < 0) throw ConfigError("integrator: checkpoint_every must be nonnegative");
  return out;
}

void parse_gammas(const json& node, RunConfig& cfg) {
  Section s(node, "gammas", {"gamma1", "gamma2", "gamma3", "calibrate"});
  cfg.gammas.gamma1 = s.number("gamma1", cfg.gammas.gamma1);
  cfg.gammas.gamma2 = s.number("gamma2", cfg.gammas.gamma2);
  cfg.gammas.gamma3 = s.number("gamma3", cfg.gammas.gamma3);
  cfg.calibrate_gammas = s.boolean("calibrate", false);
  checked("gammas", [&] { cfg.gammas.validate(); });
}

FitSettings parse_fit(const json& node) {
  Section s(node, "fit", {"window", "series"});
  FitSettings out;
  out.window = s.window("window");
  out.series = s.string("series", "");
  return out;
}

ThresholdSettings parse_threshold(const json& node, const IntegratorSettings& integrator) {
  Section s(node, "threshold", {"lo", "hi", "iters", "T", "dt", "scheme", "sample_every", "window"});
  ThresholdSettings out;
  out.probe.step = integrator.step;
  out.lo = s.number("lo", out.lo);
  out.hi = s.number("hi", out.hi);
  out.iters = static_cast<int>(s.integer("iters", out.iters));
  out.probe.final_time = s.number("T", out.probe.final_time);
  out.probe.step.dt = s.number("dt", out.probe.step.dt);
  out.probe.sample_every = static_cast<int>(s.integer("sample_every", out.probe.sample_every));
  out.probe.window = s.window("window");
  checked("threshold", [&] {
    if (s.has("scheme")) out.probe.step.scheme = parse_scheme(s.string("scheme", ""));
    out.probe.step.validate();
  });
  if (!(out.lo > 0.0) || !(out.hi > out.lo)) throw ConfigError("threshold: bracket needs 0 < lo < hi");
  if (out.iters < 0) throw ConfigError("threshold: iters must be nonnegative");
  if (!(out.probe.final_time > 0.0)) throw ConfigError("threshold: T must be positive");
  if (out.probe.sample_every < 1) throw ConfigError("threshold: sample_every must be at least 1");
  return out;
}

RegularitySettings parse_weighted_study(const json& node) {
  Section s(node, "weighted_study", {"resolutions", "T", "dt", "scheme", "exponent", "amplitude"});
  RegularitySettings out;
  out.resolutions = s.int_list("resolutions", out.resolutions);
  out.final_time = s.number("T", out.final_time);
  out.dt = s.number("dt", out.dt);
  out.exponent = s.number("exponent", out.exponent);
  out.amplitude = s.number("amplitude", out.amplitude);
  checked("weighted_study", [&] {
    if (s.has("scheme")) out.scheme = parse_scheme(s.string("scheme", ""));
  });
  if (out.resolutions.size() < 2) throw ConfigError("weighted_study: needs at least two resolutions");
  for (int n : out.resolutions) {
    if (n < kMinModes) throw ConfigError("weighted_study: resolutions need at least 4 modes");
  }
  if (!(out.final_time > 0.0) || !(out.dt > 0.0)) throw ConfigError("weighted_study: T and dt must be positive");
  if (!(out.exponent > 1.5)) throw ConfigError("weighted_study: power_law exponent must exceed 1.5 for H^1 data");
  return out;
}

InequalitySettings parse_inequalities(const json& node) {
  Section s(node, "inequalities",
            {"dims", "max_mode", "samples", "scale_samples", "gronwall_draws", "gronwall_horizon", "gronwall_dt"});
  InequalitySettings out;
  out.dims = s.int_list("dims", out.dims);
  out.max_mode = static_cast<int>(s.integer("max_mode", out.max_mode));
  out.samples = static_cast<std::size_t>(s.integer("samples", static_cast<long long>(out.samples)));
  out.scale_samples = static_cast<std::size_t>(s.integer("scale_samples", static_cast<long long>(out.scale_samples)));
  out.gronwall_draws = static_cast<int>(s.integer("gronwall_draws", out.gronwall_draws));
  out.gronwall_horizon = s.number("gronwall_horizon", out.gronwall_horizon);
  out.gronwall_dt = s.number("gronwall_dt", out.gronwall_dt);
  for (int d : out.dims) {
    if (d < 1 || d > 3) throw ConfigError("inequalities: dims must be 1, 2 or 3");
  }
  if (out.max_mode < 1) throw ConfigError("inequalities: max_mode must be positive");
  if (out.samples < 1) throw ConfigError("inequalities: samples must be positive");
  if (out.gronwall_draws < 0) throw ConfigError("inequalities: gronwall_draws must be nonnegative");
  if (!(out.gronwall_horizon > 0.0) || !(out.gronwall_dt > 0.0)) {
    throw ConfigError("inequalities: gronwall horizon and step must be positive");
  }
  return out;
}

std::vector<SweepAxis> parse_sweep(const json& node) {
  Section s(node, "sweep", {"parameters"});
  std::vector<SweepAxis> out;
  if (!s.has("parameters")) return out;
  if (!s.at("parameters").is_array()) throw ConfigError("sweep.parameters must be a list");
  for (const auto& entry : s.at("parameters")) {
    Section e(entry, "sweep.parameters[]", {"pointer", "values"});
    SweepAxis axis;
    axis.pointer = e.string("pointer", "");
    try {
      (void)json::json_pointer(axis.pointer);
    } catch (const json::exception& ex) {
      throw ConfigError("sweep: invalid pointer '" + axis.pointer + "'");
    }
    if (axis.pointer.empty() || axis.pointer.rfind("/sweep", 0) == 0) {
      throw ConfigError("sweep: pointer must name a config field outside sweep");
    }
    if (!e.has("values") || !e.at("values").is_array() || e.at("values").empty()) {
      throw ConfigError("sweep: values for '" + axis.pointer + "' must be a nonempty list");
    }
    for (const auto& v : e.at("values")) axis.values.push_back(v);
    out.push_back(std::move(axis));
  }
  return out;
}

std::string line_info(std::string_view text, std::size_t byte) {
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

nlohmann::json to_json(const InitialDataSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case InitialDataSpec::Kind::zero:
      break;
    case InitialDataSpec::Kind::single_mode:
      j["mode"] = spec.terms.front().mode;
      j["amplitude"] = spec.terms.front().amplitude;
      break;
    case InitialDataSpec::Kind::multi_mode:
      j["terms"] = json::array();
      for (const auto& t : spec.terms) j["terms"].push_back({{"mode", t.mode}, {"amplitude", t.amplitude}});
      break;
    case InitialDataSpec::Kind::power_law:
      j["exponent"] = spec.exponent;
      j["amplitude"] = spec.amplitude;
      break;
  }
  return j;
}

RunConfig parse_config(const nlohmann::json& doc) {
  Section top(doc, "",
              {"grid", "medium", "initial", "integrator", "gammas", "seed", "output_dir", "resume_from", "fit",
               "threshold", "weighted_study", "inequalities", "sweep"});
  RunConfig cfg;
  cfg.document = doc;
  if (top.has("grid")) cfg.grid = parse_grid(top.at("grid"));
  if (top.has("medium")) cfg.medium = parse_medium(top.at("medium"));
  if (top.has("initial")) {
    Section s(top.at("initial"), "initial", {"psi0", "psi1"});
    if (s.has("psi0")) cfg.psi0 = parse_initial_spec(s.at("psi0"), "initial.psi0");
    if (s.has("psi1")) cfg.psi1 = parse_initial_spec(s.at("psi1"), "initial.psi1");
  }
  // Mode indices must fit the grid.
  checked("initial", [&] { (void)build_initial(cfg.psi0, cfg.psi1, cfg.grid); });
  if (top.has("integrator")) cfg.integrator = parse_integrator(top.at("integrator"));
  if (top.has("gammas")) parse_gammas(top.at("gammas"), cfg);
  if (top.has("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError("seed must be a nonnegative integer");
    }
    cfg.seed = v.get<std::uint64_t>();
  }
  cfg.output_dir = top.string("output_dir", cfg.output_dir.string());
  if (top.has("resume_from")) cfg.resume_from = top.string("resume_from", "");
  if (top.has("fit")) cfg.fit = parse_fit(top.at("fit"));
  cfg.threshold.probe.step = cfg.integrator.step;
  if (top.has("threshold")) cfg.threshold = parse_threshold(top.at("threshold"), cfg.integrator);
  if (top.has("weighted_study")) cfg.weighted_study = parse_weighted_study(top.at("weighted_study"));
  if (top.has("inequalities")) cfg.inequalities = parse_inequalities(top.at("inequalities"));
  if (top.has("sweep")) cfg.sweep = parse_sweep(top.at("sweep"));
  return cfg;
}

RunConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at " + line_info(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig cfg = parse_config_text(buffer.str());
  if (const char* env = std::getenv("BLACKSTOCK_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long long seed = std::stoull(env, &used);
      if (used != std::string_view(env).size()) throw std::invalid_argument("trailing characters");
      cfg.seed = seed;
    } catch (const std::exception&) {
      throw ConfigError(std::string("BLACKSTOCK_SEED is not a nonnegative integer: ") + env);
    }
  }
  return cfg;
}

}  // namespace blackstock
