#include "stroma/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace stroma {

using nlohmann::json;

namespace {

constexpr std::pair<ScenarioKind, std::string_view> kScenarioNames[] = {
    {ScenarioKind::Inflation, "inflation"},
    {ScenarioKind::UnitCell, "unitcell"},
    {ScenarioKind::Keratoconus, "keratoconus"},
};
constexpr std::pair<ConstitutiveModel, std::string_view> kModelNames[] = {
    {ConstitutiveModel::CoupledMultiscale, "coupled_multiscale"},
    {ConstitutiveModel::VarianceBased, "variance_based"},
};
constexpr std::pair<LimbusMode, std::string_view> kLimbusNames[] = {
    {LimbusMode::OrthogonalityPreserving, "orthogonality_preserving"},
    {LimbusMode::FixedAll, "fixed"},
    {LimbusMode::PinnedMidsurface, "pinned_midsurface"},
};
constexpr std::pair<SolverMethod, std::string_view> kMethodNames[] = {
    {SolverMethod::NewtonRaphson, "newton_raphson"},
    {SolverMethod::DynamicRelaxation, "dynamic_relaxation"},
};
constexpr std::pair<HexTangentMode, std::string_view> kTangentNames[] = {
    {HexTangentMode::Consistent, "consistent"},
    {HexTangentMode::FiniteDifference, "finite_difference"},
};

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E v) {
  for (const auto& [e, n] : table)
    if (e == v) return n;
  return "?";
}

template <typename E, std::size_t N>
E parse_enum(const std::pair<E, std::string_view> (&table)[N], const std::string& s, const std::string& key) {
  std::string allowed;
  for (const auto& [e, n] : table) {
    if (n == s) return e;
    allowed += (allowed.empty() ? "" : ", ") + std::string(n);
  }
  throw ConfigError(key + ": unknown value \"" + s + "\" (expected one of " + allowed + ")");
}

// Reads one JSON object, remembering which keys were consumed so the rest can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_null() && !j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, int> || std::is_same_v<T, long>) {
        if (!v->is_number_integer()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v->is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw ConfigError("");
      }
      out = v->get<T>();
    } catch (const std::exception&) {
      throw ConfigError(key_path(key) + ": expected " + type_name<T>() + ", got " + v->dump());
    }
  }

  template <typename E, std::size_t N>
  void get_enum(const char* key, const std::pair<E, std::string_view> (&table)[N], E& out) {
    std::string s;
    get(key, s);
    if (!s.empty()) out = parse_enum(table, s, key_path(key));
  }

  Section sub(const char* key) {
    const json* v = find(key);
    return Section(v ? *v : null_, key_path(key));
  }

  const json* raw(const char* key) { return find(key); }

  std::string key_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (!j_.is_object()) return;
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) throw ConfigError(key_path(item.key().c_str()) + ": unknown key");
  }

 private:
  const json* find(const char* key) {
    used_.insert(key);
    if (!j_.is_object()) return nullptr;
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where() const { return path_.empty() ? "config" : path_; }

  template <typename T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, long>) return "an integer";
    else if constexpr (std::is_same_v<T, double>) return "a number";
    else if constexpr (std::is_same_v<T, bool>) return "true or false";
    else return "a string";
  }

  static inline const json null_{};
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_biconic(Section s, BiconicSurface& b) {
  s.get("r_steep", b.r_steep);
  s.get("r_flat", b.r_flat);
  s.get("q_steep", b.q_steep);
  s.get("q_flat", b.q_flat);
  s.get("steep_axis_deg", b.steep_axis_deg);
  s.finish();
}

json biconic_json(const BiconicSurface& b) {
  return {{"r_steep", b.r_steep}, {"r_flat", b.r_flat}, {"q_steep", b.q_steep},
          {"q_flat", b.q_flat},   {"steep_axis_deg", b.steep_axis_deg}};
}

// Re-raises a validator error prefixed with the config section it belongs to.
template <typename F>
void checked(const char* section, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    throw ConfigError(std::string(section) + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(ScenarioKind k) { return name_of(kScenarioNames, k); }
std::string_view to_string(ConstitutiveModel m) { return name_of(kModelNames, m); }
std::string_view to_string(LimbusMode m) { return name_of(kLimbusNames, m); }
std::string_view to_string(SolverMethod m) { return name_of(kMethodNames, m); }
std::string_view to_string(HexTangentMode m) { return name_of(kTangentNames, m); }

void RunConfig::validate() const {
  checked("geometry", [&] { geometry.validate(); });
  checked("mesh", [&] { mesh.validate(); });
  checked("materials", [&] { materials.validate(); });
  checked("scenario.load", [&] { load.validate(); });
  checked("scenario.damage", [&] { damage.validate(); });
  checked("scenario.unit_cell", [&] { unit_cell.validate(); });
  checked("solver", [&] { settings.solve.validate(); });
  if (settings.max_cutbacks < 0) throw ConfigError("solver.max_cutbacks: must be >= 0");
  if (!(settings.mass.hex_safety > 0.0) || !(settings.mass.truss_safety > 0.0))
    throw ConfigError("solver.mass_safety: factors must be positive");
  if (output.snapshot_every < 0) throw ConfigError("output.snapshot_every: must be >= 0");
  if (output.directory.empty()) throw ConfigError("output.directory: must not be empty");
  for (const SweepAxis& a : sweep)
    if (a.values.empty()) throw ConfigError("sweep." + a.key + ": needs at least one value");
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  Section root(doc, "");

  {
    Section g = root.sub("geometry");
    read_biconic(g.sub("anterior"), c.geometry.anterior);
    read_biconic(g.sub("posterior"), c.geometry.posterior);
    g.get("central_thickness", c.geometry.central_thickness);
    g.get("apex_elevation", c.geometry.apex_elevation);
    g.get("in_plane_diameter", c.geometry.in_plane_diameter);
    g.finish();
  }
  {
    Section m = root.sub("mesh");
    m.get("n_m", c.mesh.n_m);
    m.get("n_l", c.mesh.n_l);
    m.finish();
  }
  {
    Section m = root.sub("materials");
    Section col = m.sub("collagen");
    col.get("k1", c.materials.collagen.k1);
    col.get("k2", c.materials.collagen.k2);
    col.get("active_in_compression", c.materials.collagen.active_in_compression);
    col.finish();
    Section xl = m.sub("crosslink");
    xl.get("eps", c.materials.crosslink.eps);
    xl.get("a", c.materials.crosslink.a);
    xl.get("enabled", c.materials.crosslinks_enabled);
    xl.finish();
    Section mx = m.sub("matrix");
    mx.get("mu1", c.materials.matrix.mu1);
    mx.get("mu2", c.materials.matrix.mu2);
    mx.get("k_bulk", c.materials.matrix.k_bulk);
    mx.finish();
    m.get("a_bar", c.materials.a_bar);
    Section vb = m.sub("variance");
    vb.get("k1", c.materials.k1m);
    vb.get("k2", c.materials.k2m);
    vb.get("b_centre", c.materials.dispersion.b_centre);
    vb.get("b_limbus", c.materials.dispersion.b_limbus);
    vb.get("tension_only", c.materials.fibrils_tension_only);
    vb.finish();
    m.finish();
  }
  {
    Section s = root.sub("scenario");
    s.get_enum("kind", kScenarioNames, c.scenario);
    s.get_enum("model", kModelNames, c.settings.model);
    s.get_enum("limbus", kLimbusNames, c.settings.limbus);
    Section l = s.sub("load");
    l.get("iop_start_mmhg", c.load.iop_start_mmhg);
    l.get("iop_end_mmhg", c.load.iop_end_mmhg);
    l.get("steps", c.load.steps);
    l.finish();
    Section d = s.sub("damage");
    if (const json* centre = d.raw("centre")) {
      if (!centre->is_array() || centre->size() != 2 || !(*centre)[0].is_number() || !(*centre)[1].is_number())
        throw ConfigError("scenario.damage.centre: expected [x, y] in mm");
      c.damage.centre = Vec2((*centre)[0].get<double>(), (*centre)[1].get<double>());
    }
    d.get("radius", c.damage.radius);
    d.finish();
    Section u = s.sub("unit_cell");
    u.get("shape_factor", c.unit_cell.shape_factor);
    u.get("facet_area", c.unit_cell.facet_area);
    u.get("target_force", c.unit_cell.target_force);
    u.get("steps", c.unit_cell.steps);
    u.finish();
    s.finish();
  }
  {
    Section s = root.sub("solver");
    s.get_enum("method", kMethodNames, c.settings.method);
    s.get_enum("tangent", kTangentNames, c.settings.tangent);
    SolveSettings& v = c.settings.solve;
    s.get("tolerance", v.tolerance);
    s.get("force_floor", v.force_floor);
    s.get("max_newton_iterations", v.max_newton_iterations);
    s.get("max_relaxation_iterations", v.max_relaxation_iterations);
    s.get("pseudo_time_step", v.pseudo_time_step);
    s.get("velocity_tolerance", v.velocity_tolerance);
    s.get("mass_update_interval", v.mass_update_interval);
    s.get("divergence_window", v.divergence_window);
    s.get("history_stride", v.history_stride);
    s.get("max_cutbacks", c.settings.max_cutbacks);
    Section ms = s.sub("mass_safety");
    ms.get("hex", c.settings.mass.hex_safety);
    ms.get("truss", c.settings.mass.truss_safety);
    ms.finish();
    s.finish();
  }
  {
    Section o = root.sub("output");
    o.get("directory", c.output.directory);
    o.get("snapshot_every", c.output.snapshot_every);
    o.get("vtk", c.output.vtk);
    o.finish();
  }
  if (const json* sw = root.raw("sweep")) {
    if (!sw->is_array()) throw ConfigError("sweep: expected an array of {key, values}");
    for (std::size_t i = 0; i < sw->size(); ++i) {
      const std::string path = "sweep[" + std::to_string(i) + "]";
      Section a((*sw)[i], path);
      SweepAxis axis;
      a.get("key", axis.key);
      const json* values = a.raw("values");
      a.finish();
      if (axis.key.empty()) throw ConfigError(path + ".key: required");
      if (axis.key.rfind("sweep", 0) == 0 || axis.key.rfind("output", 0) == 0)
        throw ConfigError(path + ".key: cannot sweep " + axis.key);
      if (!values || !values->is_array()) throw ConfigError(path + ".values: expected an array");
      axis.values.assign(values->begin(), values->end());
      c.sweep.push_back(std::move(axis));
    }
  }
  root.finish();
  c.settings.snapshot_every = c.output.snapshot_every;
  c.validate();
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (text.rfind(kManifestHeader, 0) == 0) {
    const std::size_t at = text.find("\nconfig:\n");
    if (at == std::string::npos) throw ConfigError(path.string() + ": manifest has no config echo");
    text = text.substr(at + 9);
  }
  if (std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); })) {
    return config_from_json(json::object());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const RunConfig& c) {
  const MaterialSet& m = c.materials;
  const SolveSettings& v = c.settings.solve;
  json sweep = json::array();
  for (const SweepAxis& a : c.sweep) sweep.push_back({{"key", a.key}, {"values", a.values}});
  return {
      {"geometry",
       {{"anterior", biconic_json(c.geometry.anterior)},
        {"posterior", biconic_json(c.geometry.posterior)},
        {"central_thickness", c.geometry.central_thickness},
        {"apex_elevation", c.geometry.apex_elevation},
        {"in_plane_diameter", c.geometry.in_plane_diameter}}},
      {"mesh", {{"n_m", c.mesh.n_m}, {"n_l", c.mesh.n_l}}},
      {"materials",
       {{"collagen",
         {{"k1", m.collagen.k1}, {"k2", m.collagen.k2}, {"active_in_compression", m.collagen.active_in_compression}}},
        {"crosslink", {{"eps", m.crosslink.eps}, {"a", m.crosslink.a}, {"enabled", m.crosslinks_enabled}}},
        {"matrix", {{"mu1", m.matrix.mu1}, {"mu2", m.matrix.mu2}, {"k_bulk", m.matrix.k_bulk}}},
        {"a_bar", m.a_bar},
        {"variance",
         {{"k1", m.k1m},
          {"k2", m.k2m},
          {"b_centre", m.dispersion.b_centre},
          {"b_limbus", m.dispersion.b_limbus},
          {"tension_only", m.fibrils_tension_only}}}}},
      {"scenario",
       {{"kind", to_string(c.scenario)},
        {"model", to_string(c.settings.model)},
        {"limbus", to_string(c.settings.limbus)},
        {"load", {{"iop_start_mmhg", c.load.iop_start_mmhg}, {"iop_end_mmhg", c.load.iop_end_mmhg}, {"steps", c.load.steps}}},
        {"damage", {{"centre", {c.damage.centre.x(), c.damage.centre.y()}}, {"radius", c.damage.radius}}},
        {"unit_cell",
         {{"shape_factor", c.unit_cell.shape_factor},
          {"facet_area", c.unit_cell.facet_area},
          {"target_force", c.unit_cell.target_force},
          {"steps", c.unit_cell.steps}}}}},
      {"solver",
       {{"method", to_string(c.settings.method)},
        {"tangent", to_string(c.settings.tangent)},
        {"tolerance", v.tolerance},
        {"force_floor", v.force_floor},
        {"max_newton_iterations", v.max_newton_iterations},
        {"max_relaxation_iterations", v.max_relaxation_iterations},
        {"pseudo_time_step", v.pseudo_time_step},
        {"velocity_tolerance", v.velocity_tolerance},
        {"mass_update_interval", v.mass_update_interval},
        {"divergence_window", v.divergence_window},
        {"history_stride", v.history_stride},
        {"max_cutbacks", c.settings.max_cutbacks},
        {"mass_safety", {{"hex", c.settings.mass.hex_safety}, {"truss", c.settings.mass.truss_safety}}}}},
      {"output", {{"directory", c.output.directory}, {"snapshot_every", c.output.snapshot_every}, {"vtk", c.output.vtk}}},
      {"sweep", sweep},
  };
}

void set_json_key(json& doc, const std::string& dotted, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("malformed config key \"" + dotted + "\"");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace stroma
