#include "heatobs/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "heatobs/errors.hpp"

namespace heatobs {
namespace {

using nlohmann::json;
constexpr double kCm = 1e-2;

// Thin cursor over a JSON object that remembers its path and the keys read,
// so unknown keys and bad values are reported with their location.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError("config " + path_ + ": " + what); }
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("config " + path_ + "/" + key + ": " + what);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(key, "missing field");
    return j_.at(key);
  }

  Node child(const std::string& key) { return Node(raw(key), path_ + "/" + key); }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key) {
    const double v = number(key);
    if (!(v > 0.0) || !std::isfinite(v)) fail(key, "must be positive");
    return v;
  }
  double positive(const std::string& key, double fallback) { return has(key) ? positive(key) : fallback; }

  double nonnegative(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (!(v >= 0.0) || !std::isfinite(v)) fail(key, "must be >= 0");
    return v;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  Vec3 vec3(const std::string& key, double scale) {
    const json& v = raw(key);
    if (!v.is_array() || v.size() != 3) fail(key, "expected an array of 3 numbers");
    Vec3 out{};
    for (int a = 0; a < 3; ++a) {
      if (!v[a].is_number()) fail(key, "expected an array of 3 numbers");
      out[a] = v[a].get<double>() * scale;
    }
    return out;
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(it.key(), "unknown field");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

FaceCondition parse_face(Node n) {
  const std::string type = n.text("type", "");
  FaceCondition f;
  if (type == "neumann") {
    f = FaceCondition::neumann();
  } else if (type == "dirichlet") {
    const double v = n.number("value_K");
    if (!std::isfinite(v)) n.fail("value_K", "must be finite");
    f = FaceCondition::dirichlet(v);
  } else {
    n.fail("type", "expected \"neumann\" or \"dirichlet\"");
  }
  n.finish();
  return f;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": JSON parse error: " + e.what());
  }

  ScenarioConfig cfg;
  Node root(doc, "");
  {
    Node d = root.child("domain");
    cfg.extents = d.vec3("extents_cm", kCm);
    for (int a = 0; a < 3; ++a) {
      if (!(cfg.extents[a] > 0.0)) d.fail("extents_cm", "extents must be positive");
    }
    cfg.dx = d.positive("dx_cm") * kCm;
    d.finish();
  }
  {
    Node t = root.child("time");
    cfg.solver.dt = t.positive("dt_s");
    cfg.horizon = t.positive("horizon_s");
    t.finish();
  }
  {
    Node m = root.child("material");
    cfg.material.density = m.positive("density_kg_m3");
    cfg.material.conductivity = m.positive("conductivity_W_mK");
    cfg.material.specific_heat = m.positive("specific_heat_J_kgK");
    m.finish();
  }
  if (root.has("boundary")) {
    Node b = root.child("boundary");
    std::array<FaceCondition, 6> faces;
    faces.fill(FaceCondition::neumann());
    if (b.has("default")) faces.fill(parse_face(b.child("default")));
    const char* names[6] = {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"};
    for (int f = 0; f < 6; ++f) {
      if (b.has(names[f])) faces[f] = parse_face(b.child(names[f]));
    }
    b.finish();
    cfg.bc = BoundaryCondition(faces);
  }
  cfg.initial_temperature = root.number("initial_temperature_K", 300.0);
  if (!std::isfinite(cfg.initial_temperature)) root.fail("initial_temperature_K", "must be finite");
  {
    Node s = root.child("source");
    cfg.source.sigma = s.positive("sigma_cm") * kCm;
    cfg.source.truncation = s.positive("truncation_sigmas", cfg.source.truncation);
    const std::string shift = s.text("shift", "nearest");
    if (shift == "nearest") cfg.shift = ShiftMode::Nearest;
    else if (shift == "trilinear") cfg.shift = ShiftMode::Trilinear;
    else s.fail("shift", "expected \"nearest\" or \"trilinear\"");
    s.finish();
  }
  {
    const json& segs = root.raw("schedule");
    if (!segs.is_array()) root.fail("schedule", "expected an array of segments");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      Node s(segs[i], "/schedule/" + std::to_string(i));
      ProbeSegment seg;
      seg.t_start = s.number("t_start_s");
      seg.t_end = s.number("t_end_s");
      if (!(seg.t_start >= 0.0) || !(seg.t_end > seg.t_start)) s.fail("need 0 <= t_start_s < t_end_s");
      seg.start = s.vec3("start_cm", kCm);
      if (s.has("end_cm")) {
        if (s.has("velocity_cm_s")) s.fail("give either end_cm or velocity_cm_s, not both");
        const Vec3 end = s.vec3("end_cm", kCm);
        for (int a = 0; a < 3; ++a) seg.velocity[a] = (end[a] - seg.start[a]) / (seg.t_end - seg.t_start);
      } else {
        seg.velocity = s.vec3("velocity_cm_s", kCm);
      }
      seg.power = s.nonnegative("power_W", 0.0);
      s.finish();
      cfg.schedule.push_back(seg);
    }
  }
  if (root.has("disturbance")) {
    Node d = root.child("disturbance");
    cfg.disturbance.eps_l2 = d.nonnegative("eps_l2", 0.0);
    cfg.disturbance.holder_c = d.nonnegative("holder_c", 0.0);
    cfg.disturbance.n_modes = static_cast<int>(d.integer("n_modes", 6));
    cfg.disturbance.max_mode_index = static_cast<int>(d.integer("max_mode_index", 4));
    if (d.has("temporal_freqs_Hz")) cfg.disturbance.temporal_freqs = d.numbers("temporal_freqs_Hz");
    cfg.disturbance.fill = d.positive("fill", 0.8);
    d.finish();
  }
  if (root.has("sensors")) {
    Node s = root.child("sensors");
    cfg.sensor_stride = s.integer("stride", 1);
    if (cfg.sensor_stride < 1) s.fail("stride", "must be >= 1");
    cfg.frame_noise = s.nonnegative("noise_K", 0.0);
    s.finish();
  }
  if (root.has("solver")) {
    Node s = root.child("solver");
    cfg.solver.gs_tol = s.positive("gs_tol_K", cfg.solver.gs_tol);
    cfg.solver.gs_max_iters = static_cast<int>(s.integer("gs_max_iters", 500));
    if (cfg.solver.gs_max_iters < 1) s.fail("gs_max_iters", "must be >= 1");
    const std::string ord = s.text("ordering", "lexicographic");
    if (ord == "lexicographic") cfg.solver.ordering = GsOrdering::Lexicographic;
    else if (ord == "red_black") cfg.solver.ordering = GsOrdering::RedBlack;
    else s.fail("ordering", "expected \"lexicographic\" or \"red_black\"");
    s.finish();
  }
  if (root.has("anra")) {
    Node a = root.child("anra");
    cfg.anra.history = a.integer("history", 7);
    if (cfg.anra.history < 4) a.fail("history", "must be >= 4");
    cfg.anra.beta = a.number("beta", 100.0);
    if (!(cfg.anra.beta >= 1.0)) a.fail("beta", "must be >= 1");
    cfg.anra.lap_floor_fraction = a.nonnegative("lap_floor_fraction", 0.01);
    cfg.anra.rtc_threshold_factor = a.nonnegative("rtc_threshold_factor", 0.1);
    cfg.anra_decimation = a.integer("decimation", 1);
    if (cfg.anra_decimation < 1) a.fail("decimation", "must be >= 1");
    a.finish();
  }
  if (root.has("observer")) {
    Node o = root.child("observer");
    cfg.observer.a0_factor = o.positive("a0_factor", 2.0);
    cfg.observer.gain = o.positive("gain", 50.0);
    const std::string mode = o.text("gain_mode", "constant");
    if (mode == "constant") cfg.observer.gain_mode = GainMode::Constant;
    else if (mode == "bound_checked") cfg.observer.gain_mode = GainMode::BoundChecked;
    else o.fail("gain_mode", "expected \"constant\" or \"bound_checked\"");
    cfg.observer.L = o.nonnegative("L", 0.5);
    const std::string clock = o.text("adaptation_clock", "per_sample");
    if (clock == "per_sample") cfg.observer.clock = AdaptationClock::PerSample;
    else if (clock == "seconds") cfg.observer.clock = AdaptationClock::Seconds;
    else o.fail("adaptation_clock", "expected \"per_sample\" or \"seconds\"");
    cfg.observer.adaptive = o.boolean("adaptive", true);
    cfg.observer.initial_temperature = o.number("initial_temperature_K", cfg.initial_temperature);
    const std::string inj = o.text("injection", "kronecker");
    if (inj == "kronecker") cfg.observer.injection = InjectionScaling::Kronecker;
    else if (inj == "cell_volume") cfg.observer.injection = InjectionScaling::CellVolume;
    else o.fail("injection", "expected \"kronecker\" or \"cell_volume\"");
    cfg.observer.report_gain_bound = o.boolean("report_gain_bound", true);
    o.finish();
  }
  cfg.seed = root.integer("seed", 0);
  cfg.disturbance.seed = cfg.seed;
  if (root.has("output")) {
    Node o = root.child("output");
    cfg.output.frames = o.boolean("frames", false);
    cfg.output.field_dump_every = o.integer("field_dump_every", 0);
    o.finish();
  }
  root.finish();

  // Cross-field checks.
  Grid3 grid;
  try {
    grid = cfg.grid();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config /domain: ") + e.what());
  }
  try {
    step_count(cfg.horizon, cfg.solver.dt);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config /time/horizon_s: ") + e.what());
  }
  try {
    ProbeSchedule(cfg.schedule).validate_within(grid);
  } catch (const ConfigError& e) {
    throw ScheduleError(std::string("config /schedule: ") + e.what() +
                        " (the probe position p(t) must remain in the domain for all t)");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

PlantModel build_plant_model(const ScenarioConfig& cfg) {
  PlantModel m;
  m.grid = cfg.grid();
  m.bc = cfg.bc;
  m.material = cfg.material;
  m.source_kernel = build_source(cfg.source, m.grid);
  m.shift = cfg.shift;
  m.schedule = ProbeSchedule(cfg.schedule);
  if (cfg.disturbance.eps_l2 > 0.0) m.disturbance.emplace(cfg.disturbance, m.grid);
  return m;
}

}  // namespace heatobs
