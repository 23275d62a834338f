#include "pedsafe/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pedsafe/error.hpp"

namespace pedsafe::harness {

using json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

std::uint64_t as_u64(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

bool as_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) throw ConfigError(field, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_numbers(const json& j, const std::string& field, std::size_t n) {
  if (!j.is_array() || j.size() != n) {
    throw ConfigError(field, "expected an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(as_number(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Vec2 as_vec2(const json& j, const std::string& field) {
  const auto v = as_numbers(j, field, 2);
  return {v[0], v[1]};
}

Vec3 as_vec3(const json& j, const std::string& field) {
  const auto v = as_numbers(j, field, 3);
  return {v[0], v[1], v[2]};
}

Rgb as_rgb(const json& j, const std::string& field) {
  const auto v = as_numbers(j, field, 3);
  for (double c : v) {
    if (c < 0.0 || c > 1.0) throw ConfigError(field, "color components must lie in [0, 1]");
  }
  return {v[0], v[1], v[2]};
}

// Object reader that remembers which keys were consumed so leftovers can
// be reported as unknown.
class Object {
 public:
  Object(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const { return join(path_, key); }

  template <typename F>
  void with(const std::string& key, F&& f) {
    if (const json* v = get(key)) f(*v, field(key));
  }

  void number(const std::string& key, double& out) {
    with(key, [&](const json& v, const std::string& f) { out = as_number(v, f); });
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T, typename Fn>
T wrap(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

void read_sensor(const json& j, const std::string& path, perception::SensorSpec& s) {
  Object o(j, path);
  Vec3 position = s.position;
  double yaw = s.yaw_deg;
  double pitch = s.pitch_deg;
  double width = s.intrinsics.width;
  double height = s.intrinsics.height;
  double fov = s.intrinsics.fov_deg;
  double range = s.max_range;
  o.with("position", [&](const json& v, const std::string& f) { position = as_vec3(v, f); });
  o.number("yaw_deg", yaw);
  o.number("pitch_deg", pitch);
  o.with("width", [&](const json& v, const std::string& f) { width = double(as_u64(v, f)); });
  o.with("height", [&](const json& v, const std::string& f) { height = double(as_u64(v, f)); });
  o.number("fov_deg", fov);
  o.number("max_range", range);
  perception::SensorSpec next = wrap<perception::SensorSpec>(path, [&] {
    return perception::make_sensor(position, yaw, pitch, static_cast<int>(width),
                                   static_cast<int>(height), fov, range);
  });
  next.visibility_threshold = s.visibility_threshold;
  next.blend_delta = s.blend_delta;
  next.blend_detect_prob = s.blend_detect_prob;
  next.depth_quantization = s.depth_quantization;
  next.kmeans_k = s.kmeans_k;
  next.enabled = s.enabled;
  o.number("visibility_threshold", next.visibility_threshold);
  o.number("blend_delta", next.blend_delta);
  o.number("blend_detect_prob", next.blend_detect_prob);
  o.with("depth_quantization",
         [&](const json& v, const std::string& f) { next.depth_quantization = as_bool(v, f); });
  o.with("kmeans_k", [&](const json& v, const std::string& f) {
    next.kmeans_k = static_cast<int>(std::min<std::uint64_t>(as_u64(v, f), 1u << 20));
  });
  o.with("enabled", [&](const json& v, const std::string& f) { next.enabled = as_bool(v, f); });
  o.finish();
  s = next;
}

void read_behavior(const json& j, const std::string& path, world::BehaviorParams& b) {
  Object o(j, path);
  o.number("a_brake", b.a_brake);
  o.number("resume_accel", b.resume_accel);
  o.number("awareness_radius", b.awareness_radius);
  o.number("pass_first_multiplier", b.pass_first_multiplier);
  o.number("yield_back_seconds", b.yield_back_seconds);
  o.number("conflict_horizon", b.conflict_horizon);
  o.number("corridor_buffer", b.corridor_buffer);
  o.number("lookahead_margin", b.lookahead_margin);
  o.number("arrival_tolerance", b.arrival_tolerance);
  o.finish();
}

void read_overrides(const json& j, world::ScenarioConfig& s) {
  Object o(j, "scenario_overrides");
  o.with("frames", [&](const json& v, const std::string& f) {
    const auto n = as_u64(v, f);
    if (n < 1 || n > 1000000) throw ConfigError(f, "must lie in [1, 1000000]");
    s.frames = static_cast<int>(n);
  });
  o.number("dt", s.dt);
  o.with("rules", [&](const json& v, const std::string& f) {
    Object r(v, f);
    r.with("speed_limit", [&](const json& x, const std::string& g) {
      if (x.is_null()) {
        s.rules.speed_limit.reset();
      } else {
        s.rules.speed_limit = as_number(x, g);
      }
    });
    r.with("pedestrian_right_of_way", [&](const json& x, const std::string& g) {
      s.rules.pedestrian_right_of_way = as_bool(x, g);
    });
    r.finish();
  });
  o.with("behavior", [&](const json& v, const std::string& f) { read_behavior(v, f, s.behavior); });
  o.with("ego", [&](const json& v, const std::string& f) {
    Object e(v, f);
    e.with("arrival_window", [&](const json& x, const std::string& g) {
      auto& ego = s.vehicles[s.ego_index()];
      auto* arrival = std::get_if<world::ArrivalPlacement>(&ego.placement);
      if (arrival == nullptr) throw ConfigError(g, "the ego of this scenario is not arrival-placed");
      const auto w = as_numbers(x, g, 2);
      arrival->t_min = w[0];
      arrival->t_max = w[1];
    });
    e.finish();
  });
  o.with("pedestrian", [&](const json& v, const std::string& f) {
    for (auto& p : s.pedestrians) {
      Object po(v, f);
      po.with("origin_min", [&](const json& x, const std::string& g) { p.origin_min = as_vec2(x, g); });
      po.with("origin_max", [&](const json& x, const std::string& g) { p.origin_max = as_vec2(x, g); });
      po.number("destination_y", p.destination_y);
      po.with("body_color", [&](const json& x, const std::string& g) { p.body_color = as_rgb(x, g); });
      po.number("height", p.height);
      po.number("radius", p.radius);
      po.finish();
    }
  });
  o.with("vehicle_colors", [&](const json& v, const std::string& f) {
    if (!v.is_object()) throw ConfigError(f, "expected an object");
    for (auto it = v.begin(); it != v.end(); ++it) {
      const std::string g = join(f, it.key());
      bool found = false;
      for (auto& veh : s.vehicles) {
        if (veh.name == it.key()) {
          veh.color = as_rgb(it.value(), g);
          found = true;
        }
      }
      if (!found) throw ConfigError(g, "no vehicle with this name in the scenario");
    }
  });
  o.finish();
}

void read_distributions(const json& j, world::TrafficModels& t) {
  Object o(j, "distributions");
  o.with("headway", [&](const json& v, const std::string& f) {
    Object h(v, f);
    double lambda = t.headway.lambda;
    h.number("lambda", lambda);
    h.finish();
    t.headway = wrap<stochastic::ExponentialModel>(
        h.field("lambda"), [&] { return stochastic::ExponentialModel::make(lambda); });
  });
  auto lognormal = [&](const char* key, stochastic::LogNormalModel& m) {
    o.with(key, [&](const json& v, const std::string& f) {
      Object l(v, f);
      double mu = m.mu;
      double sigma = m.sigma;
      l.number("mu", mu);
      l.number("sigma", sigma);
      l.finish();
      m = wrap<stochastic::LogNormalModel>(f, [&] { return stochastic::LogNormalModel::make(mu, sigma); });
    });
  };
  lognormal("speed_non_intersection", t.speed_non_intersection);
  lognormal("speed_intersection", t.speed_intersection);
  o.finish();
}

void read_demographics(const json& j, stochastic::DemographicsTable& table) {
  Object o(j, "demographics");
  auto cells = table.cells();
  auto speeds = table.speeds();
  double min_speed = table.min_speed();
  o.with("cells", [&](const json& v, const std::string& f) {
    if (!v.is_array() || v.empty()) throw ConfigError(f, "expected a non-empty array");
    cells.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string g = f + "[" + std::to_string(i) + "]";
      Object c(v[i], g);
      stochastic::DemographicsCell cell;
      c.with("age_group", [&](const json& x, const std::string& h) {
        auto a = stochastic::age_group_from_string(as_string(x, h));
        if (!a) throw ConfigError(h, "expected teen, young, middle or older");
        cell.age_group = *a;
      });
      c.with("gender", [&](const json& x, const std::string& h) {
        auto a = stochastic::gender_from_string(as_string(x, h));
        if (!a) throw ConfigError(h, "expected female or male");
        cell.gender = *a;
      });
      c.with("risk_preference", [&](const json& x, const std::string& h) {
        auto a = stochastic::risk_preference_from_string(as_string(x, h));
        if (!a) throw ConfigError(h, "expected unaware, pass_first or yield_back");
        cell.risk_preference = *a;
      });
      c.number("weight", cell.weight);
      c.finish();
      cells.push_back(cell);
    }
  });
  o.with("speeds", [&](const json& v, const std::string& f) {
    Object s(v, f);
    for (auto g : stochastic::kAgeGroups) {
      const std::string key(stochastic::to_string(g));
      s.with(key, [&](const json& x, const std::string& h) {
        Object gs(x, h);
        auto& sp = speeds[static_cast<std::size_t>(g)];
        gs.number("mean", sp.mean);
        gs.number("sd", sp.sd);
        gs.finish();
      });
    }
    s.finish();
  });
  o.number("min_speed", min_speed);
  o.finish();
  table = wrap<stochastic::DemographicsTable>(
      "demographics", [&] { return stochastic::DemographicsTable::make(cells, speeds, min_speed); });
}

void read_safety(const json& j, safety::SafetyParams& p) {
  Object o(j, "safety");
  o.number("horizon", p.horizon);
  o.number("conflict_gate", p.conflict_gate);
  o.number("tmd_threshold", p.tmd_threshold);
  o.number("cs_threshold", p.cs_threshold);
  o.with("injury_speed_unit", [&](const json& v, const std::string& f) {
    auto u = safety::speed_unit_from_string(as_string(v, f));
    if (!u) throw ConfigError(f, "expected \"km/h\" or \"m/s\"");
    p.injury_speed_unit = *u;
  });
  o.finish();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json sensor_json(const perception::SensorSpec& s) {
  json j;
  j["enabled"] = s.enabled;
  j["position"] = {s.position.x(), s.position.y(), s.position.z()};
  j["yaw_deg"] = s.yaw_deg;
  j["pitch_deg"] = s.pitch_deg;
  j["width"] = s.intrinsics.width;
  j["height"] = s.intrinsics.height;
  j["fov_deg"] = s.intrinsics.fov_deg;
  j["max_range"] = s.max_range;
  j["visibility_threshold"] = s.visibility_threshold;
  j["blend_delta"] = s.blend_delta;
  j["blend_detect_prob"] = s.blend_detect_prob;
  j["depth_quantization"] = s.depth_quantization;
  j["kmeans_k"] = s.kmeans_k;
  return j;
}

json rgb_json(const Rgb& c) { return {c.r, c.g, c.b}; }

}  // namespace

void validate(const ExperimentConfig& c) {
  if (c.episodes < 1) throw ConfigError("episodes", "must be at least 1");
  if (c.modes.empty()) throw ConfigError("modes", "at least one mode is required");
  for (std::size_t i = 0; i < c.modes.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (c.modes[i] == c.modes[k]) throw ConfigError("modes", "modes must not repeat");
    }
  }
  if (c.workers < 1) throw ConfigError("workers", "must be at least 1");
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  const auto& s = c.safety;
  if (!(s.horizon > 0.0)) throw ConfigError("safety.horizon", "must be positive");
  if (!(s.conflict_gate > 0.0)) throw ConfigError("safety.conflict_gate", "must be positive");
  if (!(s.tmd_threshold > 0.0)) throw ConfigError("safety.tmd_threshold", "must be positive");
  if (!(s.cs_threshold >= 0.0)) throw ConfigError("safety.cs_threshold", "must be >= 0");
  c.scenario.validate();
}

ExperimentConfig default_config(std::string_view scenario) {
  ExperimentConfig c;
  c.scenario_name = std::string(scenario);
  c.scenario = world::builtin_scenario(scenario);
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    if (auto pos = what.find("] "); pos != std::string::npos) what = what.substr(pos + 2);
    throw ConfigError("<json>", "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                    ": " + what);
  }

  Object o(root, "");
  const json* name = o.get("scenario");
  if (name == nullptr) throw ConfigError("scenario", "required");
  ExperimentConfig c = default_config(as_string(*name, "scenario"));

  o.with("scenario_overrides", [&](const json& v, const std::string&) { read_overrides(v, c.scenario); });
  o.with("modes", [&](const json& v, const std::string& f) {
    if (!v.is_array()) throw ConfigError(f, "expected an array of mode names");
    c.modes.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string g = f + "[" + std::to_string(i) + "]";
      auto m = mode_from_string(as_string(v[i], g));
      if (!m) throw ConfigError(g, "expected single_vehicle or v2i");
      c.modes.push_back(*m);
    }
  });
  o.with("episodes", [&](const json& v, const std::string& f) { c.episodes = as_u64(v, f); });
  o.with("master_seed", [&](const json& v, const std::string& f) { c.master_seed = as_u64(v, f); });
  o.with("output_dir", [&](const json& v, const std::string& f) { c.output_dir = as_string(v, f); });
  o.with("workers", [&](const json& v, const std::string& f) {
    c.workers = static_cast<unsigned>(std::min<std::uint64_t>(as_u64(v, f), 1024));
  });
  o.with("write_trajectories",
         [&](const json& v, const std::string& f) { c.write_trajectories = as_bool(v, f); });
  o.with("distributions", [&](const json& v, const std::string&) { read_distributions(v, c.scenario.traffic); });
  o.with("demographics", [&](const json& v, const std::string&) { read_demographics(v, c.scenario.demographics); });
  o.with("sensors", [&](const json& v, const std::string& f) {
    Object s(v, f);
    s.with("onboard", [&](const json& x, const std::string& g) { read_sensor(x, g, c.scenario.sensors.onboard); });
    s.with("roadside", [&](const json& x, const std::string& g) { read_sensor(x, g, c.scenario.sensors.roadside); });
    s.finish();
  });
  o.with("safety", [&](const json& v, const std::string&) { read_safety(v, c.safety); });
  o.finish();

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file " + path.string());
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  const auto& s = c.scenario;
  json j;
  j["scenario"] = c.scenario_name;

  json ov;
  ov["frames"] = s.frames;
  ov["dt"] = s.dt;
  ov["rules"]["speed_limit"] = s.rules.speed_limit ? json(*s.rules.speed_limit) : json(nullptr);
  ov["rules"]["pedestrian_right_of_way"] = s.rules.pedestrian_right_of_way;
  const auto& b = s.behavior;
  ov["behavior"] = {{"a_brake", b.a_brake},
                    {"resume_accel", b.resume_accel},
                    {"awareness_radius", b.awareness_radius},
                    {"pass_first_multiplier", b.pass_first_multiplier},
                    {"yield_back_seconds", b.yield_back_seconds},
                    {"conflict_horizon", b.conflict_horizon},
                    {"corridor_buffer", b.corridor_buffer},
                    {"lookahead_margin", b.lookahead_margin},
                    {"arrival_tolerance", b.arrival_tolerance}};
  if (const int e = s.ego_index(); e >= 0) {
    if (const auto* a = std::get_if<world::ArrivalPlacement>(&s.vehicles[e].placement)) {
      ov["ego"]["arrival_window"] = {a->t_min, a->t_max};
    }
  }
  if (!s.pedestrians.empty()) {
    const auto& p = s.pedestrians.front();
    ov["pedestrian"] = {{"origin_min", {p.origin_min.x(), p.origin_min.y()}},
                        {"origin_max", {p.origin_max.x(), p.origin_max.y()}},
                        {"destination_y", p.destination_y},
                        {"body_color", rgb_json(p.body_color)},
                        {"height", p.height},
                        {"radius", p.radius}};
  }
  json colors = json::object();
  for (const auto& v : s.vehicles) colors[v.name] = rgb_json(v.color);
  ov["vehicle_colors"] = colors;
  j["scenario_overrides"] = ov;

  json modes = json::array();
  for (auto m : c.modes) modes.push_back(std::string(to_string(m)));
  j["modes"] = modes;
  j["episodes"] = c.episodes;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  j["write_trajectories"] = c.write_trajectories;

  const auto& t = s.traffic;
  j["distributions"] = {
      {"headway", {{"lambda", t.headway.lambda}}},
      {"speed_non_intersection", {{"mu", t.speed_non_intersection.mu}, {"sigma", t.speed_non_intersection.sigma}}},
      {"speed_intersection", {{"mu", t.speed_intersection.mu}, {"sigma", t.speed_intersection.sigma}}}};

  json cells = json::array();
  for (const auto& cell : s.demographics.cells()) {
    cells.push_back({{"age_group", stochastic::to_string(cell.age_group)},
                     {"gender", stochastic::to_string(cell.gender)},
                     {"risk_preference", stochastic::to_string(cell.risk_preference)},
                     {"weight", cell.weight}});
  }
  json speeds;
  for (auto g : stochastic::kAgeGroups) {
    const auto& sp = s.demographics.speed(g);
    speeds[std::string(stochastic::to_string(g))] = {{"mean", sp.mean}, {"sd", sp.sd}};
  }
  j["demographics"] = {{"cells", cells}, {"speeds", speeds}, {"min_speed", s.demographics.min_speed()}};

  j["sensors"] = {{"onboard", sensor_json(s.sensors.onboard)},
                  {"roadside", sensor_json(s.sensors.roadside)}};
  j["safety"] = {{"horizon", c.safety.horizon},
                 {"conflict_gate", c.safety.conflict_gate},
                 {"tmd_threshold", c.safety.tmd_threshold},
                 {"cs_threshold", c.safety.cs_threshold},
                 {"injury_speed_unit", safety::to_string(c.safety.injury_speed_unit)}};
  return j.dump(2);
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return config.output_dir;
}

}  // namespace pedsafe::harness
