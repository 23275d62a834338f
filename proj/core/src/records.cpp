#include "pedsafe/records.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "pedsafe/error.hpp"

namespace pedsafe::harness {

using json = nlohmann::ordered_json;

namespace {

json profile_json(const stochastic::PedestrianProfile& p) {
  return {{"age", p.age},
          {"gender", stochastic::to_string(p.gender)},
          {"age_group", stochastic::to_string(p.age_group)},
          {"risk_preference", stochastic::to_string(p.risk_preference)},
          {"base_speed", p.base_speed}};
}

template <typename T>
T parse_enum(std::optional<T> v, const char* what) {
  if (!v) throw IoError(std::string("record has an invalid ") + what);
  return *v;
}

stochastic::PedestrianProfile profile_from(const json& j) {
  stochastic::PedestrianProfile p;
  p.age = j.at("age").get<double>();
  p.gender = parse_enum(stochastic::gender_from_string(j.at("gender").get<std::string>()), "gender");
  p.age_group =
      parse_enum(stochastic::age_group_from_string(j.at("age_group").get<std::string>()), "age group");
  p.risk_preference = parse_enum(
      stochastic::risk_preference_from_string(j.at("risk_preference").get<std::string>()),
      "risk preference");
  p.base_speed = j.at("base_speed").get<double>();
  return p;
}

json collision_json(const world::CollisionEvent& c) {
  return {{"frame", c.frame},
          {"pedestrian", c.pedestrian},
          {"impact_speed", c.impact_speed},
          {"pedestrian_age", c.pedestrian_age}};
}

world::CollisionEvent collision_from(const json& j) {
  return {j.at("frame").get<int>(), j.at("pedestrian").get<int>(), j.at("impact_speed").get<double>(),
          j.at("pedestrian_age").get<double>()};
}

json detection_json(const perception::Detection& d) {
  return {{"frame", d.frame},
          {"source", perception::to_string(d.source)},
          {"pedestrian", d.pedestrian},
          {"bbox", {d.bbox.u_min, d.bbox.v_min, d.bbox.u_max, d.bbox.v_max}},
          {"anchor", {d.anchor.u, d.anchor.v}},
          {"est_distance", d.est_distance},
          {"est_position", {d.est_position_world.x(), d.est_position_world.y()}},
          {"truth_position", {d.truth_position_world.x(), d.truth_position_world.y()}},
          {"out_of_frame", d.out_of_frame}};
}

perception::Detection detection_from(const json& j) {
  perception::Detection d;
  d.frame = j.at("frame").get<int>();
  const auto src = j.at("source").get<std::string>();
  if (src == "onboard") {
    d.source = perception::Source::onboard;
  } else if (src == "roadside") {
    d.source = perception::Source::roadside;
  } else {
    throw IoError("record has an invalid detection source");
  }
  d.pedestrian = j.at("pedestrian").get<int>();
  const auto& b = j.at("bbox");
  d.bbox = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
  d.anchor = {j.at("anchor").at(0).get<double>(), j.at("anchor").at(1).get<double>()};
  d.est_distance = j.at("est_distance").get<double>();
  d.est_position_world = {j.at("est_position").at(0).get<double>(), j.at("est_position").at(1).get<double>()};
  d.truth_position_world = {j.at("truth_position").at(0).get<double>(),
                            j.at("truth_position").at(1).get<double>()};
  d.out_of_frame = j.at("out_of_frame").get<bool>();
  return d;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string csv_number(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

}  // namespace

std::string record_to_json(const world::EpisodeRecord& rec, bool with_frames) {
  json j;
  j["episode"] = rec.episode_index;
  j["scenario"] = rec.scenario;
  j["mode"] = to_string(rec.mode);
  j["seed"] = rec.seed;
  j["dt"] = rec.dt;
  j["ego"] = rec.ego;
  j["num_vehicles"] = rec.num_vehicles;
  json peds = json::array();
  for (const auto& p : rec.pedestrians) peds.push_back(profile_json(p));
  j["pedestrians"] = peds;
  j["contact_radii"] = rec.contact_radii;
  j["termination"] = world::to_string(rec.termination);
  j["outcome"] = safety::to_string(rec.outcome);
  json labels = json::array();
  for (auto l : rec.labels) labels.push_back(safety::to_string(l));
  j["labels"] = labels;
  json ind = json::array();
  for (const auto& i : rec.indicators) {
    ind.push_back({{"md", i.md}, {"tmd", i.tmd}, {"cs", i.cs}, {"frame", i.frame}});
  }
  j["indicators"] = ind;
  json col = json::array();
  for (const auto& c : rec.collisions) col.push_back(collision_json(c));
  j["collisions"] = col;
  j["first_detection_distance"] = optional_number(safety::first_detection_distance(rec));
  json det = json::array();
  for (const auto& d : rec.detections) det.push_back(detection_json(d));
  j["detections"] = det;
  if (with_frames) {
    json frames = json::array();
    for (const auto& f : rec.frames) {
      json row = json::array({f.frame, f.time});
      for (const auto& a : f.agents) {
        row.push_back(a.x);
        row.push_back(a.y);
        row.push_back(a.heading);
        row.push_back(a.speed);
        row.push_back(a.accel);
      }
      frames.push_back(std::move(row));
    }
    j["frames"] = frames;
  }
  return j.dump();
}

world::EpisodeRecord record_from_json(std::string_view line) {
  try {
    const json j = json::parse(line.begin(), line.end());
    world::EpisodeRecord rec;
    rec.episode_index = j.at("episode").get<std::uint64_t>();
    rec.scenario = j.at("scenario").get<std::string>();
    rec.mode = parse_enum(mode_from_string(j.at("mode").get<std::string>()), "mode");
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.dt = j.at("dt").get<double>();
    rec.ego = j.at("ego").get<int>();
    rec.num_vehicles = j.at("num_vehicles").get<int>();
    for (const auto& p : j.at("pedestrians")) rec.pedestrians.push_back(profile_from(p));
    rec.contact_radii = j.at("contact_radii").get<std::vector<double>>();
    rec.termination = parse_enum(world::termination_from_string(j.at("termination").get<std::string>()),
                                 "termination");
    rec.outcome = parse_enum(safety::event_label_from_string(j.at("outcome").get<std::string>()), "outcome");
    for (const auto& l : j.at("labels")) {
      rec.labels.push_back(parse_enum(safety::event_label_from_string(l.get<std::string>()), "label"));
    }
    for (const auto& i : j.at("indicators")) {
      rec.indicators.push_back({i.at("md").get<double>(), i.at("tmd").get<double>(),
                                i.at("cs").get<double>(), i.at("frame").get<int>()});
    }
    for (const auto& c : j.at("collisions")) rec.collisions.push_back(collision_from(c));
    for (const auto& d : j.at("detections")) rec.detections.push_back(detection_from(d));
    if (auto it = j.find("frames"); it != j.end()) {
      const std::size_t agents = rec.num_vehicles + rec.pedestrians.size();
      for (const auto& row : *it) {
        if (row.size() != 2 + 5 * agents) throw IoError("record frame has the wrong width");
        world::FrameRecord f;
        f.frame = row[0].get<int>();
        f.time = row[1].get<double>();
        for (std::size_t a = 0; a < agents; ++a) {
          const std::size_t k = 2 + 5 * a;
          f.agents.push_back({row[k].get<double>(), row[k + 1].get<double>(), row[k + 2].get<double>(),
                              row[k + 3].get<double>(), row[k + 4].get<double>()});
        }
        rec.frames.push_back(std::move(f));
      }
    }
    return rec;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed episode record: ") + e.what());
  }
}

std::vector<safety::EpisodeSummary> read_summaries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records file " + path.string());
  std::vector<safety::EpisodeSummary> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (j.at("episode").get<std::uint64_t>() != out.size()) {
        throw IoError("records file " + path.string() + " is out of order at line " +
                      std::to_string(out.size() + 1));
      }
      safety::EpisodeSummary s;
      s.outcome = parse_enum(safety::event_label_from_string(j.at("outcome").get<std::string>()), "outcome");
      const auto& col = j.at("collisions");
      if (!col.empty()) s.collision = collision_from(col.at(0));
      s.first_detection_distance = optional_from(j.at("first_detection_distance"));
      out.push_back(s);
    } catch (const json::exception& e) {
      throw IoError("malformed record in " + path.string() + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("cannot read records file " + path.string());
  return out;
}

std::string report_to_csv(const safety::SafetyReport& r) {
  return fmt::format("{}\n{},{},{},{},{},{},{},{},{}\n", kReportCsvHeader, r.scenario,
                     to_string(r.mode), r.episodes, r.collision_rate, r.conflict_rate, r.mean_injury,
                     csv_number(r.fdd_p10), csv_number(r.fdd_p50), csv_number(r.fdd_p90));
}

std::string report_to_json(const safety::SafetyReport& r) {
  json j;
  j["scenario"] = r.scenario;
  j["mode"] = to_string(r.mode);
  j["episodes"] = r.episodes;
  j["collisions"] = r.collisions;
  j["conflicts"] = r.conflicts;
  j["detected"] = r.detected;
  j["collision_rate"] = r.collision_rate;
  j["conflict_rate"] = r.conflict_rate;
  j["mean_injury"] = r.mean_injury;
  j["fdd_p10"] = optional_number(r.fdd_p10);
  j["fdd_p50"] = optional_number(r.fdd_p50);
  j["fdd_p90"] = optional_number(r.fdd_p90);
  j["injury_speed_unit"] = safety::to_string(r.injury_speed_unit);
  json surface = json::array();
  for (const auto& p : r.injury_surface) surface.push_back({p.v, p.age, p.p_injury});
  j["injury_surface_columns"] = {"V", "A", "P_I"};
  j["injury_surface"] = surface;
  return j.dump(2) + "\n";
}

safety::SafetyReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text.begin(), text.end());
    safety::SafetyReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.mode = parse_enum(mode_from_string(j.at("mode").get<std::string>()), "mode");
    r.episodes = j.at("episodes").get<std::size_t>();
    r.collisions = j.at("collisions").get<std::size_t>();
    r.conflicts = j.at("conflicts").get<std::size_t>();
    r.detected = j.at("detected").get<std::size_t>();
    r.collision_rate = j.at("collision_rate").get<double>();
    r.conflict_rate = j.at("conflict_rate").get<double>();
    r.mean_injury = j.at("mean_injury").get<double>();
    r.fdd_p10 = optional_from(j.at("fdd_p10"));
    r.fdd_p50 = optional_from(j.at("fdd_p50"));
    r.fdd_p90 = optional_from(j.at("fdd_p90"));
    r.injury_speed_unit = parse_enum(
        safety::speed_unit_from_string(j.at("injury_speed_unit").get<std::string>()), "speed unit");
    for (const auto& p : j.at("injury_surface")) {
      r.injury_surface.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace pedsafe::harness
