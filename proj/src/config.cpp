#include "gmpc/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace gmpc {

using nlohmann::json;

namespace {

json vec2_to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
Vec2 vec2_from_json(const json& j) { return Vec2(j.at(0).get<double>(), j.at(1).get<double>()); }

json box2_to_json(const Box2& b) {
  return json::array({b.min().x(), b.min().y(), b.max().x(), b.max().y()});
}
Box2 box2_from_json(const json& j) {
  Box2 b;
  b.extend(Vec2(j.at(0).get<double>(), j.at(1).get<double>()));
  b.extend(Vec2(j.at(2).get<double>(), j.at(3).get<double>()));
  return b;
}

json grouping_to_json(const GroupingConfig& g) {
  return {{"eps_s", g.eps_s},   {"eps_theta", g.eps_theta}, {"eps_v", g.eps_v},
          {"C", g.C},           {"C_min", g.C_min},         {"C_step", g.C_step},
          {"boundary_samples", g.boundary_samples}};
}

GroupingConfig grouping_from_json(const json& j) {
  GroupingConfig g;
  g.eps_s = j.value("eps_s", g.eps_s);
  g.eps_theta = j.value("eps_theta", g.eps_theta);
  g.eps_v = j.value("eps_v", g.eps_v);
  g.C = j.value("C", g.C);
  g.C_min = j.value("C_min", g.C_min);
  g.C_step = j.value("C_step", g.C_step);
  g.boundary_samples = j.value("boundary_samples", g.boundary_samples);
  return g;
}

json snapshot_to_json(const WorldSnapshot& s) {
  json agents = json::array();
  for (const AugmentedAgentState& a : s.agents) {
    agents.push_back({{"id", a.id},
                      {"pos", vec2_to_json(a.position)},
                      {"vel", vec2_to_json(a.velocity)}});
  }
  return {{"t", s.time_index}, {"robot", vec2_to_json(s.robot.position)}, {"agents", agents}};
}

WorldSnapshot snapshot_from_json(const json& j) {
  WorldSnapshot s;
  s.time_index = j.at("t").get<int>();
  s.robot = {-1, vec2_from_json(j.at("robot"))};
  for (const json& ja : j.at("agents")) {
    AugmentedAgentState a;
    a.id = ja.at("id").get<int>();
    a.position = vec2_from_json(ja.at("pos"));
    a.velocity = vec2_from_json(ja.at("vel"));
    a.speed = a.velocity.norm();
    a.heading = a.speed > 0.0 ? wrap_heading(std::atan2(a.velocity.y(), a.velocity.x()))
                              : 0.0;
    s.agents.push_back(a);
  }
  return s;
}

json spec_to_json_obj(const TrialSpec& spec) {
  return {{"id", spec.id},
          {"scene", spec.scene},
          {"task", to_string(spec.task)},
          {"start", vec2_to_json(spec.start)},
          {"goal", vec2_to_json(spec.goal)},
          {"segment", json::array({spec.segment_begin, spec.segment_end})},
          {"condition", to_string(spec.condition)},
          {"perception", to_string(spec.perception)}};
}

TrialSpec spec_from_json_obj(const json& j) {
  TrialSpec spec;
  spec.id = j.at("id").get<std::string>();
  spec.scene = j.at("scene").get<std::string>();
  spec.task = task_from_string(j.at("task").get<std::string>());
  spec.start = vec2_from_json(j.at("start"));
  spec.goal = vec2_from_json(j.at("goal"));
  spec.segment_begin = j.at("segment").at(0).get<int>();
  spec.segment_end = j.at("segment").at(1).get<int>();
  spec.condition = condition_from_string(j.at("condition").get<std::string>());
  spec.perception = perception_from_string(j.at("perception").get<std::string>());
  return spec;
}

}  // namespace

SimConfigs RunConfig::sim_configs(const SceneConfig& scene, Condition c,
                                  PolicyKind policy) const {
  SimConfigs cfgs;
  cfgs.world = world;
  cfgs.grouping = scene.grouping;
  cfgs.planner = planner;
  cfgs.planner.lambda = effective_lambda(c);
  cfgs.planner.policy = policy;
  cfgs.planner.horizon = oracle.horizon;
  cfgs.oracle = oracle;
  cfgs.lidar = lidar;
  cfgs.orca = orca;
  return cfgs;
}

const SceneConfig* RunConfig::find_scene(const std::string& name) const {
  for (const SceneConfig& s : scenes) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.world.timeout_steps = 0;  // derived per trial from the timeout factor

  const double deg = 0.017453292519943295;
  GroupingConfig wide;  // eth, hotel, zara1, zara2
  wide.eps_s = 2.0;
  wide.eps_theta = 30.0 * deg;
  wide.eps_v = 1.0;
  wide.C = 0.35;
  GroupingConfig tight;  // univ is denser
  tight.eps_s = 1.5;
  tight.eps_theta = 15.0 * deg;
  tight.eps_v = 0.5;
  tight.C = 0.25;

  struct SceneSeed {
    const char* name;
    GroupingConfig grouping;
    double region[4];
    double flow[4];
    double cross[4];
  };
  // Regions and endpoints are read off the published scene plots; coordinates
  // are approximate and meant to be edited per deployment.
  const SceneSeed seeds[] = {
      {"eth", wide, {-2.0, 0.0, 12.0, 10.0}, {5.0, -3.0, 5.0, 13.0}, {-4.0, 5.0, 14.0, 5.0}},
      {"hotel", wide, {-4.0, -8.0, 4.0, 4.0}, {0.0, -10.0, 0.0, 6.0}, {-6.0, -2.0, 6.0, -2.0}},
      {"zara1", wide, {2.0, 2.0, 12.0, 8.0}, {0.0, 5.0, 14.0, 5.0}, {7.0, 0.0, 7.0, 10.0}},
      {"zara2", wide, {2.0, 2.0, 12.0, 8.0}, {0.0, 5.0, 14.0, 5.0}, {7.0, 0.0, 7.0, 10.0}},
      {"univ", tight, {2.0, 2.0, 13.0, 11.0}, {0.0, 6.0, 15.0, 6.0}, {7.5, 0.0, 7.5, 13.0}},
  };
  for (const SceneSeed& seed : seeds) {
    SceneConfig scene;
    scene.name = seed.name;
    scene.dataset_path = std::string("data/") + seed.name + ".txt";
    scene.frame_interval = 0.4;
    scene.grouping = seed.grouping;
    scene.region.extend(Vec2(seed.region[0], seed.region[1]));
    scene.region.extend(Vec2(seed.region[2], seed.region[3]));
    scene.flow_start = Vec2(seed.flow[0], seed.flow[1]);
    scene.flow_goal = Vec2(seed.flow[2], seed.flow[3]);
    scene.cross_start = Vec2(seed.cross[0], seed.cross[1]);
    scene.cross_goal = Vec2(seed.cross[2], seed.cross[3]);
    cfg.scenes.push_back(std::move(scene));
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  json j = json::parse(in);

  RunConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.condition = condition_from_string(j.value("condition", std::string("offline")));
  cfg.perception =
      perception_from_string(j.value("perception", std::string("ground_truth")));
  if (j.contains("policies")) cfg.policies = j.at("policies").get<std::vector<std::string>>();
  cfg.lambda_offline = j.value("lambda_offline", cfg.lambda_offline);
  cfg.lambda_online = j.value("lambda_online", cfg.lambda_online);
  if (j.contains("lambda") && !j.at("lambda").is_null()) {
    cfg.lambda_override = j.at("lambda").get<double>();
  }
  cfg.timeout_factor = j.value("timeout_factor", cfg.timeout_factor);
  cfg.min_peds = j.value("min_peds", cfg.min_peds);
  cfg.min_segment_len = j.value("min_segment_len", cfg.min_segment_len);
  cfg.prediction_samples_per_scene =
      j.value("prediction_samples_per_scene", cfg.prediction_samples_per_scene);
  cfg.external_forecast_path = j.value("external_forecast_path", std::string());

  if (j.contains("world")) {
    const json& w = j.at("world");
    cfg.world.dt = w.value("dt", cfg.world.dt);
    cfg.world.v_max = w.value("v_max", cfg.world.v_max);
    cfg.world.robot_radius = w.value("robot_radius", cfg.world.robot_radius);
    cfg.world.collision_distance = w.value("collision_distance", cfg.world.collision_distance);
    cfg.world.goal_radius = w.value("goal_radius", cfg.world.goal_radius);
    cfg.world.timeout_steps = w.value("timeout_steps", 0);
  } else {
    cfg.world.timeout_steps = 0;
  }
  if (j.contains("planner")) {
    const json& p = j.at("planner");
    cfg.planner.gamma = p.value("gamma", cfg.planner.gamma);
    cfg.planner.directions = p.value("directions", cfg.planner.directions);
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    cfg.oracle.history_len = o.value("history", cfg.oracle.history_len);
    cfg.oracle.horizon = o.value("horizon", cfg.oracle.horizon);
    const std::string kind = o.value("kind", std::string("linear"));
    if (kind == "linear") cfg.oracle.kind = OracleKind::Linear;
    else if (kind == "hold") cfg.oracle.kind = OracleKind::Hold;
    else if (kind == "external") cfg.oracle.kind = OracleKind::External;
    else throw std::runtime_error("unknown oracle kind: " + kind);
  }
  if (j.contains("lidar")) {
    const json& l = j.at("lidar");
    cfg.lidar.fov = l.value("fov", cfg.lidar.fov);
    cfg.lidar.angular_resolution = l.value("angular_resolution", cfg.lidar.angular_resolution);
    cfg.lidar.max_range = l.value("max_range", cfg.lidar.max_range);
    cfg.lidar.range_noise_sigma = l.value("range_noise_sigma", cfg.lidar.range_noise_sigma);
    cfg.lidar.pedestrian_radius = l.value("pedestrian_radius", cfg.lidar.pedestrian_radius);
    cfg.lidar.cluster_range_jump = l.value("cluster_range_jump", cfg.lidar.cluster_range_jump);
    cfg.lidar.association_radius = l.value("association_radius", cfg.lidar.association_radius);
  }
  if (j.contains("orca")) {
    const json& o = j.at("orca");
    cfg.orca.neighbor_dist = o.value("neighbor_dist", cfg.orca.neighbor_dist);
    cfg.orca.time_horizon = o.value("time_horizon", cfg.orca.time_horizon);
    cfg.orca.agent_radius = o.value("agent_radius", cfg.orca.agent_radius);
    cfg.orca.exit_radius = o.value("exit_radius", cfg.orca.exit_radius);
    cfg.orca.max_speed_factor = o.value("max_speed_factor", cfg.orca.max_speed_factor);
  }
  cfg.scenes.clear();
  for (const json& js : j.value("scenes", json::array())) {
    SceneConfig s;
    s.name = js.at("name").get<std::string>();
    s.dataset_path = js.value("dataset", std::string());
    s.format = js.value("format", std::string("frame_ped_xy")) == "obsmat"
                   ? DatasetFormat::Obsmat
                   : DatasetFormat::FramePedXY;
    s.frame_interval = js.value("frame_interval", 0.4);
    s.grouping = js.contains("grouping") ? grouping_from_json(js.at("grouping"))
                                         : GroupingConfig{};
    if (js.contains("region")) s.region = box2_from_json(js.at("region"));
    if (js.contains("flow_start")) s.flow_start = vec2_from_json(js.at("flow_start"));
    if (js.contains("flow_goal")) s.flow_goal = vec2_from_json(js.at("flow_goal"));
    if (js.contains("cross_start")) s.cross_start = vec2_from_json(js.at("cross_start"));
    if (js.contains("cross_goal")) s.cross_goal = vec2_from_json(js.at("cross_goal"));
    cfg.scenes.push_back(std::move(s));
  }
  validate(cfg);
  return cfg;
}

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path) {
  json j;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["out_dir"] = cfg.out_dir;
  j["condition"] = to_string(cfg.condition);
  j["perception"] = to_string(cfg.perception);
  j["policies"] = cfg.policies;
  j["lambda_offline"] = cfg.lambda_offline;
  j["lambda_online"] = cfg.lambda_online;
  j["lambda"] = cfg.lambda_override.has_value() ? json(*cfg.lambda_override) : json();
  j["timeout_factor"] = cfg.timeout_factor;
  j["min_peds"] = cfg.min_peds;
  j["min_segment_len"] = cfg.min_segment_len;
  j["prediction_samples_per_scene"] = cfg.prediction_samples_per_scene;
  j["external_forecast_path"] = cfg.external_forecast_path;
  j["world"] = {{"dt", cfg.world.dt},
                {"v_max", cfg.world.v_max},
                {"robot_radius", cfg.world.robot_radius},
                {"collision_distance", cfg.world.collision_distance},
                {"goal_radius", cfg.world.goal_radius},
                {"timeout_steps", cfg.world.timeout_steps}};
  j["planner"] = {{"gamma", cfg.planner.gamma}, {"directions", cfg.planner.directions}};
  const char* kind = cfg.oracle.kind == OracleKind::Linear
                         ? "linear"
                         : cfg.oracle.kind == OracleKind::Hold ? "hold" : "external";
  j["oracle"] = {{"history", cfg.oracle.history_len},
                 {"horizon", cfg.oracle.horizon},
                 {"kind", kind}};
  j["lidar"] = {{"fov", cfg.lidar.fov},
                {"angular_resolution", cfg.lidar.angular_resolution},
                {"max_range", cfg.lidar.max_range},
                {"range_noise_sigma", cfg.lidar.range_noise_sigma},
                {"pedestrian_radius", cfg.lidar.pedestrian_radius},
                {"cluster_range_jump", cfg.lidar.cluster_range_jump},
                {"association_radius", cfg.lidar.association_radius}};
  j["orca"] = {{"neighbor_dist", cfg.orca.neighbor_dist},
               {"time_horizon", cfg.orca.time_horizon},
               {"agent_radius", cfg.orca.agent_radius},
               {"exit_radius", cfg.orca.exit_radius},
               {"max_speed_factor", cfg.orca.max_speed_factor}};
  j["scenes"] = json::array();
  for (const SceneConfig& s : cfg.scenes) {
    json js;
    js["name"] = s.name;
    js["dataset"] = s.dataset_path;
    js["format"] = s.format == DatasetFormat::Obsmat ? "obsmat" : "frame_ped_xy";
    js["frame_interval"] = s.frame_interval;
    js["grouping"] = grouping_to_json(s.grouping);
    js["region"] = box2_to_json(s.region);
    js["flow_start"] = vec2_to_json(s.flow_start);
    js["flow_goal"] = vec2_to_json(s.flow_goal);
    js["cross_start"] = vec2_to_json(s.cross_start);
    js["cross_goal"] = vec2_to_json(s.cross_goal);
    js["region_is_approximate"] = true;
    j["scenes"].push_back(std::move(js));
  }
  atomic_write(path, j.dump(2) + "\n");
}

std::string to_json(const TrialSpec& spec) { return spec_to_json_obj(spec).dump(); }

TrialSpec trial_spec_from_json(const std::string& text) {
  return spec_from_json_obj(json::parse(text));
}

std::string to_json(const TrialRecord& record) {
  json j;
  j["spec"] = spec_to_json_obj(record.spec);
  j["policy"] = record.policy;
  j["effective_lambda"] = record.effective_lambda;
  j["timeout_steps"] = record.timeout_steps;
  j["seed"] = record.seed;
  j["termination"] = to_string(record.termination);
  json trace = json::array();
  for (const Vec2& p : record.robot_trace) trace.push_back(vec2_to_json(p));
  j["robot_trace"] = std::move(trace);
  json snaps = json::array();
  for (const WorldSnapshot& s : record.snapshots) snaps.push_back(snapshot_to_json(s));
  j["snapshots"] = std::move(snaps);
  return j.dump();
}

TrialRecord trial_record_from_json(const std::string& text) {
  const json j = json::parse(text);
  TrialRecord record;
  record.spec = spec_from_json_obj(j.at("spec"));
  record.policy = j.at("policy").get<std::string>();
  record.effective_lambda = j.at("effective_lambda").get<double>();
  record.timeout_steps = j.at("timeout_steps").get<int>();
  record.seed = j.at("seed").get<unsigned>();
  record.termination = termination_from_string(j.at("termination").get<std::string>());
  for (const json& jp : j.at("robot_trace")) record.robot_trace.push_back(vec2_from_json(jp));
  for (const json& js : j.at("snapshots")) record.snapshots.push_back(snapshot_from_json(js));
  return record;
}

std::string to_json(const MetricsEntry& entry) {
  json j;
  j["policy"] = entry.policy;
  j["scene"] = entry.scene;
  j["task"] = to_string(entry.task);
  j["condition"] = to_string(entry.condition);
  j["trial_id"] = entry.trial_id;
  j["success"] = entry.metrics.success;
  j["comfort"] = entry.metrics.comfort;
  j["min_ped_distance"] = std::isfinite(entry.metrics.min_ped_distance)
                              ? json(entry.metrics.min_ped_distance)
                              : json();
  j["path_length"] = entry.metrics.path_length;
  return j.dump();
}

MetricsEntry metrics_entry_from_json(const std::string& text) {
  const json j = json::parse(text);
  MetricsEntry entry;
  entry.policy = j.at("policy").get<std::string>();
  entry.scene = j.at("scene").get<std::string>();
  entry.task = task_from_string(j.at("task").get<std::string>());
  entry.condition = condition_from_string(j.at("condition").get<std::string>());
  entry.trial_id = j.at("trial_id").get<std::string>();
  entry.metrics.success = j.at("success").get<bool>();
  entry.metrics.comfort = j.at("comfort").get<bool>();
  entry.metrics.min_ped_distance =
      j.at("min_ped_distance").is_null() ? std::numeric_limits<double>::infinity()
                                         : j.at("min_ped_distance").get<double>();
  entry.metrics.path_length = j.at("path_length").get<double>();
  return entry;
}

void validate(const RunConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  require(cfg.world.dt > 0.0, "world.dt must be positive");
  require(cfg.world.v_max > 0.0, "world.v_max must be positive");
  require(cfg.world.collision_distance > 0.0, "collision_distance must be positive");
  require(cfg.world.goal_radius > 0.0, "goal_radius must be positive");
  require(cfg.oracle.horizon >= 1, "oracle horizon must be at least 1");
  require(cfg.oracle.history_len >= (cfg.oracle.kind == OracleKind::Linear ? 2 : 1),
          "oracle history too short for the configured kind");
  require(cfg.planner.directions >= 4, "planner needs at least 4 directions");
  require(cfg.planner.gamma > 0.0 && cfg.planner.gamma <= 1.0, "gamma must be in (0, 1]");
  const double lambda_off = cfg.lambda_override.value_or(cfg.lambda_offline);
  const double lambda_on = cfg.lambda_override.value_or(cfg.lambda_online);
  require(lambda_off >= 0.0 && lambda_off <= 1.0, "lambda must be in [0, 1]");
  require(lambda_on >= 0.0 && lambda_on <= 1.0, "lambda must be in [0, 1]");
  require(cfg.lidar.fov > 0.0 && cfg.lidar.fov <= 2.0 * 3.14159265358979324,
          "lidar fov must be in (0, 2pi]");
  require(cfg.lidar.angular_resolution > 0.0, "lidar resolution must be positive");
  require(cfg.lidar.max_range > 0.0, "lidar max_range must be positive");
  require(cfg.lidar.range_noise_sigma >= 0.0, "lidar noise sigma must be nonnegative");
  require(cfg.orca.time_horizon > 0.0, "orca time horizon must be positive");
  require(cfg.orca.agent_radius > 0.0, "orca agent radius must be positive");
  require(cfg.workers >= 1, "workers must be at least 1");
  for (const SceneConfig& scene : cfg.scenes) {
    const GroupingConfig& g = scene.grouping;
    require(g.eps_s > 0.0 && g.eps_theta > 0.0 && g.eps_v > 0.0,
            "clustering thresholds must be positive");
    require(g.C_min > 0.0 && g.C_min <= g.C, "need 0 < C_min <= C");
    require(g.C_step > 0.0, "C_step must be positive");
    require(g.boundary_samples >= 8, "need at least 8 boundary samples");
    require(scene.frame_interval > 0.0, "frame_interval must be positive");
    require(!scene.region.isEmpty(), "test region must have positive area");
  }
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace gmpc
