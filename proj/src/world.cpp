#include "gmpc/world.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace gmpc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == '#' || c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

double wrap_heading(double angle) {
  double h = std::fmod(angle, kTwoPi);
  if (h < 0.0) h += kTwoPi;
  if (h >= kTwoPi) h = 0.0;
  return h;
}

double heading_distance(double a, double b) {
  double d = std::fabs(wrap_heading(a) - wrap_heading(b));
  if (d > std::numbers::pi) d = kTwoPi - d;
  return d;
}

Recording load_recording(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open dataset file: " + path.string());
  }

  // frame id -> (agent id -> position); duplicate annotations keep the last.
  std::map<long, std::map<int, Vec2>> frames;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    std::istringstream row(line);
    double frame_raw = 0.0, ped_raw = 0.0;
    double cols[6] = {0, 0, 0, 0, 0, 0};
    if (!(row >> frame_raw >> ped_raw >> cols[0] >> cols[1])) {
      throw ParseError("malformed row in " + path.filename().string() + " at line " +
                           std::to_string(line_no),
                       line_no);
    }
    double x = cols[0];
    double y = cols[1];
    if (format == DatasetFormat::Obsmat) {
      // obsmat rows carry 8 columns; position y sits after the z column.
      if (!(row >> cols[2] >> cols[3] >> cols[4] >> cols[5])) {
        throw ParseError("malformed obsmat row in " + path.filename().string() +
                             " at line " + std::to_string(line_no),
                         line_no);
      }
      y = cols[2];
    }
    const long frame_id = std::lround(frame_raw);
    const int ped_id = static_cast<int>(std::lround(ped_raw));
    frames[frame_id][ped_id] = Vec2(x, y);
  }
  if (frames.empty()) {
    throw EmptyRecordingError("empty recording: " + path.string());
  }

  Recording rec;
  rec.scene_name = path.stem().string();
  rec.frames.reserve(frames.size());
  for (const auto& [frame_id, agents] : frames) {
    RecordingFrame frame;
    frame.frame_id = frame_id;
    frame.agents.reserve(agents.size());
    for (const auto& [id, pos] : agents) {
      frame.agents.push_back({id, pos});
    }
    rec.frames.push_back(std::move(frame));
  }
  return rec;
}

std::vector<WorldSnapshot> resample(const Recording& recording, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("resample: dt must be positive");
  if (recording.frames.empty()) {
    throw EmptyRecordingError("resample: recording has no frames");
  }

  // Frame ids advance by a fixed stride in these datasets; one annotated
  // frame every frame_interval seconds. Use the smallest observed gap as the
  // stride so missing frames keep their real timing.
  const long first_id = recording.frames.front().frame_id;
  long stride = 1;
  if (recording.frames.size() > 1) {
    stride = std::numeric_limits<long>::max();
    for (std::size_t i = 1; i < recording.frames.size(); ++i) {
      stride = std::min(stride,
                        recording.frames[i].frame_id - recording.frames[i - 1].frame_id);
    }
    stride = std::max<long>(stride, 1);
  }
  const double seconds_per_unit = recording.frame_interval / static_cast<double>(stride);
  auto frame_time = [&](long frame_id) {
    return static_cast<double>(frame_id - first_id) * seconds_per_unit;
  };

  // Per-agent annotated trajectory, sorted by time.
  struct Sample {
    double t;
    Vec2 pos;
  };
  std::map<int, std::vector<Sample>> tracks;
  for (const RecordingFrame& frame : recording.frames) {
    const double t = frame_time(frame.frame_id);
    for (const AgentState& a : frame.agents) {
      tracks[a.id].push_back({t, a.position});
    }
  }

  const double t_end = frame_time(recording.frames.back().frame_id);
  const int n_steps = static_cast<int>(std::floor(t_end / dt + 1e-9)) + 1;
  constexpr double kEps = 1e-9;

  std::vector<WorldSnapshot> snapshots(n_steps);
  for (int k = 0; k < n_steps; ++k) {
    snapshots[k].time_index = k;
  }

  for (const auto& [id, samples] : tracks) {
    const double t_first = samples.front().t;
    const double t_last = samples.back().t;
    std::size_t seg = 0;
    for (int k = 0; k < n_steps; ++k) {
      const double t = k * dt;
      if (t < t_first - kEps || t > t_last + kEps) continue;
      while (seg + 1 < samples.size() && samples[seg + 1].t < t - kEps) ++seg;
      Vec2 pos = samples[seg].pos;
      if (seg + 1 < samples.size() && t > samples[seg].t + kEps) {
        const double span = samples[seg + 1].t - samples[seg].t;
        const double alpha = std::clamp((t - samples[seg].t) / span, 0.0, 1.0);
        pos += alpha * (samples[seg + 1].pos - samples[seg].pos);
      }
      AugmentedAgentState st;
      st.id = id;
      st.position = pos;
      snapshots[k].agents.push_back(st);
    }
  }

  for (WorldSnapshot& snap : snapshots) {
    std::sort(snap.agents.begin(), snap.agents.end(),
              [](const AugmentedAgentState& a, const AugmentedAgentState& b) {
                return a.id < b.id;
              });
  }
  return snapshots;
}

std::vector<AugmentedAgentState> extract_augmented_states(const WorldSnapshot& prev,
                                                          const WorldSnapshot& curr,
                                                          double dt) {
  if (dt <= 0.0) throw std::invalid_argument("extract_augmented_states: dt must be positive");

  std::map<int, Vec2> prev_pos;
  for (const AugmentedAgentState& a : prev.agents) prev_pos[a.id] = a.position;

  std::vector<AugmentedAgentState> out;
  out.reserve(curr.agents.size());
  for (const AugmentedAgentState& a : curr.agents) {
    AugmentedAgentState st;
    st.id = a.id;
    st.position = a.position;
    auto it = prev_pos.find(a.id);
    if (it != prev_pos.end()) {
      st.velocity = (a.position - it->second) / dt;
      st.speed = st.velocity.norm();
      st.heading = st.speed > 0.0 ? wrap_heading(std::atan2(st.velocity.y(), st.velocity.x()))
                                  : 0.0;
    }
    out.push_back(st);
  }
  return out;
}

}  // namespace gmpc
