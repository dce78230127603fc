#include "gmpc/prediction.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gmpc {

ExternalForecastStore ExternalForecastStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open forecast file: " + path.string());
  }
  ExternalForecastStore store;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream row(line);
    std::string trial;
    int step, label;
    if (!(row >> trial >> step >> label)) {
      if (trial.empty()) continue;  // blank line
      throw std::runtime_error("malformed forecast record at line " +
                               std::to_string(line_no));
    }
    Polygon poly;
    double x, y;
    while (row >> x >> y) poly.emplace_back(x, y);
    store.insert(trial, step, label, std::move(poly));
  }
  return store;
}

void ExternalForecastStore::insert(const std::string& trial, int step, int label,
                                   Polygon polygon) {
  entries_[{trial, step, label}] = std::move(polygon);
}

std::optional<Polygon> ExternalForecastStore::lookup(const std::string& trial, int step,
                                                     int label) const {
  auto it = entries_.find({trial, step, label});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ExternalForecastStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  for (const auto& [key, poly] : entries_) {
    out << std::get<0>(key) << ' ' << std::get<1>(key) << ' ' << std::get<2>(key);
    for (const Vec2& v : poly) out << ' ' << v.x() << ' ' << v.y();
    out << '\n';
  }
}

GroupSpaceSequence predict_hold(const GroupSpaceSequence& history, int f) {
  if (history.spaces.empty()) {
    throw InsufficientHistoryError("hold oracle needs at least one frame");
  }
  GroupSpaceSequence out;
  out.label = history.label;
  out.spaces.assign(f, history.spaces.back());
  return out;
}

GroupSpaceSequence predict_linear(const GroupSpaceSequence& history, int f) {
  if (history.spaces.size() < 2) {
    throw InsufficientHistoryError("linear oracle needs at least two frames");
  }
  const Polygon& last = history.spaces.back().polygon;
  const Polygon& prev = history.spaces[history.spaces.size() - 2].polygon;
  const Vec2 step = polygon_centroid(last) - polygon_centroid(prev);

  GroupSpaceSequence out;
  out.label = history.label;
  out.spaces.reserve(f);
  for (int k = 1; k <= f; ++k) {
    GroupSpace gs = history.spaces.back();
    gs.polygon = translated(last, static_cast<double>(k) * step);
    out.spaces.push_back(std::move(gs));
  }
  return out;
}

GroupSpaceSequence predict(const GroupSpaceSequence& history, const OracleConfig& cfg,
                           const OracleContext* ctx) {
  switch (cfg.kind) {
    case OracleKind::Hold:
      return predict_hold(history, cfg.horizon);
    case OracleKind::Linear:
      return predict_linear(history, cfg.horizon);
    case OracleKind::External: {
      if (history.spaces.empty()) {
        throw InsufficientHistoryError("external oracle needs at least one frame");
      }
      GroupSpaceSequence out;
      out.label = history.label;
      out.spaces.reserve(cfg.horizon);
      for (int k = 1; k <= cfg.horizon; ++k) {
        GroupSpace gs = history.spaces.back();
        std::optional<Polygon> poly;
        if (ctx != nullptr && ctx->external != nullptr) {
          poly = ctx->external->lookup(ctx->trial_id, ctx->step + k, history.label);
        }
        if (poly.has_value()) gs.polygon = std::move(*poly);
        out.spaces.push_back(std::move(gs));
      }
      return out;
    }
  }
  throw std::logic_error("predict: unknown oracle kind");
}

RasterGrid make_grid_covering(const std::vector<const Polygon*>& polygons,
                              double resolution) {
  RasterGrid grid;
  grid.resolution = resolution;
  for (const Polygon* p : polygons) {
    for (const Vec2& v : *p) grid.bounds.extend(v);
  }
  if (!grid.bounds.isEmpty()) {
    grid.bounds.extend(grid.bounds.min() - Vec2(resolution, resolution));
    grid.bounds.extend(grid.bounds.max() + Vec2(resolution, resolution));
  }
  return grid;
}

double iou(const Polygon& a, const Polygon& b, const RasterGrid& grid) {
  if (grid.resolution <= 0.0) throw std::invalid_argument("iou: bad resolution");
  if (grid.bounds.isEmpty()) return 1.0;

  const Vec2 lo = grid.bounds.min();
  const Vec2 extent = grid.bounds.sizes();
  const int nx = std::max(1, static_cast<int>(std::ceil(extent.x() / grid.resolution)));
  const int ny = std::max(1, static_cast<int>(std::ceil(extent.y() / grid.resolution)));

  long inter = 0;
  long uni = 0;
  for (int j = 0; j < ny; ++j) {
    const double y = lo.y() + (j + 0.5) * grid.resolution;
    for (int i = 0; i < nx; ++i) {
      const Vec2 center(lo.x() + (i + 0.5) * grid.resolution, y);
      const bool in_a = point_in_convex(center, a);
      const bool in_b = point_in_convex(center, b);
      inter += (in_a && in_b);
      uni += (in_a || in_b);
    }
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::pair<double, double> evaluate_sequence(const GroupSpaceSequence& predicted,
                                            const GroupSpaceSequence& actual,
                                            double resolution) {
  if (predicted.spaces.size() != actual.spaces.size()) {
    throw std::invalid_argument("evaluate_sequence: length mismatch");
  }
  if (predicted.spaces.empty()) {
    throw std::invalid_argument("evaluate_sequence: empty sequences");
  }
  double sum = 0.0;
  double last = 0.0;
  for (std::size_t k = 0; k < predicted.spaces.size(); ++k) {
    const Polygon& p = predicted.spaces[k].polygon;
    const Polygon& q = actual.spaces[k].polygon;
    const RasterGrid grid = make_grid_covering({&p, &q}, resolution);
    last = iou(p, q, grid);
    sum += last;
  }
  return {sum / static_cast<double>(predicted.spaces.size()), last};
}

}  // namespace gmpc
