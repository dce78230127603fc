#pragma once

#include "gmpc/geometry.hpp"
#include "gmpc/grouping.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace gmpc {

enum class OracleKind { Linear, Hold, External };

struct OracleConfig {
  int history_len = 8;  // h
  int horizon = 8;      // f
  OracleKind kind = OracleKind::Linear;
};

struct InsufficientHistoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Forecast polygons produced outside this process, keyed by
/// (trial id, timestep, group label). One record per line:
///   trial_id step group_label x1 y1 x2 y2 ...
class ExternalForecastStore {
 public:
  static ExternalForecastStore load(const std::filesystem::path& path);

  void insert(const std::string& trial, int step, int label, Polygon polygon);
  std::optional<Polygon> lookup(const std::string& trial, int step, int label) const;
  void save(const std::filesystem::path& path) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::tuple<std::string, int, int>, Polygon> entries_;
};

/// Lookup context for the external oracle: which trial and which absolute
/// timestep the forecast frames start after.
struct OracleContext {
  std::string trial_id;
  int step = 0;
  const ExternalForecastStore* external = nullptr;
};

/// Zero-order hold: f copies of the last observed polygon.
GroupSpaceSequence predict_hold(const GroupSpaceSequence& history, int f);

/// Rigid translation of the last polygon at the velocity of its area
/// centroid, estimated from the last two observed frames.
GroupSpaceSequence predict_linear(const GroupSpaceSequence& history, int f);

/// Dispatch on the configured oracle kind. History must be at least the
/// oracle's minimum length (2 frames for linear, 1 otherwise). The external
/// oracle falls back to hold for missing records.
GroupSpaceSequence predict(const GroupSpaceSequence& history, const OracleConfig& cfg,
                           const OracleContext* ctx = nullptr);

struct RasterGrid {
  double resolution = 0.05;  // meters per cell
  Box2 bounds;
};

/// Grid whose bounds cover all given polygons, padded by one cell.
RasterGrid make_grid_covering(const std::vector<const Polygon*>& polygons,
                              double resolution = 0.05);

/// Pixel IoU: both polygons are rasterized on the grid (a cell counts when its
/// center lies inside) and the overlap is divided by the union. Two empty
/// rasterizations compare equal (1.0).
double iou(const Polygon& a, const Polygon& b, const RasterGrid& grid);

/// (mean IoU over the f frames, IoU of the final frame).
std::pair<double, double> evaluate_sequence(const GroupSpaceSequence& predicted,
                                            const GroupSpaceSequence& actual,
                                            double resolution = 0.05);

}  // namespace gmpc
