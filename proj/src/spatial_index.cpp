#include "cityscan/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>
#include <utility>

#include "cityscan/error.hpp"

namespace cityscan::geo {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;
// Widening applied to search boxes so rounding in the box math can never
// exclude a point the exact distance test would accept.
constexpr double kBoxSlack = 1e-9;

}  // namespace

SpatialIndex::SpatialIndex(std::vector<IndexedPoint> points, double cell_size_m)
    : points_(std::move(points)) {
  if (!std::isfinite(cell_size_m)) throw ArgumentError("cell size must be finite");
  cell_size_m_ = std::max(cell_size_m, kMinCellSizeM);

  std::unordered_set<std::string_view> seen;
  double lat_sum = 0.0;
  for (const auto& p : points_) {
    if (!seen.insert(p.id).second) throw InputError("duplicate id '" + p.id + "'");
    if (!is_valid(p.location)) throw InputError("invalid coordinate for id '" + p.id + "'");
    lat_sum += p.location.lat;
  }
  const double mean_lat = points_.empty() ? 0.0 : lat_sum / static_cast<double>(points_.size());

  cell_lat_deg_ = cell_size_m_ / kEarthRadiusM * kRadToDeg;
  const double stretch = std::max(std::cos(mean_lat * kDegToRad), 1e-3);
  cell_lon_deg_ = std::min(cell_lat_deg_ / stretch, 360.0);
  columns_ = static_cast<std::int64_t>(std::ceil(360.0 / cell_lon_deg_)) + 1;

  for (std::size_t slot = 0; slot < points_.size(); ++slot) {
    const auto& loc = points_[slot].location;
    cells_[cell_key(row_of(loc.lat), col_of(loc.lon))].push_back(static_cast<std::uint32_t>(slot));
  }
}

std::int64_t SpatialIndex::row_of(double lat) const noexcept {
  return static_cast<std::int64_t>(std::floor((lat + 90.0) / cell_lat_deg_));
}

std::int64_t SpatialIndex::col_of(double lon) const noexcept {
  return std::min(static_cast<std::int64_t>(std::floor((lon + 180.0) / cell_lon_deg_)),
                  columns_ - 1);
}

void SpatialIndex::finish(std::vector<Hit>& hits) const {
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    return a.id < b.id;
  });
}

std::vector<Hit> SpatialIndex::scan_all(const GeoPoint& center, double radius_m) const {
  std::vector<Hit> hits;
  for (std::size_t slot = 0; slot < points_.size(); ++slot) {
    const double d = haversine_distance(center, points_[slot].location);
    if (d <= radius_m) hits.push_back({slot, points_[slot].id, d});
  }
  finish(hits);
  return hits;
}

std::vector<Hit> SpatialIndex::query_within(const GeoPoint& center, double radius_m) const {
  if (!(radius_m >= 0.0) || !std::isfinite(radius_m)) {
    throw ArgumentError("query radius must be a finite non-negative number");
  }
  if (!is_valid(center)) throw InputError("query center has an invalid coordinate");
  if (points_.empty()) return {};

  // Angular radius and the latitude/longitude half-widths of the circle's bounding box.
  const double delta = radius_m / kEarthRadiusM * (1.0 + kBoxSlack) + 1e-15;
  const double phi = center.lat * kDegToRad;
  if (delta >= std::numbers::pi / 2 || std::abs(phi) + delta >= std::numbers::pi / 2) {
    return scan_all(center, radius_m);
  }
  const double dlat = delta * kRadToDeg;
  const double dlon = std::asin(std::sin(delta) / std::cos(phi)) * (1.0 + kBoxSlack) * kRadToDeg;
  if (dlon >= 180.0) return scan_all(center, radius_m);

  std::vector<std::pair<double, double>> lon_ranges;
  const double lo = center.lon - dlon;
  const double hi = center.lon + dlon;
  if (lo < -180.0) {
    lon_ranges.emplace_back(-180.0, hi);
    lon_ranges.emplace_back(lo + 360.0, 180.0);
  } else if (hi > 180.0) {
    lon_ranges.emplace_back(lo, 180.0);
    lon_ranges.emplace_back(-180.0, hi - 360.0);
  } else {
    lon_ranges.emplace_back(lo, hi);
  }

  const std::int64_t row_lo = row_of(center.lat - dlat);
  const std::int64_t row_hi = row_of(center.lat + dlat);
  std::vector<std::int64_t> keys;
  const auto budget = static_cast<std::int64_t>(points_.size());
  for (const auto& [range_lo, range_hi] : lon_ranges) {
    const std::int64_t col_lo = col_of(range_lo);
    const std::int64_t col_hi = col_of(range_hi);
    if ((row_hi - row_lo + 1) * (col_hi - col_lo + 1) + static_cast<std::int64_t>(keys.size()) >
        budget) {
      return scan_all(center, radius_m);
    }
    for (std::int64_t row = row_lo; row <= row_hi; ++row) {
      for (std::int64_t col = col_lo; col <= col_hi; ++col) keys.push_back(cell_key(row, col));
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::vector<Hit> hits;
  for (const auto key : keys) {
    const auto it = cells_.find(key);
    if (it == cells_.end()) continue;
    for (const auto slot : it->second) {
      const double d = haversine_distance(center, points_[slot].location);
      if (d <= radius_m) hits.push_back({slot, points_[slot].id, d});
    }
  }
  finish(hits);
  return hits;
}

std::optional<Hit> SpatialIndex::nearest(const GeoPoint& center) const {
  if (points_.empty()) return std::nullopt;
  // Anything found inside radius r beats everything outside it, so the first
  // non-empty ring answer is exact.
  const double half_circumference = std::numbers::pi * kEarthRadiusM;
  for (double radius = cell_size_m_;; radius *= 2.0) {
    if (radius >= half_circumference) return scan_all(center, 2.0 * half_circumference).front();
    auto hits = query_within(center, radius);
    if (!hits.empty()) return hits.front();
  }
}

SpatialIndex build_spatial_index(std::vector<IndexedPoint> points, double cell_size_m) {
  return SpatialIndex(std::move(points), cell_size_m);
}

}  // namespace cityscan::geo
