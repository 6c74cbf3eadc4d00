#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cityscan/geo.hpp"

namespace cityscan::geo {

struct IndexedPoint {
  std::string id;
  GeoPoint location;
};

/// One query result. `id` views into the index and lives as long as it does.
struct Hit {
  std::size_t slot;
  std::string_view id;
  double distance_m;
};

/// Immutable uniform lat/lon grid over a point set.
///
/// Cells are `cell_size_m` tall; their width in degrees of longitude is
/// stretched by 1/cos of the mean latitude of the indexed points so cells are
/// roughly square on the ground. Every candidate is confirmed with an exact
/// haversine comparison, so results always equal a brute-force scan. Queries
/// whose search box would touch a pole, cover half the globe, or visit more
/// cells than there are points fall back to a full scan.
class SpatialIndex {
 public:
  static constexpr double kDefaultCellSizeM = 100.0;
  static constexpr double kMinCellSizeM = 1.0;

  SpatialIndex() = default;
  /// Throws InputError on a duplicate id or invalid coordinate.
  explicit SpatialIndex(std::vector<IndexedPoint> points, double cell_size_m = kDefaultCellSizeM);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const std::string& id(std::size_t slot) const { return points_[slot].id; }
  const GeoPoint& location(std::size_t slot) const { return points_[slot].location; }

  /// Every point with distance <= radius_m, ascending by (distance, id).
  std::vector<Hit> query_within(const GeoPoint& center, double radius_m) const;

  /// Closest point, ties by id ascending; nullopt when the index is empty.
  std::optional<Hit> nearest(const GeoPoint& center) const;

 private:
  std::int64_t cell_key(std::int64_t row, std::int64_t col) const noexcept {
    return row * columns_ + col;
  }
  std::int64_t row_of(double lat) const noexcept;
  std::int64_t col_of(double lon) const noexcept;
  std::vector<Hit> scan_all(const GeoPoint& center, double radius_m) const;
  void finish(std::vector<Hit>& hits) const;

  std::vector<IndexedPoint> points_;
  double cell_size_m_ = kDefaultCellSizeM;
  double cell_lat_deg_ = 1.0;
  double cell_lon_deg_ = 1.0;
  std::int64_t columns_ = 1;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

SpatialIndex build_spatial_index(std::vector<IndexedPoint> points,
                                 double cell_size_m = SpatialIndex::kDefaultCellSizeM);

}  // namespace cityscan::geo
