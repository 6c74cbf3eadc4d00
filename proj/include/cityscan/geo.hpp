#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cityscan::geo {

/// Mean Earth radius in meters used for every great-circle computation.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Bucket name for entities outside every known neighborhood.
inline constexpr std::string_view kUnassigned = "UNASSIGNED";

/// A WGS84 coordinate in decimal degrees.
///
/// Construct through `GeoPoint::checked` whenever the values come from
/// outside the program; it rejects NaN/Inf and out-of-range values.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  static GeoPoint checked(double lat, double lon);

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p) noexcept;

/// Great-circle distance in meters.
///
/// The two arguments are put in a canonical order before evaluation so that
/// haversine_distance(a, b) and haversine_distance(b, a) are bit-identical.
double haversine_distance(const GeoPoint& a, const GeoPoint& b);

/// An outer ring followed by zero or more hole rings. Rings are stored open
/// (the closing vertex is implied).
class PolygonRegion {
 public:
  using Ring = std::vector<GeoPoint>;

  PolygonRegion(std::string name, std::vector<Ring> rings);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Ring>& rings() const noexcept { return rings_; }
  const Ring& outer() const noexcept { return rings_.front(); }

  // Planar lon/lat bounding box of the outer ring.
  double min_lat() const noexcept { return min_lat_; }
  double max_lat() const noexcept { return max_lat_; }
  double min_lon() const noexcept { return min_lon_; }
  double max_lon() const noexcept { return max_lon_; }

  friend bool operator==(const PolygonRegion& a, const PolygonRegion& b) {
    return a.name_ == b.name_ && a.rings_ == b.rings_;
  }

 private:
  std::string name_;
  std::vector<Ring> rings_;
  double min_lat_ = 0, max_lat_ = 0, min_lon_ = 0, max_lon_ = 0;
};

/// Throws InputError unless the ring has at least three distinct, valid vertices.
void validate_ring(std::span<const GeoPoint> ring);

/// Even-odd containment in planar lon/lat space. Points on any ring edge
/// count as inside.
bool point_in_polygon(const GeoPoint& p, const PolygonRegion& region);

/// Name of the first region (input order) containing p, or kUnassigned.
std::string assign_neighborhood(const GeoPoint& p, std::span<const PolygonRegion> regions);

}  // namespace cityscan::geo
