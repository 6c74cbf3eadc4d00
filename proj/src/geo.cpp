#include "cityscan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "cityscan/error.hpp"

namespace cityscan::geo {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Perpendicular distance (degrees) under which a point is treated as lying on an edge.
constexpr double kEdgeTolerance = 1e-12;

bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  const double cross = dx * (p.lat - a.lat) - dy * (p.lon - a.lon);
  if (std::abs(cross) > kEdgeTolerance * std::hypot(dx, dy)) return false;
  return p.lon >= std::min(a.lon, b.lon) - kEdgeTolerance &&
         p.lon <= std::max(a.lon, b.lon) + kEdgeTolerance &&
         p.lat >= std::min(a.lat, b.lat) - kEdgeTolerance &&
         p.lat <= std::max(a.lat, b.lat) + kEdgeTolerance;
}

bool on_ring_boundary(const GeoPoint& p, const PolygonRegion::Ring& ring) {
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    if (on_segment(p, ring[j], ring[i])) return true;
  }
  return false;
}

// Ray cast towards +lon; x = lon, y = lat.
bool even_odd(const GeoPoint& p, const PolygonRegion::Ring& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

GeoPoint GeoPoint::checked(double lat, double lon) {
  GeoPoint p{lat, lon};
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw InputError("coordinate is not finite");
  }
  if (!is_valid(p)) {
    throw InputError("coordinate out of range: lat " + std::to_string(lat) + ", lon " +
                     std::to_string(lon));
  }
  return p;
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  if (!std::isfinite(a.lat) || !std::isfinite(a.lon) || !std::isfinite(b.lat) ||
      !std::isfinite(b.lon)) {
    throw InputError("haversine_distance: non-finite coordinate");
  }
  const bool swap = std::pair(a.lat, a.lon) > std::pair(b.lat, b.lon);
  const GeoPoint& p = swap ? b : a;
  const GeoPoint& q = swap ? a : b;

  const double phi1 = p.lat * kDegToRad;
  const double phi2 = q.lat * kDegToRad;
  const double sin_dphi = std::sin((phi2 - phi1) / 2.0);
  const double sin_dlambda = std::sin((q.lon - p.lon) * kDegToRad / 2.0);
  double h = sin_dphi * sin_dphi + std::cos(phi1) * std::cos(phi2) * sin_dlambda * sin_dlambda;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

void validate_ring(std::span<const GeoPoint> ring) {
  std::set<std::pair<double, double>> distinct;
  for (const auto& v : ring) {
    if (!is_valid(v)) throw InputError("ring vertex has an invalid coordinate");
    distinct.emplace(v.lat, v.lon);
  }
  if (distinct.size() < 3) {
    throw InputError("ring has " + std::to_string(distinct.size()) +
                     " distinct vertices, at least 3 required");
  }
}

PolygonRegion::PolygonRegion(std::string name, std::vector<Ring> rings)
    : name_(std::move(name)), rings_(std::move(rings)) {
  if (rings_.empty()) throw InputError("region '" + name_ + "' has no rings");
  for (const auto& ring : rings_) validate_ring(ring);
  const auto& outer_ring = rings_.front();
  min_lat_ = max_lat_ = outer_ring.front().lat;
  min_lon_ = max_lon_ = outer_ring.front().lon;
  for (const auto& v : outer_ring) {
    min_lat_ = std::min(min_lat_, v.lat);
    max_lat_ = std::max(max_lat_, v.lat);
    min_lon_ = std::min(min_lon_, v.lon);
    max_lon_ = std::max(max_lon_, v.lon);
  }
}

bool point_in_polygon(const GeoPoint& p, const PolygonRegion& region) {
  if (p.lat < region.min_lat() - kEdgeTolerance || p.lat > region.max_lat() + kEdgeTolerance ||
      p.lon < region.min_lon() - kEdgeTolerance || p.lon > region.max_lon() + kEdgeTolerance) {
    return false;
  }
  for (const auto& ring : region.rings()) {
    if (on_ring_boundary(p, ring)) return true;
  }
  if (!even_odd(p, region.outer())) return false;
  const auto& rings = region.rings();
  return std::none_of(rings.begin() + 1, rings.end(),
                      [&](const auto& hole) { return even_odd(p, hole); });
}

std::string assign_neighborhood(const GeoPoint& p, std::span<const PolygonRegion> regions) {
  for (const auto& region : regions) {
    if (point_in_polygon(p, region)) return region.name();
  }
  return std::string(kUnassigned);
}

}  // namespace cityscan::geo
