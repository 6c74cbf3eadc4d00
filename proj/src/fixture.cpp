#include "cityscan/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "cityscan/compliance.hpp"
#include "cityscan/error.hpp"

namespace cityscan::fixture {
namespace {

constexpr double kCenterLat = 31.2518;
constexpr double kCenterLon = 34.7913;
// Neighborhood cell size in degrees (about 1.1 km north-south).
constexpr double kCellLatDeg = 0.010;
constexpr double kCellLonDeg = 0.012;

const std::vector<std::string> kTypes = {"community_center", "daycare",       "gas_station",
                                         "education",        "health_clinic", "sport_center",
                                         "synagogue"};

double round7(double v) { return std::round(v * 1e7) / 1e7; }

GeoPoint offset_meters(const GeoPoint& origin, double north_m, double east_m) {
  const double lat = origin.lat + north_m / geo::kEarthRadiusM * 180.0 / std::numbers::pi;
  const double lon = origin.lon + east_m / (geo::kEarthRadiusM * std::cos(origin.lat * std::numbers::pi / 180.0)) *
                                      180.0 / std::numbers::pi;
  return {round7(lat), round7(lon)};
}

std::string padded(char prefix, std::size_t i) {
  std::string digits = std::to_string(i);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return std::string(1, prefix) + digits;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

}  // namespace

const std::vector<std::string>& beer_sheva_neighborhoods() {
  static const std::vector<std::string> names = {
      "Alef",     "Bet",      "Gimel",    "Dalet", "Hei",      "Vav",      "Tet",  "Ramot",
      "Down-Town", "Yod-Alef", "Old-Town", "Ashan", "Noi-Beka", "Darom", "Nahot"};
  return names;
}

std::vector<std::string> brute_force_violations(const std::vector<Facility>& facilities,
                                                const std::vector<SafetyObject>& objects,
                                                double threshold_m) {
  std::vector<std::string> out;
  for (const auto& f : facilities) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : objects) best = std::min(best, geo::haversine_distance(f.location, o.location));
    if (best > threshold_m) out.push_back(f.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

FixtureCity generate_city(const FixtureOptions& options) {
  Rng rng(options.seed);
  FixtureCity city;

  const std::size_t n_regions = options.neighborhoods;
  const std::size_t cols = n_regions == 0 ? 0 : static_cast<std::size_t>(std::ceil(std::sqrt(n_regions * 5.0 / 3.0)));
  const std::size_t rows = cols == 0 ? 0 : (n_regions + cols - 1) / cols;
  const double south = kCenterLat - rows * kCellLatDeg / 2.0;
  const double west = kCenterLon - cols * kCellLonDeg / 2.0;
  for (std::size_t i = 0; i < n_regions; ++i) {
    const auto r = i / cols;
    const auto c = i % cols;
    const double s = south + r * kCellLatDeg;
    const double w = west + c * kCellLonDeg;
    const auto& names = beer_sheva_neighborhoods();
    std::string name = i < names.size() ? names[i] : "Region-" + std::to_string(i + 1);
    city.regions.emplace_back(std::move(name),
                              std::vector<PolygonRegion::Ring>{{{s, w},
                                                                {s, w + kCellLonDeg},
                                                                {s + kCellLatDeg, w + kCellLonDeg},
                                                                {s + kCellLatDeg, w}}});
  }
  // Bounding box of the tiled city; with no regions, a 1-cell box at the center.
  const double lat_lo = rows ? south : kCenterLat - kCellLatDeg / 2;
  const double lat_hi = rows ? south + rows * kCellLatDeg : kCenterLat + kCellLatDeg / 2;
  const double lon_lo = cols ? west : kCenterLon - kCellLonDeg / 2;
  const double lon_hi = cols ? west + cols * kCellLonDeg : kCenterLon + kCellLonDeg / 2;
  auto uniform_point = [&](double margin) {
    return GeoPoint{round7(rng.uniform(lat_lo - margin, lat_hi + margin)),
                    round7(rng.uniform(lon_lo - margin, lon_hi + margin))};
  };

  for (std::size_t i = 0; i < options.hydrants; ++i) {
    city.hydrants.push_back({padded('h', i), ObjectKind::hydrant, uniform_point(0.0), std::string(geo::kUnassigned)});
  }
  for (std::size_t i = 0; i < options.shelters; ++i) {
    city.shelters.push_back({padded('s', i), ObjectKind::shelter, uniform_point(0.0), std::string(geo::kUnassigned)});
  }
  for (std::size_t i = 0; i < options.facilities; ++i) {
    const double roll = rng.uniform();
    GeoPoint loc;
    if (roll < 0.35 && !city.hydrants.empty()) {
      // Near an existing hydrant: 0-45 m away, so many but not all comply.
      const auto& h = city.hydrants[rng.below(city.hydrants.size())].location;
      const double dist = rng.uniform(0.0, 45.0);
      const double bearing = rng.uniform(0.0, 2.0 * std::numbers::pi);
      loc = offset_meters(h, dist * std::cos(bearing), dist * std::sin(bearing));
    } else if (roll < 0.93) {
      loc = uniform_point(0.0);
    } else {
      loc = uniform_point(0.004);  // may fall outside every neighborhood
    }
    const auto& type = kTypes[rng.below(kTypes.size())];
    city.facilities.push_back({padded('f', i), type + " " + std::to_string(i), FacilityType::parse(type), loc,
                               std::string(geo::kUnassigned)});
  }

  city.ground_truth.push_back({ObjectKind::hydrant, compliance::kHydrantThresholdM,
                               brute_force_violations(city.facilities, city.hydrants, compliance::kHydrantThresholdM)});
  city.ground_truth.push_back({ObjectKind::shelter, compliance::kShelterThresholdM,
                               brute_force_violations(city.facilities, city.shelters, compliance::kShelterThresholdM)});
  return city;
}

CityDataset to_dataset(const FixtureCity& city, std::string source) {
  std::vector<SafetyObject> objects = city.hydrants;
  objects.insert(objects.end(), city.shelters.begin(), city.shelters.end());
  return assemble_dataset(city.facilities, std::move(objects), city.regions,
                          {std::move(source), utc_timestamp_now()});
}

FixtureFiles write_city(const FixtureCity& city, const FixtureOptions& options,
                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  FixtureFiles files{out_dir / "facilities.csv", out_dir / "hydrants.csv", out_dir / "shelters.csv",
                     out_dir / "boundaries.geojson", out_dir / "ground_truth.json"};
  write_text(files.facilities, facilities_to_csv(city.facilities));
  write_text(files.hydrants, objects_to_csv(city.hydrants));
  write_text(files.shelters, objects_to_csv(city.shelters));
  write_text(files.boundaries, boundaries_to_geojson(city.regions));

  nlohmann::ordered_json truth;
  truth["seed"] = options.seed;
  truth["counts"] = {{"facilities", city.facilities.size()},
                     {"hydrants", city.hydrants.size()},
                     {"shelters", city.shelters.size()},
                     {"neighborhoods", city.regions.size()}};
  nlohmann::ordered_json rules = nlohmann::ordered_json::array();
  for (const auto& gt : city.ground_truth) {
    rules.push_back({{"kind", to_string(gt.kind)},
                     {"threshold_m", gt.threshold_m},
                     {"violation_count", gt.violating_facility_ids.size()},
                     {"violating_facility_ids", gt.violating_facility_ids}});
  }
  truth["rules"] = std::move(rules);
  write_text(files.ground_truth, truth.dump(2) + "\n");
  return files;
}

}  // namespace cityscan::fixture
