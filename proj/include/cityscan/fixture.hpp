#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cityscan/ingest.hpp"

namespace cityscan::fixture {

/// Deterministic 64-bit generator (SplitMix64) with platform-independent
/// uniform draws, so fixtures are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept { return n == 0 ? 0 : next() % n; }

 private:
  std::uint64_t state_;
};

/// The fifteen neighborhood names used by the synthetic city.
const std::vector<std::string>& beer_sheva_neighborhoods();

struct FixtureOptions {
  std::uint64_t seed = 1;
  std::size_t facilities = 1000;
  std::size_t hydrants = 2596;
  std::size_t shelters = 265;
  std::size_t neighborhoods = 15;
};

/// Ids of violating facilities for one rule, computed by exhaustive search.
struct GroundTruth {
  ObjectKind kind;
  double threshold_m;
  std::vector<std::string> violating_facility_ids;  // sorted
};

/// "gridtown": rectangular neighborhoods tiled around a city center, with
/// some facilities placed outside every neighborhood.
struct FixtureCity {
  std::vector<Facility> facilities;
  std::vector<SafetyObject> hydrants;
  std::vector<SafetyObject> shelters;
  std::vector<PolygonRegion> regions;
  std::vector<GroundTruth> ground_truth;  // hydrant/30 m and shelter/50 m
};

FixtureCity generate_city(const FixtureOptions& options);

/// Exhaustive O(n*m) violation search used as ground truth.
std::vector<std::string> brute_force_violations(const std::vector<Facility>& facilities,
                                                const std::vector<SafetyObject>& objects,
                                                double threshold_m);

CityDataset to_dataset(const FixtureCity& city, std::string source = "gridtown");

struct FixtureFiles {
  std::filesystem::path facilities;
  std::filesystem::path hydrants;
  std::filesystem::path shelters;
  std::filesystem::path boundaries;
  std::filesystem::path ground_truth;
};

/// Writes facilities.csv, hydrants.csv, shelters.csv, boundaries.geojson and
/// ground_truth.json (manifest counts plus violation ids per preset rule).
FixtureFiles write_city(const FixtureCity& city, const FixtureOptions& options,
                        const std::filesystem::path& out_dir);

}  // namespace cityscan::fixture
