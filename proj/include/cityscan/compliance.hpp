#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cityscan/ingest.hpp"

namespace cityscan::compliance {

inline constexpr double kHydrantThresholdM = 30.0;
inline constexpr double kShelterThresholdM = 50.0;

double preset_threshold(ObjectKind kind) noexcept;

/// A (kind, threshold) pair facilities are checked against. `excluded_types`
/// lists facility types that are exempt from the rule.
struct RegulationRule {
  ObjectKind kind = ObjectKind::hydrant;
  double threshold_m = kHydrantThresholdM;
  std::string label;
  std::vector<std::string> excluded_types;

  /// Throws ArgumentError on a negative or non-finite threshold.
  static RegulationRule make(ObjectKind kind, double threshold_m, std::string label = {},
                             std::vector<std::string> excluded_types = {});
  static RegulationRule preset(ObjectKind kind);

  friend bool operator==(const RegulationRule&, const RegulationRule&) = default;
};

/// Restricts which facilities are checked. Empty lists select everything.
struct FacilityFilter {
  std::vector<std::string> neighborhoods;
  std::vector<std::string> facility_types;

  friend bool operator==(const FacilityFilter&, const FacilityFilter&) = default;
};

/// The filter as applied, with names that matched nothing in the dataset.
struct AppliedFilter {
  FacilityFilter requested;
  std::vector<std::string> unknown_neighborhoods;
  std::vector<std::string> unknown_facility_types;

  bool has_unknown() const noexcept {
    return !unknown_neighborhoods.empty() || !unknown_facility_types.empty();
  }
  friend bool operator==(const AppliedFilter&, const AppliedFilter&) = default;
};

struct Violation {
  std::string facility_id;
  std::string name;
  std::string facility_type;
  std::string neighborhood;
  GeoPoint location;
  std::optional<std::string> nearest_object_id;  // empty iff no objects of the kind exist
  std::optional<double> nearest_distance_m;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using TypeNeighborhood = std::pair<std::string, std::string>;  // (facility_type, neighborhood)

struct Totals {
  std::size_t facilities_checked = 0;
  std::size_t violation_count = 0;

  friend bool operator==(const Totals&, const Totals&) = default;
};

struct ViolationReport {
  RegulationRule rule;
  AppliedFilter filter;
  /// Violations sorted by (neighborhood, facility_type, facility_id).
  std::vector<Violation> violations;
  /// Aggregation axes: neighborhoods in dataset order (UNASSIGNED last when
  /// populated) and facility types sorted by name.
  std::vector<std::string> neighborhoods;
  std::vector<std::string> facility_types;
  std::map<std::string, std::size_t> by_neighborhood;
  std::map<TypeNeighborhood, std::size_t> by_type_and_neighborhood;
  std::map<std::string, std::size_t> checked_by_neighborhood;
  Totals totals;

  friend bool operator==(const ViolationReport&, const ViolationReport&) = default;
};

/// Facilities left isolated in the bipartite facility/object graph at the
/// rule's threshold, each annotated with its true nearest object.
ViolationReport detect_violations(const CityDataset& dataset, const RegulationRule& rule,
                                  const FacilityFilter& filter = {});

/// (neighborhood, count) for every axis neighborhood, count descending, ties alphabetical.
std::vector<std::pair<std::string, std::size_t>> aggregate_by_neighborhood(
    const ViolationReport& report);

struct TypeMatrix {
  std::vector<std::string> facility_types;  // rows
  std::vector<std::string> neighborhoods;   // columns
  std::vector<std::vector<std::size_t>> counts;

  std::size_t row_total(std::size_t row) const;
  std::size_t column_total(std::size_t col) const;
  std::size_t total() const;
};

TypeMatrix aggregate_by_type(const ViolationReport& report);

struct RankedObject {
  std::string object_id;
  GeoPoint location;
  std::size_t degree = 0;
  double normalized = 0.0;

  friend bool operator==(const RankedObject&, const RankedObject&) = default;
};

/// Objects of the rule's kind by bipartite degree, descending; ties by id.
/// Throws ArgumentError when top_k == 0.
std::vector<RankedObject> rank_objects_for_maintenance(const CityDataset& dataset,
                                                       const RegulationRule& rule,
                                                       std::size_t top_k,
                                                       const FacilityFilter& filter = {});

struct PlacementSuggestion {
  GeoPoint location;
  std::string candidate_facility_id;
  std::vector<std::string> covered_facility_ids;  // sorted
  std::size_t covered_count = 0;

  friend bool operator==(const PlacementSuggestion&, const PlacementSuggestion&) = default;
};

/// Greedy max coverage over the violating facilities' own locations.
/// Throws ArgumentError when k == 0.
std::vector<PlacementSuggestion> suggest_placements(const ViolationReport& report, std::size_t k);
std::vector<PlacementSuggestion> suggest_placements(const CityDataset& dataset,
                                                    const RegulationRule& rule, std::size_t k,
                                                    const FacilityFilter& filter = {});

}  // namespace cityscan::compliance
