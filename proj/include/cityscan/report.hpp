#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cityscan/compliance.hpp"

namespace cityscan::report {

using Json = nlohmann::ordered_json;

/// Canonical ViolationReport document:
/// {params, rule, totals, violations, by_neighborhood, by_type}.
Json violation_report_json(const compliance::ViolationReport& report);

/// One row per violation:
/// facility_id,name,facility_type,neighborhood,lat,lon,nearest_object_id,nearest_distance_m
std::string violations_csv(const compliance::ViolationReport& report);

/// Choropleth FeatureCollection, one feature per axis neighborhood (parts of a
/// multi-part neighborhood merge into a MultiPolygon). A populated UNASSIGNED
/// bucket becomes a Point feature at the mean location of its facilities.
Json heatmap_document(const compliance::ViolationReport& report, const CityDataset& dataset);

/// facility_type x neighborhood matrix with trailing TOTAL column and row.
std::string bars_csv(const compliance::ViolationReport& report);

Json suggestions_json(const compliance::RegulationRule& rule,
                      const std::vector<compliance::PlacementSuggestion>& suggestions);

Json ranking_json(const compliance::RegulationRule& rule,
                  const std::vector<compliance::RankedObject>& ranked);

/// Dataset summary served by /api/meta.
Json dataset_meta(const CityDataset& dataset);

}  // namespace cityscan::report
