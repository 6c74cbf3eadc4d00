#include "cityscan/report.hpp"

#include <map>

#include "text_util.hpp"

namespace cityscan::report {
namespace {

using compliance::RegulationRule;
using compliance::ViolationReport;

Json point_json(const GeoPoint& p) { return Json{{"lat", p.lat}, {"lon", p.lon}}; }

Json rule_json(const RegulationRule& rule) {
  return Json{{"kind", to_string(rule.kind)},
              {"threshold_m", rule.threshold_m},
              {"label", rule.label},
              {"excluded_types", rule.excluded_types}};
}

Json params_json(const ViolationReport& r) {
  return Json{{"kind", to_string(r.rule.kind)},
              {"threshold", r.rule.threshold_m},
              {"neighborhood", r.filter.requested.neighborhoods},
              {"facility_type", r.filter.requested.facility_types},
              {"unknown", r.filter.has_unknown()},
              {"unknown_neighborhoods", r.filter.unknown_neighborhoods},
              {"unknown_facility_types", r.filter.unknown_facility_types}};
}

Json ring_json(const PolygonRegion::Ring& ring) {
  Json out = Json::array();
  for (const auto& v : ring) out.push_back({v.lon, v.lat});
  out.push_back({ring.front().lon, ring.front().lat});
  return out;
}

Json polygon_coordinates(const PolygonRegion& region) {
  Json rings = Json::array();
  for (const auto& ring : region.rings()) rings.push_back(ring_json(ring));
  return rings;
}

void append_field(std::string& out, std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
    out += s;
    return;
  }
  out += '"';
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

}  // namespace

Json violation_report_json(const ViolationReport& r) {
  Json doc;
  doc["params"] = params_json(r);
  doc["rule"] = rule_json(r.rule);
  doc["totals"] = {{"facilities_checked", r.totals.facilities_checked},
                   {"violation_count", r.totals.violation_count}};
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    Json item{{"facility_id", v.facility_id},
              {"name", v.name},
              {"facility_type", v.facility_type},
              {"neighborhood", v.neighborhood},
              {"location", point_json(v.location)}};
    item["nearest_object_id"] = v.nearest_object_id ? Json(*v.nearest_object_id) : Json(nullptr);
    item["nearest_distance_m"] = v.nearest_distance_m ? Json(*v.nearest_distance_m) : Json(nullptr);
    violations.push_back(std::move(item));
  }
  doc["violations"] = std::move(violations);
  Json by_neighborhood = Json::object();
  for (const auto& [name, count] : compliance::aggregate_by_neighborhood(r)) {
    by_neighborhood[name] = count;
  }
  doc["by_neighborhood"] = std::move(by_neighborhood);
  const auto matrix = compliance::aggregate_by_type(r);
  Json by_type = Json::object();
  for (std::size_t row = 0; row < matrix.facility_types.size(); ++row) {
    Json cells = Json::object();
    for (std::size_t col = 0; col < matrix.neighborhoods.size(); ++col) {
      cells[matrix.neighborhoods[col]] = matrix.counts[row][col];
    }
    by_type[matrix.facility_types[row]] = std::move(cells);
  }
  doc["by_type"] = std::move(by_type);
  return doc;
}

std::string violations_csv(const ViolationReport& r) {
  std::string out =
      "facility_id,name,facility_type,neighborhood,lat,lon,nearest_object_id,nearest_distance_m\n";
  for (const auto& v : r.violations) {
    append_field(out, v.facility_id);
    out += ',';
    append_field(out, v.name);
    out += ',';
    append_field(out, v.facility_type);
    out += ',';
    append_field(out, v.neighborhood);
    out += ',' + detail::format_double(v.location.lat) + ',' + detail::format_double(v.location.lon) + ',';
    if (v.nearest_object_id) append_field(out, *v.nearest_object_id);
    out += ',';
    if (v.nearest_distance_m) out += detail::format_double(*v.nearest_distance_m);
    out += '\n';
  }
  return out;
}

Json heatmap_document(const ViolationReport& r, const CityDataset& dataset) {
  const std::string unassigned(geo::kUnassigned);
  Json features = Json::array();
  for (const auto& name : r.neighborhoods) {
    Json geometry;
    if (name == unassigned) {
      double lat = 0.0, lon = 0.0;
      std::size_t n = 0;
      for (const auto& f : dataset.facilities()) {
        if (f.neighborhood != unassigned) continue;
        lat += f.location.lat;
        lon += f.location.lon;
        ++n;
      }
      geometry = n == 0 ? Json(nullptr)
                        : Json{{"type", "Point"},
                               {"coordinates", {lon / static_cast<double>(n), lat / static_cast<double>(n)}}};
    } else {
      std::vector<const PolygonRegion*> parts;
      for (const auto& region : dataset.neighborhoods()) {
        if (region.name() == name) parts.push_back(&region);
      }
      if (parts.size() == 1) {
        geometry = {{"type", "Polygon"}, {"coordinates", polygon_coordinates(*parts.front())}};
      } else {
        Json polys = Json::array();
        for (const auto* p : parts) polys.push_back(polygon_coordinates(*p));
        geometry = {{"type", "MultiPolygon"}, {"coordinates", std::move(polys)}};
      }
    }
    const auto count = r.by_neighborhood.contains(name) ? r.by_neighborhood.at(name) : 0;
    const auto checked =
        r.checked_by_neighborhood.contains(name) ? r.checked_by_neighborhood.at(name) : 0;
    Json feature;
    feature["type"] = "Feature";
    feature["properties"] = {{"name", name},
                             {"violation_count", count},
                             {"facilities_checked", checked},
                             {"rule_kind", to_string(r.rule.kind)},
                             {"threshold_m", r.rule.threshold_m}};
    feature["geometry"] = std::move(geometry);
    features.push_back(std::move(feature));
  }
  Json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  return doc;
}

std::string bars_csv(const ViolationReport& r) {
  const auto m = compliance::aggregate_by_type(r);
  std::string out = "facility_type";
  for (const auto& n : m.neighborhoods) {
    out += ',';
    append_field(out, n);
  }
  out += ",TOTAL\n";
  for (std::size_t row = 0; row < m.facility_types.size(); ++row) {
    append_field(out, m.facility_types[row]);
    for (const auto c : m.counts[row]) out += ',' + std::to_string(c);
    out += ',' + std::to_string(m.row_total(row)) + '\n';
  }
  out += "TOTAL";
  for (std::size_t col = 0; col < m.neighborhoods.size(); ++col) {
    out += ',' + std::to_string(m.column_total(col));
  }
  out += ',' + std::to_string(m.total()) + '\n';
  return out;
}

Json suggestions_json(const RegulationRule& rule,
                      const std::vector<compliance::PlacementSuggestion>& suggestions) {
  Json items = Json::array();
  for (std::size_t i = 0; i < suggestions.size(); ++i) {
    const auto& s = suggestions[i];
    items.push_back({{"rank", i + 1},
                     {"candidate_facility_id", s.candidate_facility_id},
                     {"location", point_json(s.location)},
                     {"covered_count", s.covered_count},
                     {"covered_facility_ids", s.covered_facility_ids}});
  }
  return Json{{"rule", rule_json(rule)}, {"suggestions", std::move(items)}};
}

Json ranking_json(const RegulationRule& rule, const std::vector<compliance::RankedObject>& ranked) {
  Json items = Json::array();
  for (const auto& o : ranked) {
    items.push_back({{"object_id", o.object_id},
                     {"location", point_json(o.location)},
                     {"degree", o.degree},
                     {"normalized", o.normalized}});
  }
  return Json{{"rule", rule_json(rule)}, {"objects", std::move(items)}};
}

Json dataset_meta(const CityDataset& dataset) {
  Json presets = Json::array();
  for (const auto kind : {ObjectKind::hydrant, ObjectKind::shelter}) {
    presets.push_back({{"kind", to_string(kind)}, {"threshold_m", compliance::preset_threshold(kind)}});
  }
  return Json{{"counts",
               {{"facilities", dataset.facility_count()},
                {"hydrants", dataset.object_count(ObjectKind::hydrant)},
                {"shelters", dataset.object_count(ObjectKind::shelter)},
                {"neighborhoods", dataset.neighborhood_names().size()}}},
              {"neighborhoods", dataset.neighborhood_names()},
              {"facility_types", dataset.facility_types()},
              {"rule_presets", std::move(presets)},
              {"source", dataset.metadata().source},
              {"loaded_at", dataset.metadata().loaded_at}};
}

}  // namespace cityscan::report
