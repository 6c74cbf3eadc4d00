#include "cityscan/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <ctime>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <nlohmann/json.hpp>

#include "cityscan/error.hpp"
#include "text_util.hpp"

namespace cityscan {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<FacilityType::Category, std::string_view>, 7> kCategoryNames{{
    {FacilityType::Category::community_center, "community_center"},
    {FacilityType::Category::daycare, "daycare"},
    {FacilityType::Category::gas_station, "gas_station"},
    {FacilityType::Category::education, "education"},
    {FacilityType::Category::health_clinic, "health_clinic"},
    {FacilityType::Category::sport_center, "sport_center"},
    {FacilityType::Category::synagogue, "synagogue"},
}};

struct CsvRecord {
  std::size_t row;
  std::vector<std::string> fields;
};

// RFC 4180 records: quoted fields may hold commas, doubled quotes, and newlines.
std::vector<CsvRecord> split_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<CsvRecord> records;
  CsvRecord current{1, {}};
  std::string field;
  std::size_t line = 1;
  bool quoted = false;
  bool any = false;
  auto end_record = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    const bool blank = current.fields.size() == 1 && current.fields.front().empty();
    if (!blank) records.push_back(std::move(current));
    current = CsvRecord{line, {}};
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      current.fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      end_record();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (any || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_csv_field(std::string& out, std::string_view s) {
  if (!needs_quotes(s)) {
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

struct ColumnMap {
  std::unordered_map<std::string, std::size_t> index;

  std::optional<std::size_t> find(const std::string& name) const {
    const auto it = index.find(name);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

ColumnMap read_header(const std::vector<CsvRecord>& records,
                      std::initializer_list<std::string_view> required) {
  if (records.empty()) throw InputError("file is empty: header row missing");
  ColumnMap columns;
  const auto& header = records.front().fields;
  for (std::size_t i = 0; i < header.size(); ++i) {
    columns.index.emplace(detail::to_lower(detail::trim(header[i])), i);
  }
  std::string missing;
  for (const auto name : required) {
    if (!columns.find(std::string(name))) {
      if (!missing.empty()) missing += ", ";
      missing += name;
    }
  }
  if (!missing.empty()) throw InputError("malformed header: missing column(s) " + missing);
  return columns;
}

// Common per-row handling: coordinates, id; returns nullopt and records a
// rejection when the row is unusable.
struct RowCore {
  std::string id;
  GeoPoint location;
};

std::string field_at(const CsvRecord& rec, std::optional<std::size_t> col) {
  if (!col || *col >= rec.fields.size()) return {};
  return std::string(detail::trim(rec.fields[*col]));
}

std::optional<RowCore> read_core(const CsvRecord& rec, const ColumnMap& cols,
                                 std::size_t header_width, std::vector<RowRejection>& rejections) {
  auto reject = [&](std::string reason) {
    rejections.push_back({rec.row, std::move(reason)});
    return std::nullopt;
  };
  if (rec.fields.size() != header_width) {
    return reject("expected " + std::to_string(header_width) + " fields, found " +
                  std::to_string(rec.fields.size()));
  }
  RowCore core;
  core.id = field_at(rec, cols.find("id"));
  if (core.id.empty()) return reject("missing required field 'id'");
  const auto lat_text = field_at(rec, cols.find("lat"));
  const auto lon_text = field_at(rec, cols.find("lon"));
  if (lat_text.empty()) return reject("missing required field 'lat'");
  if (lon_text.empty()) return reject("missing required field 'lon'");
  const auto lat = detail::parse_double(lat_text);
  if (!lat) return reject("lat '" + lat_text + "' is not a number");
  const auto lon = detail::parse_double(lon_text);
  if (!lon) return reject("lon '" + lon_text + "' is not a number");
  core.location = GeoPoint{*lat, *lon};
  if (!geo::is_valid(core.location)) {
    return reject("coordinate (" + lat_text + ", " + lon_text + ") out of range");
  }
  return core;
}

void check_unique(std::unordered_set<std::string>& seen, const std::string& id, std::size_t row) {
  if (!seen.insert(id).second) {
    throw InputError("duplicate id '" + id + "' at row " + std::to_string(row));
  }
}

std::string feature_error(std::size_t index, const std::string& what) {
  return "feature " + std::to_string(index) + ": " + what;
}

PolygonRegion::Ring read_ring(const json& ring_json, std::size_t feature) {
  if (!ring_json.is_array()) throw InputError(feature_error(feature, "ring is not an array"));
  PolygonRegion::Ring ring;
  for (const auto& pos : ring_json) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      throw InputError(feature_error(feature, "position must be [lon, lat]"));
    }
    ring.push_back(GeoPoint{pos[1].get<double>(), pos[0].get<double>()});
  }
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  return ring;
}

PolygonRegion read_polygon(const std::string& name, const json& rings_json, std::size_t feature) {
  if (!rings_json.is_array() || rings_json.empty()) {
    throw InputError(feature_error(feature, "polygon has no rings"));
  }
  std::vector<PolygonRegion::Ring> rings;
  for (const auto& r : rings_json) rings.push_back(read_ring(r, feature));
  try {
    return PolygonRegion(name, std::move(rings));
  } catch (const InputError& e) {
    throw InputError(feature_error(feature, e.what()));
  }
}

nlohmann::ordered_json ring_to_json(const PolygonRegion::Ring& ring) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& v : ring) out.push_back({v.lon, v.lat});
  out.push_back({ring.front().lon, ring.front().lat});
  return out;
}

}  // namespace

std::string_view to_string(ObjectKind kind) noexcept {
  return kind == ObjectKind::hydrant ? "hydrant" : "shelter";
}

ObjectKind parse_object_kind(std::string_view text) {
  if (text == "hydrant") return ObjectKind::hydrant;
  if (text == "shelter") return ObjectKind::shelter;
  throw ArgumentError("unknown object kind '" + std::string(text) + "'");
}

FacilityType FacilityType::parse(std::string_view text) {
  FacilityType t;
  for (const auto& [category, name] : kCategoryNames) {
    if (text == name) {
      t.category_ = category;
      return t;
    }
  }
  t.category_ = Category::other;
  t.other_ = std::string(text);
  return t;
}

std::string FacilityType::name() const {
  if (category_ == Category::other) return other_;
  for (const auto& [category, name] : kCategoryNames) {
    if (category == category_) return std::string(name);
  }
  return other_;
}

ParseResult<Facility> parse_facilities_csv(std::string_view text) {
  const auto records = split_csv(text);
  const auto cols = read_header(records, {"id", "name", "type", "lat", "lon"});
  const auto width = records.front().fields.size();
  ParseResult<Facility> result;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    ++result.rows_read;
    auto core = read_core(rec, cols, width, result.rejections);
    if (!core) continue;
    auto type_text = field_at(rec, cols.find("type"));
    if (type_text.empty()) {
      result.rejections.push_back({rec.row, "missing required field 'type'"});
      continue;
    }
    check_unique(seen, core->id, rec.row);
    result.items.push_back(Facility{std::move(core->id), field_at(rec, cols.find("name")),
                                    FacilityType::parse(type_text), core->location,
                                    std::string(geo::kUnassigned)});
  }
  return result;
}

ParseResult<SafetyObject> parse_objects_csv(std::string_view text, ObjectKind kind) {
  const auto records = split_csv(text);
  const auto cols = read_header(records, {"id", "lat", "lon"});
  const auto width = records.front().fields.size();
  ParseResult<SafetyObject> result;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    ++result.rows_read;
    auto core = read_core(rec, cols, width, result.rejections);
    if (!core) continue;
    check_unique(seen, core->id, rec.row);
    result.items.push_back(
        SafetyObject{std::move(core->id), kind, core->location, std::string(geo::kUnassigned)});
  }
  return result;
}

std::string facilities_to_csv(const std::vector<Facility>& facilities) {
  std::string out = "id,name,type,lat,lon\n";
  for (const auto& f : facilities) {
    append_csv_field(out, f.id);
    out += ',';
    append_csv_field(out, f.name);
    out += ',';
    append_csv_field(out, f.type.name());
    out += ',';
    out += detail::format_double(f.location.lat);
    out += ',';
    out += detail::format_double(f.location.lon);
    out += '\n';
  }
  return out;
}

std::string objects_to_csv(const std::vector<SafetyObject>& objects) {
  std::string out = "id,name,type,lat,lon\n";
  for (const auto& o : objects) {
    append_csv_field(out, o.id);
    out += ",,";
    out += to_string(o.kind);
    out += ',';
    out += detail::format_double(o.location.lat);
    out += ',';
    out += detail::format_double(o.location.lon);
    out += '\n';
  }
  return out;
}

std::vector<PolygonRegion> parse_boundaries_geojson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("boundaries are not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    throw InputError("boundaries must be a GeoJSON FeatureCollection");
  }
  const auto features = doc.find("features");
  if (features == doc.end() || !features->is_array()) {
    throw InputError("FeatureCollection has no 'features' array");
  }
  std::vector<PolygonRegion> regions;
  for (std::size_t i = 0; i < features->size(); ++i) {
    const auto& feature = (*features)[i];
    if (!feature.is_object()) throw InputError(feature_error(i, "not an object"));
    const auto props = feature.find("properties");
    if (props == feature.end() || !props->is_object() || !props->contains("name") ||
        !(*props)["name"].is_string()) {
      throw InputError(feature_error(i, "missing string property 'name'"));
    }
    const auto name = (*props)["name"].get<std::string>();
    const auto geometry = feature.find("geometry");
    if (geometry == feature.end() || !geometry->is_object()) {
      throw InputError(feature_error(i, "missing geometry"));
    }
    const auto type = geometry->value("type", "");
    const auto coords = geometry->find("coordinates");
    if (type != "Polygon" && type != "MultiPolygon") {
      throw InputError(feature_error(i, "unsupported geometry type '" + type + "'"));
    }
    if (coords == geometry->end() || !coords->is_array()) {
      throw InputError(feature_error(i, "geometry has no coordinates"));
    }
    if (type == "Polygon") {
      regions.push_back(read_polygon(name, *coords, i));
    } else {
      if (coords->empty()) throw InputError(feature_error(i, "MultiPolygon has no parts"));
      for (const auto& part : *coords) regions.push_back(read_polygon(name, part, i));
    }
  }
  return regions;
}

std::string boundaries_to_geojson(const std::vector<PolygonRegion>& regions) {
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = nlohmann::ordered_json::array();
  for (const auto& region : regions) {
    nlohmann::ordered_json rings = nlohmann::ordered_json::array();
    for (const auto& ring : region.rings()) rings.push_back(ring_to_json(ring));
    nlohmann::ordered_json feature;
    feature["type"] = "Feature";
    feature["properties"] = {{"name", region.name()}};
    feature["geometry"] = {{"type", "Polygon"}, {"coordinates", std::move(rings)}};
    doc["features"].push_back(std::move(feature));
  }
  return doc.dump();
}

std::vector<SafetyObject> CityDataset::objects_of(ObjectKind kind) const {
  std::vector<SafetyObject> out;
  std::copy_if(objects_.begin(), objects_.end(), std::back_inserter(out),
               [kind](const SafetyObject& o) { return o.kind == kind; });
  return out;
}

std::size_t CityDataset::object_count(ObjectKind kind) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      objects_.begin(), objects_.end(), [kind](const SafetyObject& o) { return o.kind == kind; }));
}

std::vector<std::string> CityDataset::facility_types() const {
  std::set<std::string> types;
  for (const auto& f : facilities_) types.insert(f.type.name());
  return {types.begin(), types.end()};
}

std::map<std::string, std::size_t> CityDataset::facilities_per_neighborhood() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& name : names_) counts[name] = 0;
  for (const auto& f : facilities_) ++counts[f.neighborhood];
  return counts;
}

std::map<std::string, std::size_t> CityDataset::objects_per_neighborhood(ObjectKind kind) const {
  std::map<std::string, std::size_t> counts;
  for (const auto& name : names_) counts[name] = 0;
  for (const auto& o : objects_) {
    if (o.kind == kind) ++counts[o.neighborhood];
  }
  return counts;
}

CityDataset assemble_dataset(std::vector<Facility> facilities, std::vector<SafetyObject> objects,
                             std::vector<PolygonRegion> regions, DatasetMetadata metadata) {
  std::unordered_set<std::string> facility_ids;
  for (auto& f : facilities) {
    if (!facility_ids.insert(f.id).second) throw InputError("duplicate facility id '" + f.id + "'");
    if (!geo::is_valid(f.location)) throw InputError("facility '" + f.id + "' has an invalid coordinate");
    f.neighborhood = geo::assign_neighborhood(f.location, regions);
  }
  std::set<std::pair<ObjectKind, std::string>> object_ids;
  for (auto& o : objects) {
    if (!object_ids.emplace(o.kind, o.id).second) {
      throw InputError("duplicate " + std::string(to_string(o.kind)) + " id '" + o.id + "'");
    }
    if (!geo::is_valid(o.location)) throw InputError("object '" + o.id + "' has an invalid coordinate");
    o.neighborhood = geo::assign_neighborhood(o.location, regions);
  }

  CityDataset ds;
  for (const auto& region : regions) {
    if (std::find(ds.names_.begin(), ds.names_.end(), region.name()) == ds.names_.end()) {
      ds.names_.push_back(region.name());
    }
  }
  ds.facilities_ = std::move(facilities);
  ds.objects_ = std::move(objects);
  ds.regions_ = std::move(regions);
  ds.metadata_ = std::move(metadata);
  return ds;
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

}  // namespace cityscan
