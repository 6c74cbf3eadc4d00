#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cityscan/geo.hpp"

namespace cityscan {

using geo::GeoPoint;
using geo::PolygonRegion;

enum class ObjectKind { hydrant, shelter };

std::string_view to_string(ObjectKind kind) noexcept;
/// Throws ArgumentError on anything but "hydrant" or "shelter".
ObjectKind parse_object_kind(std::string_view text);

/// A facility category; values outside the known set keep their original text.
class FacilityType {
 public:
  enum class Category {
    community_center,
    daycare,
    gas_station,
    education,
    health_clinic,
    sport_center,
    synagogue,
    other,
  };

  FacilityType() = default;
  /// Maps an exact known tag to its category, anything else to other(text).
  static FacilityType parse(std::string_view text);

  Category category() const noexcept { return category_; }
  std::string name() const;

  friend bool operator==(const FacilityType&, const FacilityType&) = default;
  friend auto operator<=>(const FacilityType& a, const FacilityType& b) {
    return a.name() <=> b.name();
  }

 private:
  Category category_ = Category::other;
  std::string other_;
};

struct Facility {
  std::string id;
  std::string name;
  FacilityType type;
  GeoPoint location;
  std::string neighborhood{geo::kUnassigned};

  friend bool operator==(const Facility&, const Facility&) = default;
};

struct SafetyObject {
  std::string id;
  ObjectKind kind = ObjectKind::hydrant;
  GeoPoint location;
  std::string neighborhood{geo::kUnassigned};

  friend bool operator==(const SafetyObject&, const SafetyObject&) = default;
};

// ---------------------------------------------------------------------------
// Points CSV

struct RowRejection {
  std::size_t row;  // 1-based physical line number; the header is row 1
  std::string reason;
};

template <typename T>
struct ParseResult {
  std::vector<T> items;
  std::vector<RowRejection> rejections;
  std::size_t rows_read = 0;  // data rows seen (accepted + rejected)

  bool ok() const noexcept { return rejections.empty(); }
};

/// Parses the `id,name,type,lat,lon` format (columns may be reordered).
/// Bad rows land in `rejections`; a missing header, missing required columns
/// or a duplicate id throw InputError.
ParseResult<Facility> parse_facilities_csv(std::string_view text);
ParseResult<SafetyObject> parse_objects_csv(std::string_view text, ObjectKind kind);

std::string facilities_to_csv(const std::vector<Facility>& facilities);
std::string objects_to_csv(const std::vector<SafetyObject>& objects);

// ---------------------------------------------------------------------------
// Boundaries GeoJSON

/// One region per Polygon feature and per MultiPolygon part. Throws
/// InputError naming the offending feature index.
std::vector<PolygonRegion> parse_boundaries_geojson(std::string_view text);

/// FeatureCollection with one Polygon feature per region, rings closed.
std::string boundaries_to_geojson(const std::vector<PolygonRegion>& regions);

// ---------------------------------------------------------------------------
// Dataset

struct DatasetMetadata {
  std::string source;
  std::string loaded_at;  // ISO-8601 UTC

  friend bool operator==(const DatasetMetadata&, const DatasetMetadata&) = default;
};

/// Immutable snapshot of one city's facilities, safety objects, and neighborhoods.
class CityDataset {
 public:
  CityDataset() = default;

  const std::vector<Facility>& facilities() const noexcept { return facilities_; }
  const std::vector<SafetyObject>& objects() const noexcept { return objects_; }
  const std::vector<PolygonRegion>& neighborhoods() const noexcept { return regions_; }
  const DatasetMetadata& metadata() const noexcept { return metadata_; }

  std::vector<SafetyObject> objects_of(ObjectKind kind) const;

  std::size_t facility_count() const noexcept { return facilities_.size(); }
  std::size_t object_count(ObjectKind kind) const noexcept;

  /// Distinct region names in input order (multi-part regions appear once).
  const std::vector<std::string>& neighborhood_names() const noexcept { return names_; }
  /// Distinct facility type names, sorted.
  std::vector<std::string> facility_types() const;

  std::map<std::string, std::size_t> facilities_per_neighborhood() const;
  std::map<std::string, std::size_t> objects_per_neighborhood(ObjectKind kind) const;

  friend bool operator==(const CityDataset&, const CityDataset&) = default;

 private:
  friend CityDataset assemble_dataset(std::vector<Facility>, std::vector<SafetyObject>,
                                      std::vector<PolygonRegion>, DatasetMetadata);

  std::vector<Facility> facilities_;
  std::vector<SafetyObject> objects_;
  std::vector<PolygonRegion> regions_;
  std::vector<std::string> names_;
  DatasetMetadata metadata_;
};

/// Assigns every facility and object its neighborhood. Throws InputError on
/// duplicate facility ids or duplicate object ids within a kind.
CityDataset assemble_dataset(std::vector<Facility> facilities, std::vector<SafetyObject> objects,
                             std::vector<PolygonRegion> regions, DatasetMetadata metadata = {});

std::string utc_timestamp_now();

}  // namespace cityscan
