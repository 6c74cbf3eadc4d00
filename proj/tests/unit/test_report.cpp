#include <doctest.h>

#include <sstream>

#include "cities.hpp"
#include "cityscan/compliance.hpp"
#include "cityscan/fixture.hpp"
#include "cityscan/report.hpp"

using namespace cityscan;
using cities::box;
using cities::facility;
using cities::object;

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("heatmap features reconcile with the violation report") {
  fixture::FixtureOptions opts;
  opts.facilities = 400;
  opts.hydrants = 600;
  opts.shelters = 60;
  const auto city = fixture::generate_city(opts);
  const auto ds = fixture::to_dataset(city);
  for (const auto kind : {ObjectKind::hydrant, ObjectKind::shelter}) {
    const auto rep = compliance::detect_violations(ds, compliance::RegulationRule::preset(kind));
    const auto doc = report::heatmap_document(rep, ds);
    REQUIRE(doc["features"].size() == rep.neighborhoods.size());
    std::size_t violations = 0, checked = 0;
    for (const auto& f : doc["features"]) {
      violations += f["properties"]["violation_count"].get<std::size_t>();
      checked += f["properties"]["facilities_checked"].get<std::size_t>();
      CHECK(f["properties"]["rule_kind"] == std::string(to_string(kind)));
    }
    CHECK(violations == rep.totals.violation_count);
    CHECK(checked == rep.totals.facilities_checked);
    CHECK(checked == ds.facility_count());
  }
}

TEST_CASE("heatmap geometry: multi-part and unassigned neighborhoods") {
  const auto ds = assemble_dataset({facility("f1", {31.0, 34.0}), facility("f2", {31.2, 34.2}), facility("f3", {31.255, 34.785})}, {},
                                   {box("Split", 31.25, 34.78, 31.26, 34.79), box("Split", 31.27, 34.78, 31.28, 34.79)});
  const auto doc = report::heatmap_document(compliance::detect_violations(ds, compliance::RegulationRule::preset(ObjectKind::hydrant)), ds);
  REQUIRE(doc["features"].size() == 2);
  CHECK(doc["features"][0]["geometry"]["type"] == "MultiPolygon");
  CHECK(doc["features"][0]["geometry"]["coordinates"].size() == 2);
  CHECK(doc["features"][0]["properties"]["violation_count"] == 1);
  const auto& un = doc["features"][1];
  CHECK(un["properties"]["name"] == "UNASSIGNED");
  CHECK(un["properties"]["violation_count"] == 2);
  CHECK(un["geometry"]["type"] == "Point");
  CHECK(un["geometry"]["coordinates"][0].get<double>() == doctest::Approx(34.1));
  CHECK(un["geometry"]["coordinates"][1].get<double>() == doctest::Approx(31.1));
}

TEST_CASE("bars CSV header, cells and totals") {
  const auto regions = std::vector{box("Alef", 31.24, 34.78, 31.26, 34.80), box("Bet", 31.26, 34.78, 31.27, 34.80)};
  const auto ds = assemble_dataset({facility("f1", {31.25, 34.79}, "daycare"), facility("f2", {31.25, 34.791}, "daycare"),
                                    facility("f3", {31.265, 34.79}, "education")},
                                   {}, regions);
  const auto rows = split_csv(report::bars_csv(compliance::detect_violations(ds, compliance::RegulationRule::preset(ObjectKind::hydrant))));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"facility_type", "Alef", "Bet", "TOTAL"});
  CHECK(rows[1] == std::vector<std::string>{"daycare", "2", "0", "2"});
  CHECK(rows[2] == std::vector<std::string>{"education", "0", "1", "1"});
  CHECK(rows[3] == std::vector<std::string>{"TOTAL", "2", "1", "3"});
}

TEST_CASE("violation report JSON shape and CSV quoting") {
  auto f = facility("f,1", {31.25, 34.79});
  f.name = "Gan \"Shalom\"";
  const auto ds = assemble_dataset({f}, {}, {});
  const auto rep = compliance::detect_violations(ds, compliance::RegulationRule::preset(ObjectKind::hydrant));
  const auto doc = report::violation_report_json(rep);
  CHECK(doc["params"]["kind"] == "hydrant");
  CHECK(doc["params"]["threshold"] == 30.0);
  CHECK(doc["params"]["unknown"] == false);
  CHECK(doc["totals"]["violation_count"] == 1);
  CHECK(doc["violations"][0]["nearest_object_id"].is_null());
  CHECK(doc["by_neighborhood"]["UNASSIGNED"] == 1);
  const auto csv = report::violations_csv(rep);
  CHECK(csv.find("\"f,1\",\"Gan \"\"Shalom\"\"\"") != std::string::npos);
}

TEST_CASE("dataset meta counts") {
  const auto ds = fixture::to_dataset(fixture::generate_city({}));
  const auto meta = report::dataset_meta(ds);
  CHECK(meta["counts"]["facilities"] == 1000);
  CHECK(meta["counts"]["hydrants"] == 2596);
  CHECK(meta["counts"]["shelters"] == 265);
  CHECK(meta["counts"]["neighborhoods"] == 15);
  CHECK(meta["rule_presets"].size() == 2);
}
