#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cityscan/compliance.hpp"
#include "cityscan/error.hpp"
#include "cityscan/fixture.hpp"
#include "cityscan/geo.hpp"
#include "cityscan/graph.hpp"
#include "cityscan/report.hpp"

namespace py = pybind11;
using namespace cityscan;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
std::vector<T> accepted(ParseResult<T> result, const std::string& source) {
  if (!result.ok()) {
    const auto& first = result.rejections.front();
    throw InputError(source + ": row " + std::to_string(first.row) + ": " + first.reason);
  }
  return std::move(result.items);
}

struct Query {
  compliance::RegulationRule rule;
  compliance::FacilityFilter filter;
};

Query make_query(const std::string& kind, std::optional<double> threshold, std::vector<std::string> neighborhoods,
                 std::vector<std::string> facility_types, std::vector<std::string> excluded_types) {
  const auto k = parse_object_kind(kind);
  return {compliance::RegulationRule::make(k, threshold.value_or(compliance::preset_threshold(k)), {}, std::move(excluded_types)),
          {std::move(neighborhoods), std::move(facility_types)}};
}

class Dataset {
 public:
  explicit Dataset(CityDataset ds) : ds_(std::move(ds)) {}

  static Dataset from_text(const std::string& facilities, const std::string& hydrants, const std::string& shelters,
                           const std::string& boundaries, const std::string& source) {
    auto objects = accepted(parse_objects_csv(hydrants, ObjectKind::hydrant), "hydrants");
    auto s = accepted(parse_objects_csv(shelters, ObjectKind::shelter), "shelters");
    objects.insert(objects.end(), s.begin(), s.end());
    return Dataset(assemble_dataset(accepted(parse_facilities_csv(facilities), "facilities"), std::move(objects),
                                    parse_boundaries_geojson(boundaries), {source, utc_timestamp_now()}));
  }

  static Dataset from_files(const std::string& facilities, const std::string& hydrants, const std::string& shelters,
                            const std::string& boundaries) {
    return from_text(read_text(facilities), read_text(hydrants), read_text(shelters), read_text(boundaries),
                     std::filesystem::path(facilities).filename().string());
  }

  std::string meta() const { return report::dataset_meta(ds_).dump(); }
  std::string neighborhoods() const { return boundaries_to_geojson(ds_.neighborhoods()); }

  std::string violations(const Query& q) const {
    return report::violation_report_json(compliance::detect_violations(ds_, q.rule, q.filter)).dump();
  }
  std::string violations_csv(const Query& q) const {
    return report::violations_csv(compliance::detect_violations(ds_, q.rule, q.filter));
  }
  std::string heatmap(const Query& q) const {
    return report::heatmap_document(compliance::detect_violations(ds_, q.rule, q.filter), ds_).dump();
  }
  std::string bars(const Query& q) const { return report::bars_csv(compliance::detect_violations(ds_, q.rule, q.filter)); }
  std::string suggestions(const Query& q, std::size_t k) const {
    return report::suggestions_json(q.rule, compliance::suggest_placements(ds_, q.rule, k, q.filter)).dump();
  }
  std::string centrality(const Query& q, std::size_t top) const {
    return report::ranking_json(q.rule, compliance::rank_objects_for_maintenance(ds_, q.rule, top, q.filter)).dump();
  }
  std::string object_graph(const std::string& kind, double threshold) const {
    return graph::graph_to_json(graph::build_unipartite_graph(ds_.objects_of(parse_object_kind(kind)), threshold));
  }

 private:
  CityDataset ds_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Proximity compliance analysis for city safety infrastructure";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);

  m.attr("EARTH_RADIUS_M") = geo::kEarthRadiusM;
  m.attr("HYDRANT_THRESHOLD_M") = compliance::kHydrantThresholdM;
  m.attr("SHELTER_THRESHOLD_M") = compliance::kShelterThresholdM;

  m.def("haversine_distance",
        [](double lat1, double lon1, double lat2, double lon2) { return geo::haversine_distance({lat1, lon1}, {lat2, lon2}); },
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));
  m.def(
      "point_in_polygon",
      [](double lat, double lon, const std::vector<std::vector<std::pair<double, double>>>& rings) {
        std::vector<geo::PolygonRegion::Ring> converted;
        for (const auto& ring : rings) {
          auto& out = converted.emplace_back();
          for (const auto& [rlat, rlon] : ring) out.push_back({rlat, rlon});
        }
        return geo::point_in_polygon({lat, lon}, geo::PolygonRegion("polygon", std::move(converted)));
      },
      py::arg("lat"), py::arg("lon"), py::arg("rings"));

  py::class_<Query>(m, "_Query");
  m.def("_query", &make_query, py::arg("kind"), py::arg("threshold"), py::arg("neighborhoods"), py::arg("facility_types"),
        py::arg("excluded_types"));

  py::class_<Dataset>(m, "_Dataset")
      .def_static("from_text", &Dataset::from_text, py::arg("facilities"), py::arg("hydrants"), py::arg("shelters"),
                  py::arg("boundaries"), py::arg("source") = "memory")
      .def_static("from_files", &Dataset::from_files, py::arg("facilities"), py::arg("hydrants"), py::arg("shelters"),
                  py::arg("boundaries"))
      .def("meta", &Dataset::meta)
      .def("neighborhoods", &Dataset::neighborhoods)
      .def("violations", &Dataset::violations, py::call_guard<py::gil_scoped_release>())
      .def("violations_csv", &Dataset::violations_csv, py::call_guard<py::gil_scoped_release>())
      .def("heatmap", &Dataset::heatmap, py::call_guard<py::gil_scoped_release>())
      .def("bars", &Dataset::bars, py::call_guard<py::gil_scoped_release>())
      .def("suggestions", &Dataset::suggestions, py::call_guard<py::gil_scoped_release>())
      .def("centrality", &Dataset::centrality, py::call_guard<py::gil_scoped_release>())
      .def("object_graph", &Dataset::object_graph, py::call_guard<py::gil_scoped_release>());

  m.def(
      "generate_fixture",
      [](std::uint64_t seed, std::size_t facilities, std::size_t hydrants, std::size_t shelters, std::size_t neighborhoods,
         const std::string& out_dir) {
        const fixture::FixtureOptions opts{seed, facilities, hydrants, shelters, neighborhoods};
        const auto files = fixture::write_city(fixture::generate_city(opts), opts, out_dir);
        return read_text(files.ground_truth.string());
      },
      py::arg("seed"), py::arg("facilities"), py::arg("hydrants"), py::arg("shelters"), py::arg("neighborhoods"),
      py::arg("out_dir"));
}
