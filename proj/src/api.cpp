#include "cityscan/api.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "cityscan/compliance.hpp"
#include "cityscan/error.hpp"
#include "cityscan/report.hpp"
#include "text_util.hpp"

namespace cityscan::api {
namespace {

using report::Json;

// Raised while decoding query parameters; becomes a 400.
struct BadParam {
  std::string message;
  std::string param;
};

Response json_response(int status, const Json& body) {
  return Response{status, body.dump(), "application/json", {}};
}

Response error_response(int status, const std::string& message, const std::string& param) {
  Json body{{"error", message}};
  body["param"] = param.empty() ? Json(nullptr) : Json(param);
  return json_response(status, body);
}

std::optional<std::string> single(const Request& req, const std::string& name) {
  const auto it = req.params.find(name);
  if (it == req.params.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> repeated(const Request& req, const std::string& name) {
  std::vector<std::string> out;
  const auto [lo, hi] = req.params.equal_range(name);
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  return out;
}

std::size_t count_param(const Request& req, const std::string& name, std::size_t fallback) {
  const auto text = single(req, name);
  if (!text) return fallback;
  long long value = 0;
  const auto s = detail::trim(*text);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || value < 1) {
    throw BadParam{name + " must be an integer >= 1", name};
  }
  return static_cast<std::size_t>(value);
}

struct Query {
  compliance::RegulationRule rule;
  compliance::FacilityFilter filter;
};

Query parse_query(const Request& req) {
  ObjectKind kind = ObjectKind::hydrant;
  if (const auto k = single(req, "kind")) {
    try {
      kind = parse_object_kind(*k);
    } catch (const ArgumentError&) {
      throw BadParam{"kind must be 'hydrant' or 'shelter'", "kind"};
    }
  }
  double threshold = compliance::preset_threshold(kind);
  if (const auto t = single(req, "threshold")) {
    const auto value = detail::parse_double(*t);
    if (!value) throw BadParam{"threshold must be a number", "threshold"};
    if (!(*value > 0.0) || !std::isfinite(*value)) {
      throw BadParam{"threshold must be greater than 0", "threshold"};
    }
    threshold = *value;
  }
  return Query{compliance::RegulationRule::make(kind, threshold),
               compliance::FacilityFilter{repeated(req, "neighborhood"), repeated(req, "facility_type")}};
}

}  // namespace

Service::Service(std::shared_ptr<const CityDataset> dataset) : dataset_(std::move(dataset)) {}

void Service::load(std::shared_ptr<const CityDataset> dataset) {
  std::lock_guard lock(mutex_);
  dataset_ = std::move(dataset);
}

bool Service::loaded() const { return snapshot() != nullptr; }

std::shared_ptr<const CityDataset> Service::snapshot() const {
  std::lock_guard lock(mutex_);
  return dataset_;
}

Response Service::handle(const Request& req) const {
  const auto dataset = snapshot();
  if (!dataset) {
    auto r = error_response(503, "dataset is still loading; retry shortly", "");
    r.headers["Retry-After"] = "1";
    return r;
  }
  try {
    if (req.path == "/api/meta") return json_response(200, report::dataset_meta(*dataset));
    if (req.path == "/api/neighborhoods") {
      return Response{200, boundaries_to_geojson(dataset->neighborhoods()), "application/geo+json", {}};
    }
    if (req.path == "/api/violations") {
      const auto q = parse_query(req);
      return json_response(200, report::violation_report_json(
                                    compliance::detect_violations(*dataset, q.rule, q.filter)));
    }
    if (req.path == "/api/heatmap") {
      const auto q = parse_query(req);
      const auto rep = compliance::detect_violations(*dataset, q.rule, q.filter);
      auto r = json_response(200, report::heatmap_document(rep, *dataset));
      r.content_type = "application/geo+json";
      return r;
    }
    if (req.path == "/api/centrality") {
      const auto q = parse_query(req);
      const auto top = count_param(req, "top", 20);
      return json_response(200, report::ranking_json(q.rule, compliance::rank_objects_for_maintenance(
                                                                 *dataset, q.rule, top, q.filter)));
    }
    if (req.path == "/api/suggestions") {
      const auto q = parse_query(req);
      const auto k = count_param(req, "k", 5);
      return json_response(200, report::suggestions_json(
                                    q.rule, compliance::suggest_placements(*dataset, q.rule, k, q.filter)));
    }
    return error_response(404, "no such endpoint: " + req.path, "");
  } catch (const BadParam& e) {
    return error_response(400, e.message, e.param);
  } catch (const Error& e) {
    return error_response(400, e.what(), "");
  }
}

void mount(httplib::Server& server, const Service& service, const ServeOptions& options) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Get(R"(/api/.*)", [&service](const httplib::Request& hreq, httplib::Response& hres) {
    Request req{hreq.path, {hreq.params.begin(), hreq.params.end()}};
    const auto res = service.handle(req);
    hres.status = res.status;
    for (const auto& [k, v] : res.headers) hres.set_header(k, v);
    hres.set_content(res.body, res.content_type);
    spdlog::debug("GET {} -> {}", hreq.path, res.status);
  });
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& hres) {
    hres.status = 204;
  });
  if (!options.ui_dir.empty() && !server.set_mount_point("/", options.ui_dir)) {
    spdlog::warn("UI directory '{}' not found; static files disabled", options.ui_dir);
  }
}

bool serve(const Service& service, const ServeOptions& options) {
  httplib::Server server;
  mount(server, service, options);
  spdlog::info("listening on {}:{}", options.host, options.port);
  return server.listen(options.host, options.port);
}

}  // namespace cityscan::api
