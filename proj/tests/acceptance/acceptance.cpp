#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "cities.hpp"
#include "cityscan/api.hpp"
#include "cityscan/compliance.hpp"
#include "cityscan/fixture.hpp"
#include "cityscan/graph.hpp"
#include "cityscan/report.hpp"
#include "cli.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace cityscan;
using compliance::RegulationRule;
using fixture::Rng;
using nlohmann::ordered_json;

namespace {

// Pinned tolerances and sizes.
constexpr int kGraphInstances = 200;
constexpr std::size_t kMaxSide = 500;
constexpr double kGraphThresholds[] = {0, 10, 30, 50, 100, 500};
constexpr double kGraphBudgetS = 60.0;
constexpr int kGeodesicPairs = 10'000;
constexpr double kGeodesicRelTol = 1e-6;
constexpr double kEquatorDegreeM = 111'194.93;
constexpr double kEquatorTolM = 0.01;
constexpr int kPolygons = 1'000;
constexpr int kProbesPerPolygon = 100;
constexpr double kProbeEdgeClearanceDeg = 1e-9;
constexpr int kFuzzCases = 1'000;
constexpr double kPaperScaleBudgetS = 2.0;
constexpr int kParitySets = 20;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Instance {
  std::vector<Facility> facilities;
  std::vector<SafetyObject> objects;
  double threshold;
};

Instance graph_instance(Rng& rng, int index) {
  Instance inst;
  const std::size_t n = rng.below(kMaxSide + 1);
  const std::size_t m = rng.below(kMaxSide + 1);
  inst.threshold = kGraphThresholds[index % std::size(kGraphThresholds)];
  const double span = std::vector{0.002, 0.01, 0.03}[rng.below(3)];
  for (std::size_t i = 0; i < n; ++i) inst.facilities.push_back(cities::facility("f" + std::to_string(i), oracle::city_point(rng, span)));
  for (std::size_t j = 0; j < m; ++j) {
    // Some objects sit exactly on a facility so zero thresholds still produce edges.
    const bool colocate = n > 0 && rng.below(10) == 0;
    const auto p = colocate ? inst.facilities[rng.below(n)].location : oracle::city_point(rng, span);
    inst.objects.push_back(cities::object("o" + std::to_string(j), p));
  }
  return inst;
}

using EdgeSet = std::set<std::tuple<std::string, std::string, double>>;

EdgeSet brute_edges(const Instance& inst) {
  EdgeSet out;
  for (const auto& f : inst.facilities) {
    for (const auto& o : inst.objects) {
      const double d = geo::haversine_distance(f.location, o.location);
      if (d <= inst.threshold) out.emplace(f.id, o.id, d);
    }
  }
  return out;
}

Outcome graph_oracle() {
  Rng rng(2024);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t edges = 0, isolated = 0;
  for (int i = 0; i < kGraphInstances; ++i) {
    const auto inst = graph_instance(rng, i);
    const auto g = graph::build_bipartite_graph(inst.facilities, inst.objects, inst.threshold);
    EdgeSet got;
    for (const auto& e : g.edges()) got.emplace(g.left()[e.u].id, g.right()[e.v].id, e.weight_m);
    const auto expect = brute_edges(inst);
    if (got != expect || got.size() != g.edges().size()) return {false, "edge set mismatch on instance " + std::to_string(i)};
    std::set<std::string> touched_f, touched_o;
    for (const auto& [f, o, d] : expect) touched_f.insert(f), touched_o.insert(o);
    std::vector<std::string> iso_f, iso_o;
    for (const auto& f : inst.facilities) if (!touched_f.contains(f.id)) iso_f.push_back(f.id);
    for (const auto& o : inst.objects) if (!touched_o.contains(o.id)) iso_o.push_back(o.id);
    std::sort(iso_f.begin(), iso_f.end());
    std::sort(iso_o.begin(), iso_o.end());
    if (graph::isolated_vertices(g, graph::Side::left) != iso_f || graph::isolated_vertices(g, graph::Side::right) != iso_o) {
      return {false, "isolated set mismatch on instance " + std::to_string(i)};
    }
    edges += expect.size();
    isolated += iso_f.size();
  }
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d instances, %zu edges, %zu isolated facilities, %.2f s (limit %.0f s)", kGraphInstances,
                edges, isolated, elapsed, kGraphBudgetS);
  return {elapsed < kGraphBudgetS, buf};
}

Outcome violation_oracle() {
  Rng rng(2024);
  std::size_t total = 0, annotated = 0;
  for (int i = 0; i < kGraphInstances; ++i) {
    const auto inst = graph_instance(rng, i);
    const auto ds = assemble_dataset(inst.facilities, inst.objects, {});
    const auto rep = compliance::detect_violations(ds, RegulationRule::make(ObjectKind::hydrant, inst.threshold));
    std::map<std::string, std::optional<std::pair<std::string, double>>> expect;
    for (const auto& f : inst.facilities) {
      std::optional<std::pair<std::string, double>> best;
      for (const auto& o : inst.objects) {
        const double d = geo::haversine_distance(f.location, o.location);
        if (!best || d < best->second || (d == best->second && o.id < best->first)) best = {{o.id, d}};
      }
      if (!best || best->second > inst.threshold) expect[f.id] = best;
    }
    std::map<std::string, std::optional<std::pair<std::string, double>>> got;
    for (const auto& v : rep.violations) {
      got[v.facility_id] = v.nearest_object_id ? std::optional{std::pair{*v.nearest_object_id, *v.nearest_distance_m}} : std::nullopt;
      annotated += v.nearest_object_id.has_value();
    }
    if (got != expect || rep.violations.size() != expect.size()) return {false, "mismatch on instance " + std::to_string(i)};
    total += expect.size();
  }
  return {true, std::to_string(kGraphInstances) + " instances, " + std::to_string(total) + " violations, " +
                    std::to_string(annotated) + " nearest annotations exact"};
}

Outcome geodesic() {
  Rng rng(7);
  double worst = 0;
  for (int i = 0; i < kGeodesicPairs; ++i) {
    geo::GeoPoint a, b;
    if (i % 2 == 0) {
      a = {std::asin(rng.uniform(-1, 1)) / oracle::kDeg, rng.uniform(-180, 180)};
      b = {std::asin(rng.uniform(-1, 1)) / oracle::kDeg, rng.uniform(-180, 180)};
    } else {
      a = {rng.uniform(-80, 80), rng.uniform(-180, 180)};
      b = oracle::destination(a, std::pow(10.0, rng.uniform(-1, 5)), rng.uniform(0, 360));
    }
    const double ref = oracle::reference_distance(a, b);
    if (ref == 0) continue;
    worst = std::max(worst, std::abs(geo::haversine_distance(a, b) - ref) / ref);
  }
  const double eq = geo::haversine_distance({0, 0}, {0, 1});
  char buf[160];
  std::snprintf(buf, sizeof buf, "max rel err %.2e over %d pairs (tol %.0e); equator 1 deg = %.4f m (expect %.2f +- %.2f)", worst,
                kGeodesicPairs, kGeodesicRelTol, eq, kEquatorDegreeM, kEquatorTolM);
  return {worst <= kGeodesicRelTol && std::abs(eq - kEquatorDegreeM) <= kEquatorTolM, buf};
}

// Jittered angles keep every angular gap below pi, so the ring is simple and
// contains a disk around its center large enough for a hole.
std::vector<geo::GeoPoint> star(Rng& rng, geo::GeoPoint c, double r_min, double r_max, std::size_t n) {
  std::vector<geo::GeoPoint> ring;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = (static_cast<double>(i) + 0.9 * rng.uniform()) * 2.0 * std::numbers::pi / static_cast<double>(n);
    const double r = rng.uniform(r_min, r_max);
    ring.push_back({c.lat + r * std::sin(a), c.lon + r * std::cos(a)});
  }
  return ring;
}

Outcome point_in_polygon() {
  Rng rng(11);
  std::size_t probes = 0, inside = 0;
  for (int k = 0; k < kPolygons; ++k) {
    const geo::GeoPoint c{rng.uniform(-60, 60), rng.uniform(-170, 170)};
    const double scale = std::pow(10.0, rng.uniform(-4, 0));
    std::vector<std::vector<geo::GeoPoint>> rings{star(rng, c, 0.1 * scale, scale, 6 + rng.below(40))};
    if (k % 3 == 0) rings.push_back(star(rng, c, 0.01 * scale, 0.04 * scale, 3 + rng.below(8)));
    const geo::PolygonRegion region("p", rings);
    int made = 0;
    while (made < kProbesPerPolygon) {
      const geo::GeoPoint p = k % 3 == 0 && made % 4 == 0
                                  ? geo::GeoPoint{c.lat + rng.uniform(-0.05, 0.05) * scale, c.lon + rng.uniform(-0.05, 0.05) * scale}
                                  : geo::GeoPoint{c.lat + rng.uniform(-1.2, 1.2) * scale, c.lon + rng.uniform(-1.2, 1.2) * scale};
      bool near_edge = false;
      for (const auto& r : rings) near_edge = near_edge || oracle::ring_distance(p, r) < kProbeEdgeClearanceDeg;
      if (near_edge) continue;
      ++made;
      ++probes;
      const bool expect = oracle::winding_contains(p, rings);
      inside += expect;
      if (geo::point_in_polygon(p, region) != expect) {
        return {false, "disagreement on polygon " + std::to_string(k) + " probe " + std::to_string(made)};
      }
    }
  }
  return {true, std::to_string(probes) + " probes on " + std::to_string(kPolygons) + " polygons, " + std::to_string(inside) +
                    " inside, 100% agreement"};
}

Outcome invariants() {
  Rng rng(13);
  const auto regions = std::vector{cities::box("NW", 31.25, 34.78, 31.26, 34.79), cities::box("NE", 31.25, 34.79, 31.26, 34.80),
                                   cities::box("S", 31.24, 34.78, 31.25, 34.80)};
  const char* types[] = {"daycare", "education", "synagogue", "elderly"};
  for (int c = 0; c < kFuzzCases; ++c) {
    std::vector<Facility> fs;
    std::vector<SafetyObject> os;
    const std::size_t n = rng.below(80), m = rng.below(80);
    for (std::size_t i = 0; i < n; ++i) fs.push_back(cities::facility("f" + std::to_string(i), oracle::city_point(rng, 0.012), types[rng.below(4)]));
    for (std::size_t j = 0; j < m; ++j) os.push_back(cities::object("o" + std::to_string(j), oracle::city_point(rng, 0.012)));
    const auto ds = assemble_dataset(fs, os, regions);
    const double t1 = rng.uniform(0, 400), t2 = t1 + rng.uniform(0, 400);
    const auto g1 = graph::build_bipartite_graph(fs, os, t1), g2 = graph::build_bipartite_graph(fs, os, t2);
    std::set<std::pair<std::size_t, std::size_t>> e1, e2;
    for (const auto& e : g1.edges()) e1.emplace(e.u, e.v);
    for (const auto& e : g2.edges()) e2.emplace(e.u, e.v);
    const auto i1 = graph::isolated_vertices(g1, graph::Side::left), i2 = graph::isolated_vertices(g2, graph::Side::left);
    if (!std::includes(e2.begin(), e2.end(), e1.begin(), e1.end()) || !std::includes(i1.begin(), i1.end(), i2.begin(), i2.end())) {
      return {false, "graph monotonicity broken on case " + std::to_string(c)};
    }
    std::set<std::string> v1, v2;
    const auto r1 = compliance::detect_violations(ds, RegulationRule::make(ObjectKind::hydrant, t1));
    const auto r2 = compliance::detect_violations(ds, RegulationRule::make(ObjectKind::hydrant, t2));
    for (const auto& v : r1.violations) v1.insert(v.facility_id);
    for (const auto& v : r2.violations) v2.insert(v.facility_id);
    if (!std::includes(v1.begin(), v1.end(), v2.begin(), v2.end())) return {false, "violation monotonicity broken on case " + std::to_string(c)};
    for (const auto* r : {&r1, &r2}) {
      std::size_t by_n = 0, by_t = 0, heat = 0;
      for (const auto& [k, v] : r->by_neighborhood) by_n += v;
      for (const auto& [k, v] : r->by_type_and_neighborhood) by_t += v;
      const auto heatmap = report::heatmap_document(*r, ds);
      for (const auto& f : heatmap["features"]) heat += f["properties"]["violation_count"].get<std::size_t>();
      const auto n_total = r->violations.size();
      if (by_n != n_total || by_t != n_total || heat != n_total || compliance::aggregate_by_type(*r).total() != n_total) {
        return {false, "aggregate conservation broken on case " + std::to_string(c)};
      }
    }
  }
  return {true, std::to_string(kFuzzCases) + " fuzzed cases: edges, isolated sets, violations monotone; aggregates conserve"};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "cityscan exited %d: %s", code, err.str().c_str());
  return code;
}

Outcome full_city() {
  support::TempDir dir;
  const fixture::FixtureOptions opts{};  // 1000 facilities, 2596 hydrants, 265 shelters, 15 neighborhoods
  const auto city = fixture::generate_city(opts);
  const auto files = fixture::write_city(city, opts, dir.path());
  if (city.facilities.size() != 1000 || city.hydrants.size() != 2596 || city.shelters.size() != 265 || city.regions.size() != 15) {
    return {false, "fixture shape differs from 1000/2596/265/15"};
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> problems;
  std::string summary;
  for (const auto& truth : city.ground_truth) {
    const std::string kind(to_string(truth.kind));
    const auto base = [&](const std::string& cmd, const std::string& out) {
      return std::vector<std::string>{cmd, "--facilities", files.facilities.string(), "--objects",
                                      (truth.kind == ObjectKind::hydrant ? files.hydrants : files.shelters).string(),
                                      "--boundaries", files.boundaries.string(), "--kind", kind, "--output", out};
    };
    if (cli(base("analyze", dir / (kind + ".json"))) || cli(base("heatmap", dir / (kind + ".geojson"))) ||
        cli(base("bars", dir / (kind + ".csv")))) {
      return {false, "a command failed"};
    }
    const auto analyze = ordered_json::parse(support::read_file(dir / (kind + ".json")));
    const auto heatmap = ordered_json::parse(support::read_file(dir / (kind + ".geojson")));
    const auto bars = support::read_file(dir / (kind + ".csv"));
    std::size_t heat = 0, checked = 0;
    for (const auto& f : heatmap["features"]) {
      heat += f["properties"]["violation_count"].get<std::size_t>();
      checked += f["properties"]["facilities_checked"].get<std::size_t>();
    }
    const std::size_t bars_total = std::stoul(bars.substr(bars.rfind(',', bars.size() - 2) + 1));
    const std::size_t count = analyze["totals"]["violation_count"];
    std::set<std::string> got;
    for (const auto& v : analyze["violations"]) got.insert(v["facility_id"].get<std::string>());
    const std::set<std::string> expect(truth.violating_facility_ids.begin(), truth.violating_facility_ids.end());
    if (heat != count || bars_total != count || got.size() != count) problems.push_back(kind + " totals do not reconcile");
    if (checked != 1000 || analyze["totals"]["facilities_checked"] != 1000) problems.push_back(kind + " checked count off");
    if (got != expect) problems.push_back(kind + " differs from ground truth");
    summary += kind + " " + std::to_string(count) + " violations; ";
  }
  const double elapsed = seconds_since(t0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "full analysis %.3f s (limit %.1f s)", elapsed, kPaperScaleBudgetS);
  summary += buf;
  for (const auto& p : problems) summary += "; " + p;
  return {problems.empty() && elapsed < kPaperScaleBudgetS, summary};
}

Outcome greedy() {
  const auto ds = cities::two_cluster_city();
  const auto rule = RegulationRule::preset(ObjectKind::hydrant);
  const auto rep = compliance::detect_violations(ds, rule);
  // Exhaustive evaluation: best single candidate, then best complement.
  std::vector<std::set<std::string>> coverage;
  for (const auto& a : rep.violations) {
    std::set<std::string> cov;
    for (const auto& v : rep.violations) {
      if (oracle::reference_distance(a.location, v.location) <= rule.threshold_m) cov.insert(v.facility_id);
    }
    coverage.push_back(cov);
  }
  std::size_t first = 0, second = 0;
  for (const auto& c : coverage) first = std::max(first, c.size());
  for (const auto& c1 : coverage) {
    if (c1.size() != first) continue;
    for (const auto& c2 : coverage) {
      std::size_t gain = 0;
      for (const auto& id : c2) gain += !c1.contains(id);
      second = std::max(second, gain);
    }
  }
  const auto picks = compliance::suggest_placements(rep, 2);
  auto objects = ds.objects();
  for (std::size_t i = 0; i < picks.size(); ++i) objects.push_back(cities::object("new" + std::to_string(i), picks[i].location));
  const auto after = compliance::detect_violations(assemble_dataset(ds.facilities(), objects, ds.neighborhoods()), rule);
  const bool order_ok = picks.size() == 2 && picks[0].covered_count == first && picks[1].covered_count == second &&
                        first == 4 && second == 2;
  std::string detail = "coverage (";
  for (std::size_t i = 0; i < picks.size(); ++i) detail += (i ? ", " : "") + std::to_string(picks[i].covered_count);
  detail += "), exhaustive (" + std::to_string(first) + ", " + std::to_string(second) + "); violations after applying: " +
            std::to_string(after.totals.violation_count);
  return {order_ok && after.totals.violation_count == 0, detail};
}

Outcome parity() {
  support::TempDir dir;
  fixture::FixtureOptions opts;
  opts.seed = 5;
  const auto city = fixture::generate_city(opts);
  const auto files = fixture::write_city(city, opts, dir.path());
  auto facilities = parse_facilities_csv(support::read_file(files.facilities.string())).items;
  auto objects = parse_objects_csv(support::read_file(files.hydrants.string()), ObjectKind::hydrant).items;
  const auto shelters = parse_objects_csv(support::read_file(files.shelters.string()), ObjectKind::shelter).items;
  objects.insert(objects.end(), shelters.begin(), shelters.end());
  const api::Service service(std::make_shared<const CityDataset>(
      assemble_dataset(facilities, objects, parse_boundaries_geojson(support::read_file(files.boundaries.string())))));
  const auto& names = fixture::beer_sheva_neighborhoods();
  const std::vector<std::string> types{"daycare", "education", "synagogue", "elderly", "medical", "castle"};

  Rng rng(99);
  std::size_t compared = 0;
  for (int s = 0; s < kParitySets; ++s) {
    const bool hydrant = rng.below(2) == 0;
    const std::string kind = hydrant ? "hydrant" : "shelter";
    char th[32];
    std::snprintf(th, sizeof th, "%.2f", rng.uniform(1, 250));
    std::multimap<std::string, std::string> params{{"kind", kind}, {"threshold", th}};
    std::vector<std::string> filter_args;
    for (std::size_t i = rng.below(3); i > 0; --i) {
      const auto name = rng.below(8) == 0 ? std::string("Atlantis") : names[rng.below(names.size())];
      params.emplace("neighborhood", name);
      filter_args.insert(filter_args.end(), {"--neighborhood", name});
    }
    for (std::size_t i = rng.below(2); i > 0; --i) {
      const auto& type = types[rng.below(types.size())];
      params.emplace("facility_type", type);
      filter_args.insert(filter_args.end(), {"--facility-type", type});
    }
    const std::string k = std::to_string(1 + rng.below(6)), top = std::to_string(1 + rng.below(30));
    struct Pair {
      std::string cmd, path;
      std::vector<std::string> extra;
      std::multimap<std::string, std::string> extra_params;
    };
    const std::vector<Pair> pairs{{"analyze", "/api/violations", {}, {}},
                                  {"heatmap", "/api/heatmap", {}, {}},
                                  {"suggest", "/api/suggestions", {"--k", k}, {{"k", k}}},
                                  {"rank", "/api/centrality", {"--top", top}, {{"top", top}}}};
    for (const auto& p : pairs) {
      const auto out = dir / ("parity-" + p.cmd + ".json");
      std::vector<std::string> args{p.cmd, "--facilities", files.facilities.string(), "--objects",
                                    (hydrant ? files.hydrants : files.shelters).string(), "--boundaries", files.boundaries.string(),
                                    "--kind", kind, "--threshold", th, "--output", out};
      args.insert(args.end(), filter_args.begin(), filter_args.end());
      args.insert(args.end(), p.extra.begin(), p.extra.end());
      if (cli(args) != 0) return {false, "cli " + p.cmd + " failed on set " + std::to_string(s)};
      auto query = params;
      query.insert(p.extra_params.begin(), p.extra_params.end());
      const auto res = service.handle({p.path, query});
      if (res.status != 200) return {false, p.path + " answered " + std::to_string(res.status)};
      if (ordered_json::parse(res.body) != ordered_json::parse(support::read_file(out))) {
        return {false, p.cmd + " differs from " + p.path + " on set " + std::to_string(s)};
      }
      ++compared;
    }
  }
  return {true, std::to_string(kParitySets) + " parameter sets, " + std::to_string(compared) + " CLI exports equal API responses"};
}

}  // namespace

int main() {
  cli::configure_logging();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"graph oracle equivalence", graph_oracle},
      {"violation oracle equivalence", violation_oracle},
      {"geodesic correctness", geodesic},
      {"point-in-polygon vs winding number", point_in_polygon},
      {"threshold monotonicity and aggregate conservation", invariants},
      {"full-size city shape and timing", full_city},
      {"greedy suggester on two clusters", greedy},
      {"CLI/API parity", parity},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
