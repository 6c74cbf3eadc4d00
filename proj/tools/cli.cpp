#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cityscan/api.hpp"
#include "cityscan/compliance.hpp"
#include "cityscan/error.hpp"
#include "cityscan/fixture.hpp"
#include "cityscan/graph.hpp"
#include "cityscan/ingest.hpp"
#include "cityscan/report.hpp"

namespace cityscan::cli {
namespace {

struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw InputError(path + ": cannot write file");
}

template <typename T>
std::vector<T> strict(ParseResult<T> result, const std::string& path) {
  if (!result.ok()) {
    const auto& first = result.rejections.front();
    std::string msg = path + ": row " + std::to_string(first.row) + ": " + first.reason;
    if (result.rejections.size() > 1) {
      msg += " (" + std::to_string(result.rejections.size() - 1) + " more rejected rows)";
    }
    throw InputError(msg);
  }
  return std::move(result.items);
}

template <typename Fn>
auto with_file_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.starts_with(path)) throw;
    throw InputError(path + ": " + what);
  }
}

std::vector<Facility> load_facilities(const std::string& path) {
  const auto text = read_file(path);
  return with_file_context(path, [&] { return strict(parse_facilities_csv(text), path); });
}

std::vector<SafetyObject> load_objects(const std::string& path, ObjectKind kind) {
  const auto text = read_file(path);
  return with_file_context(path, [&] { return strict(parse_objects_csv(text, kind), path); });
}

std::vector<PolygonRegion> load_boundaries(const std::string& path) {
  const auto text = read_file(path);
  return with_file_context(path, [&] { return parse_boundaries_geojson(text); });
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Flags shared by analyze, heatmap, bars, suggest and rank.
struct DatasetFlags {
  std::string facilities;
  std::string objects;
  std::string kind = "hydrant";
  std::optional<double> threshold;
  std::string boundaries;
  std::string exclude_types;
  std::vector<std::string> neighborhoods;
  std::vector<std::string> facility_types;
  std::string output;

  void attach(CLI::App& cmd) {
    cmd.add_option("--facilities", facilities, "Facilities CSV")->required();
    cmd.add_option("--objects", objects, "Safety objects CSV")->required();
    cmd.add_option("--kind", kind, "Object kind")->check(CLI::IsMember({"hydrant", "shelter"}));
    cmd.add_option("--threshold", threshold, "Threshold in meters (default: rule preset)");
    cmd.add_option("--boundaries", boundaries, "Neighborhood boundaries GeoJSON")->required();
    cmd.add_option("--exclude-types", exclude_types, "Comma-separated exempt facility types");
    cmd.add_option("--neighborhood", neighborhoods, "Restrict to neighborhood (repeatable)");
    cmd.add_option("--facility-type", facility_types, "Restrict to facility type (repeatable)");
    cmd.add_option("--output", output, "Output path")->required();
  }

  compliance::RegulationRule rule() const {
    const auto k = parse_object_kind(kind);
    const double th = threshold.value_or(compliance::preset_threshold(k));
    if (!(th > 0.0) || !std::isfinite(th)) throw UsageError("--threshold must be greater than 0");
    return compliance::RegulationRule::make(k, th, {}, split_list(exclude_types));
  }

  compliance::FacilityFilter filter() const { return {neighborhoods, facility_types}; }

  CityDataset load() const {
    auto f = load_facilities(facilities);
    auto o = load_objects(objects, parse_object_kind(kind));
    auto b = load_boundaries(boundaries);
    return assemble_dataset(std::move(f), std::move(o), std::move(b),
                            {std::filesystem::path(facilities).filename().string(), utc_timestamp_now()});
  }
};

int run_analyze(const DatasetFlags& flags, const std::string& format, std::ostream& out) {
  const auto rule = flags.rule();
  const auto dataset = flags.load();
  const auto rep = compliance::detect_violations(dataset, rule, flags.filter());
  write_file(flags.output, format == "csv" ? report::violations_csv(rep)
                                           : report::violation_report_json(rep).dump(2) + "\n");
  out << "rule: " << to_string(rule.kind) << " within " << rule.threshold_m << " m\n"
      << "facilities_checked: " << rep.totals.facilities_checked << "\n"
      << "violation_count: " << rep.totals.violation_count << "\n"
      << "top neighborhoods:\n";
  const auto ranked = compliance::aggregate_by_neighborhood(rep);
  for (std::size_t i = 0; i < ranked.size() && i < 5; ++i) {
    out << "  " << ranked[i].first << ": " << ranked[i].second << "\n";
  }
  return kExitOk;
}

int run_serve(const std::string& host, int port, const std::string& facilities,
              const std::string& hydrants, const std::string& shelters,
              const std::string& boundaries, const std::string& ui_dir, std::ostream& err) {
  api::Service service;
  httplib::Server server;
  api::ServeOptions options{host, port, ui_dir};
  api::mount(server, service, options);
  int status = kExitOk;
  std::thread loader([&] {
    try {
      auto f = load_facilities(facilities);
      auto objects = load_objects(hydrants, ObjectKind::hydrant);
      auto s = load_objects(shelters, ObjectKind::shelter);
      objects.insert(objects.end(), s.begin(), s.end());
      auto b = load_boundaries(boundaries);
      service.load(std::make_shared<const CityDataset>(assemble_dataset(
          std::move(f), std::move(objects), std::move(b),
          {std::filesystem::path(facilities).filename().string(), utc_timestamp_now()})));
      spdlog::info("dataset loaded");
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      status = kExitInputError;
      server.wait_until_ready();
      server.stop();
    }
  });
  spdlog::info("listening on {}:{}", host, port);
  const bool ok = server.listen(host, port);
  loader.join();
  if (!ok && status == kExitOk) {
    err << "error: cannot listen on " << host << ":" << port << "\n";
    return kExitInputError;
  }
  return status;
}

}  // namespace

void configure_logging() {
  auto logger = spdlog::get("cityscan");
  if (!logger) logger = spdlog::stderr_color_mt("cityscan");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("CITYSCAN_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::set_level(spdlog::level::warn);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cityscan: facility safety-coverage analysis over proximity graphs", "cityscan"};
  app.require_subcommand(1);

  DatasetFlags analyze_flags, heatmap_flags, bars_flags, suggest_flags, rank_flags;
  std::string format = "json";
  auto* analyze = app.add_subcommand("analyze", "Detect violations and write the report");
  analyze_flags.attach(*analyze);
  analyze->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* heatmap = app.add_subcommand("heatmap", "Write the per-neighborhood choropleth GeoJSON");
  heatmap_flags.attach(*heatmap);

  auto* bars = app.add_subcommand("bars", "Write the facility type x neighborhood table");
  bars_flags.attach(*bars);

  std::size_t k = 5;
  auto* suggest = app.add_subcommand("suggest", "Suggest new object placements");
  suggest_flags.attach(*suggest);
  suggest->add_option("--k", k, "Number of placements")->required();

  std::size_t top = 20;
  auto* rank = app.add_subcommand("rank", "Rank objects by degree centrality");
  rank_flags.attach(*rank);
  rank->add_option("--top", top, "Number of objects");

  std::string graph_objects, graph_output, graph_kind = "hydrant";
  double graph_threshold = 0.0;
  auto* graph_cmd = app.add_subcommand("graph", "Write the object-object proximity graph");
  graph_cmd->add_option("--objects", graph_objects, "Safety objects CSV")->required();
  graph_cmd->add_option("--kind", graph_kind, "Object kind")->check(CLI::IsMember({"hydrant", "shelter"}));
  graph_cmd->add_option("--threshold", graph_threshold, "Threshold in meters")->required();
  graph_cmd->add_option("--output", graph_output, "Output path")->required();

  fixture::FixtureOptions fx;
  std::optional<std::size_t> fx_shelters;
  std::string fx_dir;
  auto* fixture_cmd = app.add_subcommand("fixture", "Generate a synthetic city with ground truth");
  fixture_cmd->add_option("--seed", fx.seed, "RNG seed")->required();
  fixture_cmd->add_option("--facilities", fx.facilities, "Facility count")->required();
  fixture_cmd->add_option("--objects", fx.hydrants, "Hydrant count")->required();
  fixture_cmd->add_option("--shelters", fx_shelters, "Shelter count (default: objects / 10)");
  fixture_cmd->add_option("--neighborhoods", fx.neighborhoods, "Neighborhood count");
  fixture_cmd->add_option("--out-dir", fx_dir, "Output directory")->required();

  std::string host = "0.0.0.0", sv_fac, sv_hyd, sv_shel, sv_bound, ui_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--port", port, "TCP port")->required();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--facilities", sv_fac, "Facilities CSV")->required();
  serve->add_option("--objects-hydrants", sv_hyd, "Hydrants CSV")->required();
  serve->add_option("--objects-shelters", sv_shel, "Shelters CSV")->required();
  serve->add_option("--boundaries", sv_bound, "Boundaries GeoJSON")->required();
  serve->add_option("--ui-dir", ui_dir, "Static explorer UI directory");

  std::vector<std::string> argv_storage{"cityscan"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsageError;
  }

  try {
    if (analyze->parsed()) return run_analyze(analyze_flags, format, out);
    if (heatmap->parsed()) {
      const auto rule = heatmap_flags.rule();
      const auto dataset = heatmap_flags.load();
      const auto rep = compliance::detect_violations(dataset, rule, heatmap_flags.filter());
      write_file(heatmap_flags.output, report::heatmap_document(rep, dataset).dump(2) + "\n");
      out << "features: " << rep.neighborhoods.size() << "\nviolation_count: " << rep.totals.violation_count
          << "\n";
      return kExitOk;
    }
    if (bars->parsed()) {
      const auto rule = bars_flags.rule();
      const auto dataset = bars_flags.load();
      const auto rep = compliance::detect_violations(dataset, rule, bars_flags.filter());
      write_file(bars_flags.output, report::bars_csv(rep));
      out << "violation_count: " << rep.totals.violation_count << "\n";
      return kExitOk;
    }
    if (suggest->parsed()) {
      if (k < 1) throw UsageError("--k must be at least 1");
      const auto rule = suggest_flags.rule();
      const auto dataset = suggest_flags.load();
      const auto picks = compliance::suggest_placements(dataset, rule, k, suggest_flags.filter());
      write_file(suggest_flags.output, report::suggestions_json(rule, picks).dump(2) + "\n");
      out << "suggestions: " << picks.size() << "\n";
      for (const auto& p : picks) out << "  " << p.candidate_facility_id << " covers " << p.covered_count << "\n";
      return kExitOk;
    }
    if (rank->parsed()) {
      if (top < 1) throw UsageError("--top must be at least 1");
      const auto rule = rank_flags.rule();
      const auto dataset = rank_flags.load();
      const auto ranked = compliance::rank_objects_for_maintenance(dataset, rule, top, rank_flags.filter());
      write_file(rank_flags.output, report::ranking_json(rule, ranked).dump(2) + "\n");
      out << "objects: " << ranked.size() << "\n";
      return kExitOk;
    }
    if (graph_cmd->parsed()) {
      if (!(graph_threshold >= 0.0) || !std::isfinite(graph_threshold)) {
        throw UsageError("--threshold must be >= 0");
      }
      const auto objects = load_objects(graph_objects, parse_object_kind(graph_kind));
      const auto g = graph::build_unipartite_graph(objects, graph_threshold);
      write_file(graph_output, graph::graph_to_json(g) + "\n");
      out << "vertices: " << g.vertex_count() << "\nedges: " << g.edges().size()
          << "\ncomponents: " << graph::connected_components(g).size() << "\n";
      return kExitOk;
    }
    if (fixture_cmd->parsed()) {
      fx.shelters = fx_shelters.value_or(fx.hydrants / 10);
      const auto city = fixture::generate_city(fx);
      const auto files = fixture::write_city(city, fx, fx_dir);
      out << "wrote " << files.facilities.parent_path().string() << "\n";
      for (const auto& gt : city.ground_truth) {
        out << "  " << to_string(gt.kind) << "/" << gt.threshold_m
            << " m violations: " << gt.violating_facility_ids.size() << "\n";
      }
      return kExitOk;
    }
    if (serve->parsed()) return run_serve(host, port, sv_fac, sv_hyd, sv_shel, sv_bound, ui_dir, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitUsageError;
}

}  // namespace cityscan::cli
