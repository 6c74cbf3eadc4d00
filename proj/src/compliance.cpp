#include "cityscan/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "cityscan/error.hpp"
#include "cityscan/graph.hpp"
#include "cityscan/spatial_index.hpp"

namespace cityscan::compliance {
namespace {

struct Selection {
  std::vector<Facility> checked;
  std::vector<std::string> neighborhoods;
  std::vector<std::string> facility_types;
  AppliedFilter filter;
};

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Resolves the rule's exclusions and the filter into the set of facilities to
// check plus the neighborhood and type axes of the aggregates.
Selection select_facilities(const CityDataset& dataset, const RegulationRule& rule,
                            const FacilityFilter& filter) {
  Selection sel;
  sel.filter.requested = filter;
  const std::string unassigned(geo::kUnassigned);

  std::vector<std::string> all_neighborhoods = dataset.neighborhood_names();
  const bool has_unassigned =
      std::any_of(dataset.facilities().begin(), dataset.facilities().end(),
                  [&](const Facility& f) { return f.neighborhood == unassigned; });
  auto known_neighborhood = [&](const std::string& n) {
    return n == unassigned || contains(all_neighborhoods, n);
  };
  if (filter.neighborhoods.empty()) {
    sel.neighborhoods = all_neighborhoods;
    if (has_unassigned) sel.neighborhoods.push_back(unassigned);
  } else {
    for (const auto& n : filter.neighborhoods) {
      if (!known_neighborhood(n) && !contains(sel.filter.unknown_neighborhoods, n)) {
        sel.filter.unknown_neighborhoods.push_back(n);
      }
    }
    for (const auto& n : all_neighborhoods) {
      if (contains(filter.neighborhoods, n)) sel.neighborhoods.push_back(n);
    }
    if (contains(filter.neighborhoods, unassigned)) sel.neighborhoods.push_back(unassigned);
  }

  const auto all_types = dataset.facility_types();
  for (const auto& t : filter.facility_types) {
    if (!contains(all_types, t) && !contains(sel.filter.unknown_facility_types, t)) {
      sel.filter.unknown_facility_types.push_back(t);
    }
  }
  for (const auto& t : all_types) {
    if (contains(rule.excluded_types, t)) continue;
    if (!filter.facility_types.empty() && !contains(filter.facility_types, t)) continue;
    sel.facility_types.push_back(t);
  }

  const std::set<std::string> n_axis(sel.neighborhoods.begin(), sel.neighborhoods.end());
  const std::set<std::string> t_axis(sel.facility_types.begin(), sel.facility_types.end());
  for (const auto& f : dataset.facilities()) {
    if (n_axis.contains(f.neighborhood) && t_axis.contains(f.type.name())) {
      sel.checked.push_back(f);
    }
  }
  return sel;
}

}  // namespace

double preset_threshold(ObjectKind kind) noexcept {
  return kind == ObjectKind::hydrant ? kHydrantThresholdM : kShelterThresholdM;
}

RegulationRule RegulationRule::make(ObjectKind kind, double threshold_m, std::string label,
                                    std::vector<std::string> excluded_types) {
  if (!std::isfinite(threshold_m) || threshold_m < 0.0) {
    throw ArgumentError("rule threshold must be a finite non-negative number of meters");
  }
  if (label.empty()) label = std::string(to_string(kind));
  return RegulationRule{kind, threshold_m, std::move(label), std::move(excluded_types)};
}

RegulationRule RegulationRule::preset(ObjectKind kind) {
  return make(kind, preset_threshold(kind));
}

ViolationReport detect_violations(const CityDataset& dataset, const RegulationRule& rule,
                                  const FacilityFilter& filter) {
  auto sel = select_facilities(dataset, rule, filter);
  const auto objects = dataset.objects_of(rule.kind);
  const auto g = graph::build_bipartite_graph(sel.checked, objects, rule.threshold_m);

  std::vector<geo::IndexedPoint> points;
  points.reserve(objects.size());
  for (const auto& o : objects) points.push_back({o.id, o.location});
  const geo::SpatialIndex index(std::move(points), std::max(rule.threshold_m, 10.0));

  ViolationReport report;
  report.rule = rule;
  report.filter = std::move(sel.filter);
  report.neighborhoods = std::move(sel.neighborhoods);
  report.facility_types = std::move(sel.facility_types);
  for (const auto& n : report.neighborhoods) {
    report.by_neighborhood[n] = 0;
    report.checked_by_neighborhood[n] = 0;
    for (const auto& t : report.facility_types) report.by_type_and_neighborhood[{t, n}] = 0;
  }

  const auto degrees = g.degrees(graph::Side::left);
  for (std::size_t i = 0; i < sel.checked.size(); ++i) {
    const auto& f = sel.checked[i];
    ++report.checked_by_neighborhood[f.neighborhood];
    if (degrees[i] != 0) continue;
    Violation v{f.id, f.name, f.type.name(), f.neighborhood, f.location, std::nullopt, std::nullopt};
    if (const auto hit = index.nearest(f.location)) {
      v.nearest_object_id = std::string(hit->id);
      v.nearest_distance_m = hit->distance_m;
    }
    ++report.by_neighborhood[v.neighborhood];
    ++report.by_type_and_neighborhood[{v.facility_type, v.neighborhood}];
    report.violations.push_back(std::move(v));
  }
  std::sort(report.violations.begin(), report.violations.end(),
            [](const Violation& a, const Violation& b) {
              return std::tie(a.neighborhood, a.facility_type, a.facility_id) <
                     std::tie(b.neighborhood, b.facility_type, b.facility_id);
            });
  report.totals = {sel.checked.size(), report.violations.size()};
  return report;
}

std::vector<std::pair<std::string, std::size_t>> aggregate_by_neighborhood(
    const ViolationReport& report) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& n : report.neighborhoods) {
    const auto it = report.by_neighborhood.find(n);
    out.emplace_back(n, it == report.by_neighborhood.end() ? 0 : it->second);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::size_t TypeMatrix::row_total(std::size_t row) const {
  std::size_t sum = 0;
  for (const auto c : counts[row]) sum += c;
  return sum;
}

std::size_t TypeMatrix::column_total(std::size_t col) const {
  std::size_t sum = 0;
  for (const auto& row : counts) sum += row[col];
  return sum;
}

std::size_t TypeMatrix::total() const {
  std::size_t sum = 0;
  for (std::size_t r = 0; r < counts.size(); ++r) sum += row_total(r);
  return sum;
}

TypeMatrix aggregate_by_type(const ViolationReport& report) {
  TypeMatrix m{report.facility_types, report.neighborhoods, {}};
  m.counts.assign(m.facility_types.size(), std::vector<std::size_t>(m.neighborhoods.size(), 0));
  for (std::size_t r = 0; r < m.facility_types.size(); ++r) {
    for (std::size_t c = 0; c < m.neighborhoods.size(); ++c) {
      const auto it = report.by_type_and_neighborhood.find({m.facility_types[r], m.neighborhoods[c]});
      if (it != report.by_type_and_neighborhood.end()) m.counts[r][c] = it->second;
    }
  }
  return m;
}

std::vector<RankedObject> rank_objects_for_maintenance(const CityDataset& dataset,
                                                       const RegulationRule& rule,
                                                       std::size_t top_k,
                                                       const FacilityFilter& filter) {
  if (top_k == 0) throw ArgumentError("top_k must be at least 1");
  const auto sel = select_facilities(dataset, rule, filter);
  const auto objects = dataset.objects_of(rule.kind);
  const auto g = graph::build_bipartite_graph(sel.checked, objects, rule.threshold_m);

  std::vector<RankedObject> ranked;
  const auto denom = static_cast<double>(std::max<std::size_t>(1, sel.checked.size()));
  const auto degrees = g.degrees(graph::Side::right);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    ranked.push_back({objects[i].id, objects[i].location, degrees[i],
                      static_cast<double>(degrees[i]) / denom});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedObject& a, const RankedObject& b) {
    if (a.degree != b.degree) return a.degree > b.degree;
    return a.object_id < b.object_id;
  });
  if (ranked.size() > top_k) ranked.resize(top_k);
  return ranked;
}

std::vector<PlacementSuggestion> suggest_placements(const ViolationReport& report, std::size_t k) {
  if (k == 0) throw ArgumentError("k must be at least 1");
  const auto& violations = report.violations;
  if (violations.empty()) return {};

  std::vector<geo::IndexedPoint> points;
  points.reserve(violations.size());
  for (const auto& v : violations) points.push_back({v.facility_id, v.location});
  const geo::SpatialIndex index(std::move(points), std::max(report.rule.threshold_m, 10.0));

  // coverage[c] = slots of violating facilities within threshold of candidate c.
  std::vector<std::vector<std::size_t>> coverage(violations.size());
  for (std::size_t c = 0; c < violations.size(); ++c) {
    for (const auto& hit : index.query_within(violations[c].location, report.rule.threshold_m)) {
      coverage[c].push_back(hit.slot);
    }
  }

  std::vector<bool> covered(violations.size(), false);
  std::size_t remaining = violations.size();
  std::vector<PlacementSuggestion> picks;
  while (picks.size() < k && remaining > 0) {
    std::size_t best = violations.size();
    std::size_t best_gain = 0;
    for (std::size_t c = 0; c < violations.size(); ++c) {
      std::size_t gain = 0;
      for (const auto slot : coverage[c]) gain += covered[slot] ? 0 : 1;
      if (gain > best_gain ||
          (gain == best_gain && gain > 0 && violations[c].facility_id < violations[best].facility_id)) {
        best = c;
        best_gain = gain;
      }
    }
    PlacementSuggestion s;
    s.location = violations[best].location;
    s.candidate_facility_id = violations[best].facility_id;
    for (const auto slot : coverage[best]) {
      if (covered[slot]) continue;
      covered[slot] = true;
      s.covered_facility_ids.push_back(violations[slot].facility_id);
    }
    std::sort(s.covered_facility_ids.begin(), s.covered_facility_ids.end());
    s.covered_count = s.covered_facility_ids.size();
    remaining -= s.covered_count;
    picks.push_back(std::move(s));
  }
  return picks;
}

std::vector<PlacementSuggestion> suggest_placements(const CityDataset& dataset,
                                                    const RegulationRule& rule, std::size_t k,
                                                    const FacilityFilter& filter) {
  if (k == 0) throw ArgumentError("k must be at least 1");
  return suggest_placements(detect_violations(dataset, rule, filter), k);
}

}  // namespace cityscan::compliance
