#pragma once

#include <json.hpp>

#include "hullwrap/bench.hpp"
#include "hullwrap/contraction.hpp"
#include "hullwrap/validation.hpp"

namespace hullwrap {

inline nlohmann::ordered_json to_json(const Edge& e) { return nlohmann::ordered_json::array({e[0], e[1]}); }
inline nlohmann::ordered_json to_json(const Facet& f) { return nlohmann::ordered_json::array({f[0], f[1], f[2]}); }

inline nlohmann::ordered_json to_json(const TraceCheck& c) {
  nlohmann::ordered_json j;
  j["ok"] = c.ok();
  j["metric_decreasing"] = c.metric_decreasing;
  j["hausdorff_nonincreasing"] = c.hausdorff_nonincreasing;
  j["volume_exact"] = c.volume_exact;
  j["volume_consistent"] = c.volume_consistent;
  j["area_nondecreasing"] = c.area_nondecreasing;
  j["insertions"] = c.insertions;
  j["failure"] = c.failure.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(c.failure);
  return j;
}

inline nlohmann::ordered_json to_json(const ValidationReport& r) {
  nlohmann::ordered_json j;
  j["passed"] = r.passed();
  j["closed_manifold"] = r.closed_manifold;
  j["orientation_consistent"] = r.orientation_consistent;
  j["vertex_fans_ok"] = r.vertex_fans_ok;
  j["self_intersection_free"] = r.self_intersection_free;
  j["all_points_on_surface"] = r.all_points_on_surface;
  j["containment_ok"] = r.containment_ok;
  j["containment_checked"] = r.containment_checked;
  j["euler"] = r.euler;
  j["vertices"] = r.vertices;
  j["facets"] = r.facets;
  auto list = [](const auto& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& e : v) a.push_back(to_json(e));
    return a;
  };
  j["boundary_edges"] = list(r.boundary_edges);
  j["nonmanifold_edges"] = list(r.nonmanifold_edges);
  j["misoriented_edges"] = list(r.misoriented_edges);
  nlohmann::ordered_json w = nlohmann::ordered_json::array();
  for (const FacetPair& p : r.intersection_witnesses) w.push_back({p[0], p[1]});
  j["intersection_witnesses"] = w;
  j["degenerate_facets"] = r.degenerate_facets;
  j["worst_point"] = r.worst_point ? nlohmann::ordered_json(*r.worst_point) : nlohmann::ordered_json();
  j["worst_distance"] = r.worst_distance;
  j["outside_points"] = r.outside_points;
  j["metric"] = r.metric;
  j["hausdorff"] = r.hausdorff;
  j["volume"] = r.volume;
  j["area"] = r.area;
  j["trace"] = r.trace ? to_json(*r.trace) : nlohmann::ordered_json();
  return j;
}

inline nlohmann::ordered_json to_json(const GuardDecision& d) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(d.verdict);
  j["target"] = to_json(d.target);
  if (d.verdict == GuardVerdict::Intersects || d.verdict == GuardVerdict::Degenerate) j["candidate"] = to_json(d.candidate);
  if (d.verdict == GuardVerdict::Intersects) {
    j["offending_facet"] = d.offending ? nlohmann::ordered_json(*d.offending) : nlohmann::ordered_json();
    j["offending"] = to_json(d.offending_vertices);
  }
  if (d.verdict == GuardVerdict::ExpelsPoint) j["expelled"] = d.expelled;
  return j;
}

/// Run summary; `timings` adds the wall-clock fields.
inline nlohmann::ordered_json to_json(const ContractionResult& r, std::size_t n, bool timings = true) {
  nlohmann::ordered_json j;
  j["outcome"] = to_string(r.outcome);
  j["points"] = n;
  j["hull_vertices"] = r.hull_vertices;
  j["insertions"] = r.insertions;
  j["coplanar_insertions"] = r.coplanar_insertions;
  j["n_minus_m"] = n - r.hull_vertices;
  j["n_over_100"] = static_cast<double>(n) / 100.0;
  j["insertions_match_n_over_100"] = static_cast<double>(r.insertions) == static_cast<double>(n) / 100.0;
  j["passes"] = r.passes;
  j["skipped"] = r.skipped;
  j["deferred"] = r.deferred;
  j["facets"] = r.mesh.facet_count();
  j["final_metric"] = r.trace.steps.empty() ? 0.0 : r.trace.steps.back().metric;
  j["final_volume"] = r.trace.steps.empty() ? 0.0 : r.trace.steps.back().volume;
  j["final_area"] = r.trace.steps.empty() ? 0.0 : r.trace.steps.back().area;
  nlohmann::ordered_json blocked = nlohmann::ordered_json::array();
  for (const BlockedPoint& b : r.blocked) {
    nlohmann::ordered_json e;
    e["point"] = b.point;
    e["last_guard"] = b.last ? to_json(*b.last) : nlohmann::ordered_json();
    blocked.push_back(e);
  }
  j["blocked"] = blocked;
  if (timings) {
    j["timings"] = {{"hull", r.times.hull},
                    {"sort", r.times.sort},
                    {"prioritize", r.times.prioritize},
                    {"insert", r.times.insert}};
  }
  return j;
}

inline nlohmann::ordered_json to_json(const ScalingSummary& s) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json sizes = nlohmann::ordered_json::array();
  for (const SizeSummary& z : s.sizes) {
    nlohmann::ordered_json e;
    e["n"] = z.n;
    e["hull_vertices"] = z.hull_vertices;
    e["insertions"] = z.insertions;
    e["n_minus_m"] = z.n_minus_m;
    e["n_over_100"] = z.n_over_100;
    e["complete"] = z.complete;
    e["accounting_ok"] = z.accounting_ok;
    e["median_seconds"] = {{"total", z.t_total},   {"hull", z.t_hull},     {"sort", z.t_sort},
                           {"prioritize", z.t_prioritize}, {"insert", z.t_insert}, {"validate", z.t_validate}};
    sizes.push_back(e);
  }
  j["sizes"] = sizes;
  j["slopes"] = {{"total", s.slope_total},         {"hull", s.slope_hull},     {"sort", s.slope_sort},
                 {"prioritize", s.slope_prioritize}, {"insert", s.slope_insert}, {"validate", s.slope_validate}};
  j["expected_sort_slope"] = s.expected_sort_slope;
  j["checks"] = {{"total_slope_max_soft", kSoftTotalSlope},
                 {"total_within_soft", s.total_within_soft},
                 {"sort_slope_band", kSortSlopeBand},
                 {"sort_within_band", s.sort_within_band},
                 {"total_slope_max_hard", kHardTotalSlope},
                 {"total_within_hard", s.total_within_hard},
                 {"insertions_equal_n_minus_m", s.accounting_ok},
                 {"n_over_100_matches_insertions", s.n_over_100_matches}};
  j["insertion_accounting"] =
      s.n_over_100_matches ? "n/100 coincides with n - m for some size"
                           : "insertions follow n - m (one point per step); n/100 does not match at any size";
  return j;
}

}  // namespace hullwrap
