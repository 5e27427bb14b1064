#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hullwrap/aabb_tree.hpp"
#include "hullwrap/convex_hull.hpp"
#include "hullwrap/error.hpp"
#include "hullwrap/geom_core.hpp"
#include "hullwrap/point_cloud.hpp"
#include "hullwrap/surface_mesh.hpp"
#include "hullwrap/trace.hpp"

namespace hullwrap {

enum class PriorityMode { Centroid, TrueDistance };
enum class PointStatus : std::uint8_t { OnSurface, Pending, Deferred };
enum class Outcome { Complete, Stalled };
enum class TraceVerbosity { Steps, Snapshots };

inline std::string_view to_string(PriorityMode m) { return m == PriorityMode::Centroid ? "centroid" : "true"; }
inline std::string_view to_string(Outcome o) { return o == Outcome::Complete ? "COMPLETE" : "STALLED"; }

struct ContractionConfig {
  PriorityMode priority = PriorityMode::Centroid;
  std::size_t fallback_breadth = 8;       // candidate facets tried per point, nearest first
  double on_surface_tolerance = 1e-9;     // fraction of the bounding-box diagonal
  std::size_t max_passes = 100000;
  TraceVerbosity verbosity = TraceVerbosity::Steps;

  void check() const {
    if (fallback_breadth < 1) throw Error(ErrorKind::Config, "fallback breadth must be at least 1");
    if (!(on_surface_tolerance > 0.0)) throw Error(ErrorKind::Config, "on-surface tolerance must be positive");
    if (max_passes < 1) throw Error(ErrorKind::Config, "max passes must be at least 1");
  }
};

// ---------------------------------------------------------------------------

/// Bounding-box hierarchies over the facets of a mesh (triangle boxes) and
/// over their centroids, kept in step with in-place facet replacement.
class FacetIndex {
 public:
  FacetIndex(const SurfaceMesh& mesh, std::span<const Point3> points) : mesh_(&mesh), points_(points) {
    for (FacetId f = 0; f < mesh.facet_count(); ++f) add(f);
  }

  void add(FacetId f) {
    if (f >= leaves_.size()) {
      leaves_.resize(static_cast<std::size_t>(f) + 1, AabbTree::kNull);
      centroid_leaves_.resize(static_cast<std::size_t>(f) + 1, AabbTree::kNull);
    }
    const Triangle t = mesh_->triangle(f, points_);
    leaves_[f] = tree_.insert(Aabb::of(t), f);
    centroid_leaves_[f] = centroids_.insert(point_box(centroid(t)), f);
  }

  void refresh(FacetId f) {
    const Triangle t = mesh_->triangle(f, points_);
    tree_.update(leaves_[f], Aabb::of(t), f);
    centroids_.update(centroid_leaves_[f], point_box(centroid(t)), f);
  }

  const AabbTree& tree() const { return tree_; }

  template <typename Keep>
  std::vector<std::pair<double, FacetId>> nearest(const Point3& p, std::size_t k, PriorityMode mode, Keep&& keep) const {
    if (mode == PriorityMode::Centroid) {
      return centroids_.nearest(
          p, k, [&](FacetId f) { return detail::centroid_distance_unchecked(p, mesh_->triangle(f, points_)); }, keep);
    }
    return tree_.nearest(
        p, k, [&](FacetId f) { return detail::point_triangle_distance_unchecked(p, mesh_->triangle(f, points_)); },
        keep);
  }

  std::pair<double, FacetId> nearest(const Point3& p, PriorityMode mode) const {
    const auto hit = nearest(p, 1, mode, [](FacetId) { return true; });
    return hit.front();
  }

 private:
  static Aabb point_box(const Point3& c) {
    Aabb b;
    b.expand(c);
    return b;
  }

  const SurfaceMesh* mesh_;
  std::span<const Point3> points_;
  AabbTree tree_;
  AabbTree centroids_;
  std::vector<std::int32_t> leaves_;
  std::vector<std::int32_t> centroid_leaves_;
};

namespace detail {

// Fixed-shape pairwise reduction over slots; every update recomputes one
// root path, so the total is independent of update order.
template <typename Op>
class ReductionTree {
 public:
  explicit ReductionTree(std::size_t capacity) {
    while (size_ < capacity) size_ *= 2;
    nodes_.assign(2 * size_, 0.0);
  }

  void set(std::size_t i, double v) {
    std::size_t n = size_ + i;
    nodes_[n] = v;
    for (n /= 2; n >= 1; n /= 2) nodes_[n] = Op{}(nodes_[2 * n], nodes_[2 * n + 1]);
  }

  double total() const { return nodes_[1]; }

 private:
  std::size_t size_ = 1;
  std::vector<double> nodes_;
};

struct SumOp {
  double operator()(double a, double b) const { return a + b; }
};
struct MaxOp {
  double operator()(double a, double b) const { return std::max(a, b); }
};

}  // namespace detail

struct QueueEntry {
  PointId point = kNoPoint;
  FacetId facet = 0;
  Facet vertices{};
  double distance = 0.0;
};

namespace detail {

inline std::vector<QueueEntry> prioritize(std::span<const PointId> ids, const SurfaceMesh& mesh,
                                          const FacetIndex& index, std::span<const Point3> points, PriorityMode mode) {
  std::vector<QueueEntry> queue;
  queue.reserve(ids.size());
  for (PointId id : ids) {
    const auto [d, f] = index.nearest(points[id], mode);
    queue.push_back({id, f, mesh.facet(f), d});
  }
  std::sort(queue.begin(), queue.end(), [](const QueueEntry& a, const QueueEntry& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.point < b.point;
  });
  return queue;
}

}  // namespace detail

/// Nearest facet of each id under `mode`, ordered by distance then id.
inline std::vector<QueueEntry> compute_priorities(std::span<const PointId> ids, const SurfaceMesh& mesh,
                                                  const PointCloud& cloud, PriorityMode mode) {
  if (mesh.facet_count() == 0) throw Error(ErrorKind::InvalidMesh, "surface has no facets");
  const FacetIndex index(mesh, cloud.points());
  return detail::prioritize(ids, mesh, index, cloud.points(), mode);
}

// ---------------------------------------------------------------------------
// Facet split and its legality guard.

inline std::array<Facet, 3> split_facets(const Facet& f, PointId p) {
  return {Facet{f[0], f[1], p}, Facet{f[1], f[2], p}, Facet{f[2], f[0], p}};
}

namespace detail {

inline FacetId require_facet(const SurfaceMesh& mesh, const Facet& f) {
  const auto id = mesh.find(f);
  if (!id) throw Error(ErrorKind::InconsistentInput, "facet is not part of the surface");
  return *id;
}

inline void require_insertable(const SurfaceMesh& mesh, const PointCloud& cloud, const Facet& f, PointId p) {
  if (p >= cloud.size()) throw Error(ErrorKind::InconsistentInput, "point id outside the cloud");
  for (PointId v : f) {
    if (v == p || cloud[v] == cloud[p]) throw Error(ErrorKind::DuplicateVertex, "point coincides with a facet vertex");
  }
  if (mesh.has_vertex(p)) throw Error(ErrorKind::InconsistentInput, "point is already a surface vertex");
}

// Replaces facet f by its three-way split: f keeps (A,B,P), two facets are
// appended. Returns the three ids.
inline std::array<FacetId, 3> split_in_place(SurfaceMesh& mesh, FacetId f, PointId p) {
  const auto parts = split_facets(mesh.facet(f), p);
  mesh.replace(f, parts[0]);
  const FacetId n1 = mesh.add(parts[1]);
  const FacetId n2 = mesh.add(parts[2]);
  return {f, n1, n2};
}

}  // namespace detail

/// The three-facet replacement of `facet` by apex `p`; windings follow the
/// replaced facet so the result stays consistently oriented.
inline SurfaceMesh split_facet(SurfaceMesh surface, const Facet& facet, PointId p, const PointCloud& cloud) {
  const FacetId f = detail::require_facet(surface, facet);
  detail::require_insertable(surface, cloud, facet, p);
  for (const Facet& part : split_facets(facet, p)) {
    if (is_degenerate(triangle_of(part, cloud.points()))) {
      throw Error(ErrorKind::DegenerateFacet, "split would create a degenerate facet");
    }
  }
  detail::split_in_place(surface, f, p);
  return surface;
}

enum class GuardVerdict { Legal, Degenerate, WrongSide, Intersects, ExpelsPoint };

inline std::string_view to_string(GuardVerdict v) {
  switch (v) {
    case GuardVerdict::Legal: return "legal";
    case GuardVerdict::Degenerate: return "degenerate";
    case GuardVerdict::WrongSide: return "wrong-side";
    case GuardVerdict::Intersects: return "intersects";
    case GuardVerdict::ExpelsPoint: return "expels-point";
  }
  return "unknown";
}

struct GuardDecision {
  GuardVerdict verdict = GuardVerdict::Legal;
  Facet target{};                      // facet proposed for replacement
  Facet candidate{};                   // offending new facet (Intersects)
  std::optional<FacetId> offending;    // retained facet it hits (Intersects)
  Facet offending_vertices{};
  PointId expelled = kNoPoint;         // pending point left outside (ExpelsPoint)

  bool legal() const { return verdict == GuardVerdict::Legal; }
};

namespace detail {

// Legality of splitting `target` (id f) toward p:
//  - no new facet is degenerate;
//  - p lies strictly behind the facet plane, or inside the facet itself;
//  - no new facet meets a retained facet or a sibling beyond shared topology;
//  - no other pending point ends up outside the carved tetrahedron.
// `nearby(box, visit)` reports every pending point that may lie in `box`.
template <typename Nearby>
GuardDecision guard(const SurfaceMesh& mesh, const FacetIndex& index, std::span<const Point3> pts, FacetId f, PointId p,
                    Nearby&& nearby) {
  GuardDecision d;
  const Facet target = mesh.facet(f);
  d.target = target;
  const auto parts = split_facets(target, p);
  std::array<Triangle, 3> tris;
  for (int i = 0; i < 3; ++i) {
    tris[static_cast<std::size_t>(i)] = triangle_of(parts[static_cast<std::size_t>(i)], pts);
    if (is_degenerate(tris[static_cast<std::size_t>(i)])) {
      d.verdict = GuardVerdict::Degenerate;
      d.candidate = parts[static_cast<std::size_t>(i)];
      return d;
    }
  }

  const Point3 &a = pts[target[0]], &b = pts[target[1]], &c = pts[target[2]], &apex = pts[p];
  const int side = orientation(a, b, c, apex);
  if (side > 0 || (side == 0 && !point_in_triangle_2d(apex, Triangle{a, b, c}, dominant_axis(Triangle{a, b, c})))) {
    d.verdict = GuardVerdict::WrongSide;
    return d;
  }

  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (triangles_intersect(tris[i], tris[j], SharedTopology::of(parts[i], parts[j]))) {
        d.verdict = GuardVerdict::Intersects;
        d.candidate = parts[i];
        d.offending_vertices = parts[j];
        return d;
      }
    }
  }

  std::vector<FacetId> hits;
  for (std::size_t i = 0; i < 3; ++i) {
    hits.clear();
    index.tree().query(Aabb::of(tris[i]), [&](FacetId g) {
      if (g != f) hits.push_back(g);
    });
    std::sort(hits.begin(), hits.end());
    for (FacetId g : hits) {
      const Facet& other = mesh.facet(g);
      if (triangles_intersect(tris[i], triangle_of(other, pts), SharedTopology::of(parts[i], other))) {
        d.verdict = GuardVerdict::Intersects;
        d.candidate = parts[i];
        d.offending = g;
        d.offending_vertices = other;
        return d;
      }
    }
  }

  if (side < 0) {
    // Closed tetrahedron minus its three new faces must hold no pending point.
    Aabb box = Aabb::of(Triangle{a, b, c});
    box.expand(apex);
    const std::array<std::array<const Point3*, 4>, 4> faces{{{&a, &b, &c, &apex},
                                                             {&a, &b, &apex, &c},
                                                             {&b, &c, &apex, &a},
                                                             {&c, &a, &apex, &b}}};
    PointId expelled = kNoPoint;
    nearby(box, [&](PointId q) {
      if (q == p || q >= expelled || !box.contains(pts[q])) return;
      bool inside = true;
      int on_new_face = 0;
      for (std::size_t i = 0; i < 4 && inside; ++i) {
        const auto& fc = faces[i];
        const int sq = orientation(*fc[0], *fc[1], *fc[2], pts[q]);
        if (sq == 0) {
          on_new_face += i > 0;
        } else if (sq != orientation(*fc[0], *fc[1], *fc[2], *fc[3])) {
          inside = false;
        }
      }
      if (inside && on_new_face == 0) expelled = q;
    });
    if (expelled != kNoPoint) {
      d.verdict = GuardVerdict::ExpelsPoint;
      d.expelled = expelled;
    }
  }
  return d;
}

}  // namespace detail

/// Whether splitting `facet` toward `p` keeps the surface embedded and every
/// point of `pending` enclosed.
inline GuardDecision guard_insertion(const SurfaceMesh& surface, const PointCloud& cloud, const Facet& facet, PointId p,
                                     std::span<const PointId> pending = {}) {
  const FacetId f = detail::require_facet(surface, facet);
  detail::require_insertable(surface, cloud, facet, p);
  const FacetIndex index(surface, cloud.points());
  return detail::guard(surface, index, cloud.points(), f, p, [&](const Aabb&, auto&& visit) {
    for (PointId q : pending) visit(q);
  });
}

// ---------------------------------------------------------------------------

struct BlockedPoint {
  PointId point = kNoPoint;
  std::optional<GuardDecision> last;  // empty when the point was only ever skipped
};

struct PhaseTimes {
  double hull = 0.0;
  double sort = 0.0;        // first ordering of the interior points against the hull
  double prioritize = 0.0;  // all passes, including the first
  double insert = 0.0;
};

struct ContractionResult {
  SurfaceMesh mesh;
  ContractionTrace trace;
  Outcome outcome = Outcome::Complete;
  std::size_t hull_vertices = 0;
  std::size_t insertions = 0;
  std::size_t coplanar_insertions = 0;
  std::size_t passes = 0;
  std::size_t skipped = 0;
  std::size_t deferred = 0;
  std::vector<BlockedPoint> blocked;
  PhaseTimes times;
};

namespace detail {

class Contractor {
 public:
  Contractor(const PointCloud& cloud, const ContractionConfig& config)
      : cloud_(cloud),
        pts_(cloud.points()),
        config_(config),
        metric_(cloud.size()),
        hausdorff_(cloud.size()),
        volume_(2 * cloud.size()),
        area_(2 * cloud.size()) {}

  ContractionResult run() {
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    mesh_ = convex_hull(cloud_);
    result_.times.hull = seconds_since(t0);
    result_.hull_vertices = mesh_.vertex_count();
    const Aabb& box = cloud_.bounds();
    result_.trace.volume_origin = (box.lo + box.hi) * 0.5;

    index_.emplace(mesh_, pts_);
    born_.assign(mesh_.facet_count(), 0);
    owners_.resize(mesh_.facet_count());
    for (FacetId f = 0; f < mesh_.facet_count(); ++f) measure_facet(f);
    status_.assign(cloud_.size(), PointStatus::OnSurface);
    dist_.assign(cloud_.size(), 0.0);
    nearest_.assign(cloud_.size(), 0);
    reach_leaf_.assign(cloud_.size(), AabbTree::kNull);
    for (PointId i = 0; i < cloud_.size(); ++i) {
      if (mesh_.has_vertex(i)) continue;
      status_[i] = PointStatus::Pending;
      ++pending_count_;
      const auto [d, f] = index_->nearest(pts_[i], PriorityMode::TrueDistance);
      reach_leaf_[i] = reach_.insert(reach_box(i, d), i);
      set_distance(i, d, f);
    }
    record_initial();

    std::vector<GuardDecision> last_decision(cloud_.size());
    std::vector<bool> attempted(cloud_.size(), false);
    std::vector<PointId> pending;
    while (pending_count_ > 0 && result_.passes < config_.max_passes) {
      const std::size_t pass = ++result_.passes;
      pending.clear();
      for (PointId i = 0; i < cloud_.size(); ++i) {
        if (status_[i] != PointStatus::OnSurface) pending.push_back(i);
      }
      const auto tp = Clock::now();
      const auto queue = prioritize(pending, mesh_, *index_, pts_, config_.priority);
      result_.times.prioritize += seconds_since(tp);
      if (pass == 1) result_.times.sort = result_.times.prioritize;

      const auto ti = Clock::now();
      std::size_t inserted = 0;
      for (const QueueEntry& entry : queue) {
        const auto current = mesh_.find(entry.vertices);
        if (!current || born_[*current] == pass) {
          ++result_.skipped;
          record_event(StepAction::SkippedSharedFacet, entry.point, entry.vertices, pass);
          continue;
        }
        std::vector<FacetId> candidates{*current};
        GuardDecision decision;
        bool done = false;
        for (std::size_t c = 0; !done; ++c) {
          if (c == candidates.size()) {
            if (c > 1 || config_.fallback_breadth == 1) break;
            fallback_candidates(entry.point, pass, candidates);
            if (c == candidates.size()) break;
          }
          decision = guard(mesh_, *index_, pts_, candidates[c], entry.point,
                           [&](const Aabb& b, auto&& visit) { reach_.query(b, visit); });
          if (decision.legal()) {
            insert(candidates[c], entry.point, pass);
            ++inserted;
            done = true;
          }
        }
        if (!done) {
          status_[entry.point] = PointStatus::Deferred;
          last_decision[entry.point] = decision;
          attempted[entry.point] = true;
          ++result_.deferred;
          record_event(StepAction::Deferred, entry.point, decision.target, pass);
        }
      }
      result_.times.insert += seconds_since(ti);
      if (inserted == 0) break;
    }

    result_.outcome = pending_count_ == 0 ? Outcome::Complete : Outcome::Stalled;
    for (PointId q = 0; q < cloud_.size(); ++q) {
      if (status_[q] == PointStatus::OnSurface) continue;
      BlockedPoint b{q, std::nullopt};
      if (attempted[q]) b.last = last_decision[q];
      result_.blocked.push_back(b);
    }
    result_.mesh = std::move(mesh_);
    return std::move(result_);
  }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
  }

  // Cube around q with half-width d: every facet closer than d overlaps it.
  Aabb reach_box(PointId q, double d) const {
    d *= 1.0 + 1e-9;
    Aabb b;
    b.expand(pts_[q] - Point3{d, d, d});
    b.expand(pts_[q] + Point3{d, d, d});
    return b;
  }

  void set_distance(PointId q, double d, FacetId f) {
    dist_[q] = d;
    nearest_[q] = f;
    owners_[f].push_back(q);
    metric_.set(q, d * d);
    hausdorff_.set(q, d);
  }

  void measure_facet(FacetId f) {
    const Triangle t = mesh_.triangle(f, pts_);
    volume_.set(f, signed_tet_volume(result_.trace.volume_origin, t));
    area_.set(f, triangle_area(t));
  }

  // Next-nearest facets facing p, alternating between the configured ordering
  // and the true-distance ordering (which may disagree), skipping facets
  // written in this pass.
  void fallback_candidates(PointId p, std::size_t pass, std::vector<FacetId>& candidates) const {
    const std::size_t k = config_.fallback_breadth;
    const auto keep = [&](FacetId g) {
      if (born_[g] == pass) return false;
      const Facet& t = mesh_.facet(g);
      return orientation(pts_[t[0]], pts_[t[1]], pts_[t[2]], pts_[p]) <= 0;
    };
    const auto by_mode = index_->nearest(pts_[p], k, config_.priority, keep);
    const auto by_true = config_.priority == PriorityMode::TrueDistance
                             ? by_mode
                             : index_->nearest(pts_[p], k, PriorityMode::TrueDistance, keep);
    for (std::size_t i = 0; i < k && candidates.size() < k; ++i) {
      for (const auto* list : {&by_mode, &by_true}) {
        if (i >= list->size() || candidates.size() == k) continue;
        const FacetId g = (*list)[i].second;
        if (std::find(candidates.begin(), candidates.end(), g) == candidates.end()) candidates.push_back(g);
      }
    }
  }

  void insert(FacetId f, PointId p, std::size_t pass) {
    const Facet old = mesh_.facet(f);
    const Point3& o = result_.trace.volume_origin;
    const Triangle old_tri = triangle_of(old, pts_);
    const bool coplanar = orientation(old_tri.a, old_tri.b, old_tri.c, pts_[p]) == 0;

    Expansion removed = tet_determinant_exact(o, old_tri.a, old_tri.b, old_tri.c);
    const auto ids = split_in_place(mesh_, f, p);
    double added_area[3];
    for (int i = 0; i < 3; ++i) {
      const Triangle t = mesh_.triangle(ids[static_cast<std::size_t>(i)], pts_);
      removed = removed - tet_determinant_exact(o, t.a, t.b, t.c);
      added_area[i] = triangle_area(t);
    }
    const double area_terms[4] = {added_area[0], added_area[1], added_area[2], -triangle_area(old_tri)};

    index_->refresh(ids[0]);
    index_->add(ids[1]);
    index_->add(ids[2]);
    born_.resize(mesh_.facet_count(), 0);
    owners_.resize(mesh_.facet_count());
    for (FacetId id : ids) {
      born_[id] = pass;
      measure_facet(id);
    }

    status_[p] = PointStatus::OnSurface;
    --pending_count_;
    reach_.remove(reach_leaf_[p]);
    reach_leaf_[p] = AabbTree::kNull;
    dist_[p] = 0.0;
    metric_.set(p, 0.0);
    hausdorff_.set(p, 0.0);
    update_distances(ids);

    ++result_.insertions;
    result_.coplanar_insertions += coplanar;
    StepRecord r = measure();
    r.k = result_.insertions;
    r.pass = pass;
    r.point = p;
    r.facet = old;
    r.action = StepAction::Inserted;
    r.coplanar = coplanar;
    r.volume_delta = removed.estimate() / 6.0;
    r.area_delta = exact_sum(area_terms);
    result_.trace.steps.push_back(r);
    if (config_.verbosity == TraceVerbosity::Snapshots) result_.trace.snapshots.push_back(mesh_.facets());
  }

  // Distances to the surface never grow for enclosed points: the removed
  // facet now lies outside the surface. Points that had it as nearest are
  // re-queried; any other point can only get closer to a new facet, which
  // then overlaps its reach box.
  void update_distances(const std::array<FacetId, 3>& ids) {
    std::vector<PointId> orphans;
    orphans.swap(owners_[ids[0]]);
    std::sort(orphans.begin(), orphans.end());
    orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());
    for (PointId q : orphans) {
      if (status_[q] == PointStatus::OnSurface || nearest_[q] != ids[0]) continue;
      const auto [d, g] = index_->nearest(pts_[q], PriorityMode::TrueDistance);
      set_distance(q, std::min(d, dist_[q]), g);
      reach_.update(reach_leaf_[q], reach_box(q, dist_[q]), q);
    }

    std::array<Triangle, 3> tris;
    Aabb box;
    for (std::size_t i = 0; i < 3; ++i) {
      tris[i] = mesh_.triangle(ids[i], pts_);
      box = Aabb::merge(box, Aabb::of(tris[i]));
    }
    std::vector<PointId> near;
    reach_.query(box, [&](PointId q) { near.push_back(q); });
    std::sort(near.begin(), near.end());
    for (PointId q : near) {
      double best = dist_[q];
      FacetId arg = nearest_[q];
      for (std::size_t i = 0; i < 3; ++i) {
        const double d = point_triangle_distance_unchecked(pts_[q], tris[i]);
        if (d < best || (d == best && ids[i] < arg)) best = d, arg = ids[i];
      }
      if (arg == nearest_[q]) continue;
      set_distance(q, best, arg);
      reach_.update(reach_leaf_[q], reach_box(q, best), q);
    }
  }

  StepRecord measure() const {
    StepRecord r;
    r.metric = metric_.total();
    r.hausdorff = hausdorff_.total();
    r.volume = volume_.total();
    r.area = area_.total();
    return r;
  }

  void record_initial() {
    StepRecord r = measure();
    r.action = StepAction::Initial;
    result_.trace.steps.push_back(r);
    if (config_.verbosity == TraceVerbosity::Snapshots) result_.trace.snapshots.push_back(mesh_.facets());
  }

  void record_event(StepAction action, PointId p, const Facet& facet, std::size_t pass) {
    StepRecord r = result_.trace.steps.back();
    r.pass = pass;
    r.point = p;
    r.facet = facet;
    r.action = action;
    r.coplanar = false;
    r.volume_delta = 0.0;
    r.area_delta = 0.0;
    result_.trace.steps.push_back(r);
  }

  const PointCloud& cloud_;
  std::span<const Point3> pts_;
  ContractionConfig config_;
  SurfaceMesh mesh_;
  std::optional<FacetIndex> index_;
  std::vector<PointStatus> status_;
  std::size_t pending_count_ = 0;
  std::vector<double> dist_;                  // true distance to the surface, pending points
  std::vector<FacetId> nearest_;
  std::vector<std::vector<PointId>> owners_;  // facet -> points that had it as nearest (may be stale)
  std::vector<std::size_t> born_;             // pass in which each facet slot was last written
  AabbTree reach_;                            // pending points, boxed by their current distance
  std::vector<std::int32_t> reach_leaf_;
  ReductionTree<SumOp> metric_;
  ReductionTree<MaxOp> hausdorff_;
  ReductionTree<SumOp> volume_;
  ReductionTree<SumOp> area_;
  ContractionResult result_;
};

}  // namespace detail

/// Contracts the convex hull of `cloud` onto every cloud point, one facet
/// split per inserted point.
inline ContractionResult contract(const PointCloud& cloud, const ContractionConfig& config = {}) {
  config.check();
  return detail::Contractor(cloud, config).run();
}

}  // namespace hullwrap
