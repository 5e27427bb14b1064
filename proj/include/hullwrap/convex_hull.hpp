#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hullwrap/error.hpp"
#include "hullwrap/geom_core.hpp"
#include "hullwrap/point_cloud.hpp"
#include "hullwrap/surface_mesh.hpp"

namespace hullwrap {

namespace detail {

// Incremental hull with conflict lists. Every visibility decision uses the
// exact orientation sign; points on a face plane never see that face.
class HullBuilder {
 public:
  explicit HullBuilder(std::span<const Point3> points) : pts_(points) {}

  std::vector<Facet> build() {
    seed_simplex();
    while (!work_.empty()) {
      const int f = work_.back();
      work_.pop_back();
      if (!faces_[static_cast<std::size_t>(f)].alive || faces_[static_cast<std::size_t>(f)].outside.empty()) continue;
      add_point(f);
    }
    return canonical_facets();
  }

 private:
  struct Face {
    Facet v;
    std::vector<PointId> outside;
    bool alive = true;
  };

  Face& face(int f) { return faces_[static_cast<std::size_t>(f)]; }

  int sees(int f, PointId p) const {
    const Facet& v = faces_[static_cast<std::size_t>(f)].v;
    return orientation(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[p]);
  }

  double height(int f, PointId p) const {
    const Facet& v = faces_[static_cast<std::size_t>(f)].v;
    const Point3& a = pts_[v[0]];
    return dot(pts_[p] - a, cross(pts_[v[1]] - a, pts_[v[2]] - a));
  }

  int make_face(PointId a, PointId b, PointId c) {
    faces_.push_back({{a, b, c}, {}, true});
    const int f = static_cast<int>(faces_.size() - 1);
    edges_[edge_key(a, b)] = f;
    edges_[edge_key(b, c)] = f;
    edges_[edge_key(c, a)] = f;
    return f;
  }

  void kill_face(int f) {
    Face& fc = face(f);
    fc.alive = false;
    for (int k = 0; k < 3; ++k) {
      const auto it = edges_.find(edge_key(fc.v[k], fc.v[(k + 1) % 3]));
      if (it != edges_.end() && it->second == f) edges_.erase(it);
    }
  }

  void seed_simplex() {
    const auto n = static_cast<PointId>(pts_.size());
    if (n < 4) throw Error(ErrorKind::DimensionalDeficiency, "convex hull needs at least 4 points, got " + std::to_string(n));

    PointId i0 = 0;
    for (PointId i = 1; i < n; ++i) {
      const Point3 &p = pts_[i], &q = pts_[i0];
      if (std::tie(p.x, p.y, p.z) < std::tie(q.x, q.y, q.z)) i0 = i;
    }
    PointId i1 = i0;
    double best = -1.0;
    for (PointId i = 0; i < n; ++i) {
      const double d = squared_norm(pts_[i] - pts_[i0]);
      if (d > best) best = d, i1 = i;
    }
    if (i1 == i0 || !(best > 0.0)) throw Error(ErrorKind::DimensionalDeficiency, "all points coincide");

    const auto pick = [&](auto&& score, auto&& valid) {
      PointId choice = n;
      double top = -1.0;
      for (PointId i = 0; i < n; ++i) {
        const double s = score(i);
        if (s > top) top = s, choice = i;
      }
      if (choice < n && valid(choice)) return choice;
      for (PointId i = 0; i < n; ++i) {
        if (valid(i)) return i;
      }
      return n;
    };
    const Point3 axis = pts_[i1] - pts_[i0];
    const PointId i2 = pick([&](PointId i) { return squared_norm(cross(axis, pts_[i] - pts_[i0])); },
                            [&](PointId i) { return !collinear(pts_[i0], pts_[i1], pts_[i]); });
    if (i2 == n) throw Error(ErrorKind::DimensionalDeficiency, "all points are collinear");
    const PointId i3 = pick(
        [&](PointId i) { return std::abs(dot(pts_[i] - pts_[i0], cross(axis, pts_[i2] - pts_[i0]))); },
        [&](PointId i) { return orientation(pts_[i0], pts_[i1], pts_[i2], pts_[i]) != 0; });
    if (i3 == n) throw Error(ErrorKind::DimensionalDeficiency, "all points are coplanar");

    PointId a = i0, b = i1, c = i2;
    const PointId d = i3;
    if (orientation(pts_[a], pts_[b], pts_[c], pts_[d]) > 0) std::swap(b, c);
    make_face(a, b, c);
    make_face(a, d, b);
    make_face(b, d, c);
    make_face(c, d, a);

    std::vector<PointId> rest;
    for (PointId i = 0; i < n; ++i) {
      if (i != a && i != b && i != c && i != d) rest.push_back(i);
    }
    assign(rest, 0);
  }

  // Hands each point to the first face created at or after `first_new` that
  // it sees, falling back to any live face; otherwise the point is enclosed.
  void assign(const std::vector<PointId>& points, int first_new) {
    const int total = static_cast<int>(faces_.size());
    std::vector<bool> touched(faces_.size(), false);
    for (PointId p : points) {
      int target = -1;
      for (int f = first_new; f < total && target < 0; ++f) {
        if (face(f).alive && sees(f, p) > 0) target = f;
      }
      for (int f = 0; f < first_new && target < 0; ++f) {
        if (face(f).alive && sees(f, p) > 0) target = f;
      }
      if (target < 0) continue;
      face(target).outside.push_back(p);
      touched[static_cast<std::size_t>(target)] = true;
    }
    for (int f = total - 1; f >= 0; --f) {
      if (touched[static_cast<std::size_t>(f)]) work_.push_back(f);
    }
  }

  void add_point(int start) {
    PointId eye = face(start).outside.front();
    double top = height(start, eye);
    for (PointId p : face(start).outside) {
      const double h = height(start, p);
      if (h > top || (h == top && p < eye)) top = h, eye = p;
    }

    std::vector<int> visible{start};
    std::vector<bool> is_visible(faces_.size(), false);
    is_visible[static_cast<std::size_t>(start)] = true;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const Facet v = face(visible[q]).v;
      for (int k = 0; k < 3; ++k) {
        const int g = edges_.at(edge_key(v[(k + 1) % 3], v[k]));
        if (is_visible[static_cast<std::size_t>(g)]) continue;
        if (sees(g, eye) > 0) {
          is_visible[static_cast<std::size_t>(g)] = true;
          visible.push_back(g);
        }
      }
    }

    std::vector<std::array<PointId, 2>> horizon;
    for (int f : visible) {
      const Facet v = face(f).v;
      for (int k = 0; k < 3; ++k) {
        const int g = edges_.at(edge_key(v[(k + 1) % 3], v[k]));
        if (!is_visible[static_cast<std::size_t>(g)]) horizon.push_back({v[k], v[(k + 1) % 3]});
      }
    }

    std::vector<PointId> orphans;
    for (int f : visible) {
      for (PointId p : face(f).outside) {
        if (p != eye) orphans.push_back(p);
      }
      face(f).outside.clear();
      kill_face(f);
    }
    std::sort(orphans.begin(), orphans.end());

    const int first_new = static_cast<int>(faces_.size());
    for (const auto& e : horizon) make_face(e[0], e[1], eye);
    assign(orphans, first_new);
  }

  // Merges coplanar neighbours into convex polygons, drops vertices that are
  // not strict corners, and fans each polygon from its lowest-index corner.
  std::vector<Facet> canonical_facets() const {
    std::vector<int> live;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      if (faces_[static_cast<std::size_t>(f)].alive) live.push_back(f);
    }
    std::vector<int> parent(faces_.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto root = [&](int f) {
      while (parent[static_cast<std::size_t>(f)] != f) {
        parent[static_cast<std::size_t>(f)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(f)])];
        f = parent[static_cast<std::size_t>(f)];
      }
      return f;
    };
    const auto across = [&](int f, int k) {
      const Facet& v = faces_[static_cast<std::size_t>(f)].v;
      return edges_.at(edge_key(v[(k + 1) % 3], v[k]));
    };
    for (int f : live) {
      const Facet& v = faces_[static_cast<std::size_t>(f)].v;
      for (int k = 0; k < 3; ++k) {
        const int g = across(f, k);
        const Facet& w = faces_[static_cast<std::size_t>(g)].v;
        PointId apex = w[0];
        for (PointId x : w) {
          if (x != v[k] && x != v[(k + 1) % 3]) apex = x;
        }
        if (orientation(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[apex]) == 0) {
          parent[static_cast<std::size_t>(root(f))] = root(g);
        }
      }
    }

    std::unordered_map<int, std::vector<int>> groups;
    std::vector<int> group_order;
    for (int f : live) {
      auto [it, inserted] = groups.try_emplace(root(f));
      if (inserted) group_order.push_back(root(f));
      it->second.push_back(f);
    }

    std::vector<Facet> out;
    for (int g : group_order) {
      const auto& members = groups.at(g);
      if (members.size() == 1) {
        Facet v = faces_[static_cast<std::size_t>(members[0])].v;
        std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
        out.push_back(v);
        continue;
      }
      std::unordered_map<PointId, PointId> next;
      for (int f : members) {
        const Facet& v = faces_[static_cast<std::size_t>(f)].v;
        for (int k = 0; k < 3; ++k) {
          if (root(across(f, k)) != g) next[v[k]] = v[(k + 1) % 3];
        }
      }
      PointId start = next.begin()->first;
      for (const auto& [from, to] : next) start = std::min(start, from);
      std::vector<PointId> ring{start};
      for (PointId cur = next.at(start); cur != start; cur = next.at(cur)) ring.push_back(cur);

      std::vector<PointId> corners;
      const std::size_t m = ring.size();
      for (std::size_t i = 0; i < m; ++i) {
        const PointId prev = ring[(i + m - 1) % m], cur = ring[i], nxt = ring[(i + 1) % m];
        if (!collinear(pts_[prev], pts_[cur], pts_[nxt])) corners.push_back(cur);
      }
      std::rotate(corners.begin(), std::min_element(corners.begin(), corners.end()), corners.end());
      for (std::size_t i = 1; i + 1 < corners.size(); ++i) out.push_back({corners[0], corners[i], corners[i + 1]});
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::span<const Point3> pts_;
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, int> edges_;
  std::vector<int> work_;
};

}  // namespace detail

/// Closed, outward-oriented triangulation of the convex hull boundary. Only
/// strictly extreme points become vertices.
inline SurfaceMesh convex_hull(const PointCloud& cloud) {
  return SurfaceMesh(detail::HullBuilder(cloud.points()).build());
}

struct PointPartition {
  std::vector<PointId> on_surface;
  std::vector<PointId> interior;
};

/// Splits cloud ids by mesh membership (exact, id-based).
inline PointPartition classify_points(const PointCloud& cloud, const SurfaceMesh& mesh) {
  for (const Facet& f : mesh.facets()) {
    for (PointId v : f) {
      if (v >= cloud.size()) {
        throw Error(ErrorKind::InconsistentInput,
                    "mesh references point " + std::to_string(v) + " outside a cloud of " + std::to_string(cloud.size()));
      }
    }
  }
  PointPartition part;
  for (PointId i = 0; i < cloud.size(); ++i) {
    (mesh.has_vertex(i) ? part.on_surface : part.interior).push_back(i);
  }
  return part;
}

}  // namespace hullwrap
