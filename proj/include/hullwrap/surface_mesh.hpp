#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hullwrap/geom_core.hpp"
#include "hullwrap/point_cloud.hpp"

namespace hullwrap {

using Facet = std::array<PointId, 3>;
using FacetId = std::uint32_t;

inline std::uint64_t edge_key(PointId from, PointId to) {
  return (static_cast<std::uint64_t>(from) << 32) | static_cast<std::uint64_t>(to);
}

/// Same cyclic sequence of vertices, ignoring where it starts.
inline bool same_winding(const Facet& f, const Facet& g) {
  for (int r = 0; r < 3; ++r) {
    if (f[0] == g[r] && f[1] == g[(r + 1) % 3] && f[2] == g[(r + 2) % 3]) return true;
  }
  return false;
}

inline Triangle triangle_of(const Facet& f, std::span<const Point3> points) {
  return {points[f[0]], points[f[1]], points[f[2]]};
}

/// Indexed triangle mesh over cloud point ids with a directed-edge map
/// (edge -> the facet traversing it). Any facet list is accepted; repeated
/// directed edges are counted as conflicts and only the first is indexed.
class SurfaceMesh {
 public:
  SurfaceMesh() = default;

  explicit SurfaceMesh(std::vector<Facet> facets) : facets_(std::move(facets)) {
    for (FacetId f = 0; f < facets_.size(); ++f) link(f);
  }

  const std::vector<Facet>& facets() const { return facets_; }
  std::size_t facet_count() const { return facets_.size(); }
  const Facet& facet(FacetId f) const { return facets_[f]; }

  std::size_t vertex_count() const { return vertex_count_; }
  bool has_vertex(PointId v) const { return v < vertex_uses_.size() && vertex_uses_[v] > 0; }

  std::vector<PointId> vertices() const {
    std::vector<PointId> out;
    out.reserve(vertex_count_);
    for (PointId v = 0; v < vertex_uses_.size(); ++v) {
      if (vertex_uses_[v] > 0) out.push_back(v);
    }
    return out;
  }

  std::size_t edge_conflicts() const { return conflicts_; }

  /// Facet traversing the directed edge (from, to), if any.
  std::optional<FacetId> facet_with_edge(PointId from, PointId to) const {
    const auto it = edges_.find(edge_key(from, to));
    if (it == edges_.end()) return std::nullopt;
    return it->second;
  }

  /// Facet across edge k (vertex k to vertex k+1) of facet f.
  std::optional<FacetId> neighbor(FacetId f, int k) const {
    const Facet& t = facets_[f];
    return facet_with_edge(t[static_cast<std::size_t>((k + 1) % 3)], t[static_cast<std::size_t>(k)]);
  }

  /// Id of the facet with this vertex cycle (any rotation).
  std::optional<FacetId> find(const Facet& f) const {
    const auto g = facet_with_edge(f[0], f[1]);
    if (g && same_winding(facets_[*g], f)) return g;
    return std::nullopt;
  }

  Triangle triangle(FacetId f, std::span<const Point3> points) const { return triangle_of(facets_[f], points); }

  void replace(FacetId f, const Facet& facet) {
    unlink(f);
    facets_[f] = facet;
    link(f);
  }

  FacetId add(const Facet& facet) {
    facets_.push_back(facet);
    const auto f = static_cast<FacetId>(facets_.size() - 1);
    link(f);
    return f;
  }

 private:
  void link(FacetId f) {
    const Facet& t = facets_[f];
    for (int k = 0; k < 3; ++k) {
      const auto [it, inserted] = edges_.try_emplace(edge_key(t[k], t[(k + 1) % 3]), f);
      if (!inserted) ++conflicts_;
      const PointId v = t[k];
      if (v >= vertex_uses_.size()) vertex_uses_.resize(static_cast<std::size_t>(v) + 1, 0);
      if (vertex_uses_[v]++ == 0) ++vertex_count_;
    }
  }

  void unlink(FacetId f) {
    const Facet& t = facets_[f];
    for (int k = 0; k < 3; ++k) {
      const auto it = edges_.find(edge_key(t[k], t[(k + 1) % 3]));
      if (it != edges_.end() && it->second == f) {
        edges_.erase(it);
      } else if (conflicts_ > 0) {
        --conflicts_;
      }
      if (--vertex_uses_[t[k]] == 0) --vertex_count_;
    }
  }

  std::vector<Facet> facets_;
  std::unordered_map<std::uint64_t, FacetId> edges_;
  std::vector<std::uint32_t> vertex_uses_;
  std::size_t vertex_count_ = 0;
  std::size_t conflicts_ = 0;
};

}  // namespace hullwrap
