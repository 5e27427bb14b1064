#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hullwrap/contraction.hpp"
#include "hullwrap/convex_hull.hpp"
#include "hullwrap/generators.hpp"
#include "hullwrap/validation.hpp"
#include "support/fixtures.hpp"

namespace hw = hullwrap;
using fixtures::cloud_of;

namespace {

hw::PointCloud scaled_tetra_with(std::vector<hw::Point3> extra) {
  std::vector<hw::Point3> v{{0, 0, 0}, {3, 0, 0}, {0, 3, 0}, {0, 0, 3}};
  v.insert(v.end(), extra.begin(), extra.end());
  return cloud_of(v);
}

// Cube [0,4]^3 with a deep dent from the top toward (2.5,1.5,0.5) and a point
// whose nearest facet by centroid distance would be split straight through it.
struct DeepDent {
  hw::PointCloud cloud;
  hw::SurfaceMesh dented;
};

DeepDent deep_dent() {
  std::vector<hw::Point3> v;
  for (int i = 0; i < 8; ++i) v.push_back({4.0 * (i & 1), 4.0 * ((i >> 1) & 1), 4.0 * ((i >> 2) & 1)});
  v.push_back({2.5, 1.5, 0.5});   // 8
  v.push_back({1.0, 0.75, 2.5});  // 9
  v.push_back({1.0, 3.0, 3.0});   // 10
  v.push_back({1.0, 1.0, 3.5});   // 11
  DeepDent d{cloud_of(v), {}};
  d.dented = hw::split_facet(hw::convex_hull(d.cloud), {4, 5, 7}, 8, d.cloud);
  return d;
}

std::vector<hw::QueueEntry> brute_priorities(const std::vector<hw::PointId>& ids, const hw::SurfaceMesh& mesh,
                                             const hw::PointCloud& cloud, hw::PriorityMode mode) {
  std::vector<hw::QueueEntry> out;
  for (hw::PointId id : ids) {
    hw::QueueEntry e{id, 0, {}, std::numeric_limits<double>::infinity()};
    for (hw::FacetId f = 0; f < mesh.facet_count(); ++f) {
      const auto& t = mesh.facet(f);
      const hw::Point3 &a = cloud[t[0]], &b = cloud[t[1]], &c = cloud[t[2]];
      const double d = mode == hw::PriorityMode::Centroid ? fixtures::centroid_dist(cloud[id], a, b, c)
                                                          : fixtures::tri_dist(cloud[id], a, b, c);
      if (d < e.distance) e = {id, f, t, d};
    }
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.distance != y.distance ? x.distance < y.distance : x.point < y.point;
  });
  return out;
}

}  // namespace

TEST(Priorities, SingleAndOrderedPoints) {
  const auto cloud = scaled_tetra_with({{0.1, 1, 1}, {1, 1, 0.2}});
  const auto hull = hw::convex_hull(cloud);
  const auto one = hw::compute_priorities(std::vector<hw::PointId>{4}, hull, cloud, hw::PriorityMode::TrueDistance);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0].distance, 0.1, 1e-15);
  EXPECT_EQ(hw::orientation(cloud[one[0].vertices[0]], cloud[one[0].vertices[1]], cloud[one[0].vertices[2]], {-1, 0, 0}),
            1);  // the x = 0 face
  const auto two = hw::compute_priorities(std::vector<hw::PointId>{5, 4}, hull, cloud, hw::PriorityMode::TrueDistance);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].point, 4u);
  EXPECT_EQ(two[1].point, 5u);
  EXPECT_NEAR(two[1].distance, 0.2, 1e-15);
}

TEST(Priorities, MatchBruteForceInBothModes) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<hw::Point3> v;
    for (int i = 0; i < 8; ++i) v.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
    for (int i = 0; i < 3; ++i) v.push_back({u(rng), u(rng), u(rng)});
    const auto cloud = cloud_of(v);
    const auto hull = hw::convex_hull(cloud);
    const std::vector<hw::PointId> ids{8, 9, 10};
    for (auto mode : {hw::PriorityMode::Centroid, hw::PriorityMode::TrueDistance}) {
      const auto got = hw::compute_priorities(ids, hull, cloud, mode);
      const auto want = brute_priorities(ids, hull, cloud, mode);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].point, want[i].point) << "trial " << trial << " mode " << hw::to_string(mode);
        EXPECT_NEAR(got[i].distance, want[i].distance, 1e-12);
        EXPECT_EQ(got[i].vertices, hull.facet(got[i].facet));
      }
    }
  }
}

TEST(SplitFacet, TetrahedronInteriorPoint) {
  const auto cloud = cloud_of({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.25, 0.25, 0.25}});
  const auto hull = hw::convex_hull(cloud);
  hw::Facet facet{};
  for (const auto& f : hull.facets()) {
    if (std::find(f.begin(), f.end(), 0u) == f.end()) facet = f;  // ((1,0,0),(0,1,0),(0,0,1))
  }
  const double before = fixtures::mesh_volume(hull.facets(), cloud.points());
  const auto split = hw::split_facet(hull, facet, 4, cloud);
  EXPECT_EQ(split.vertex_count(), 5u);
  EXPECT_EQ(split.facet_count(), 6u);
  const double tet = std::abs(fixtures::det6(cloud[facet[0]], cloud[facet[1]], cloud[facet[2]], cloud[4]));
  EXPECT_NEAR(fixtures::mesh_volume(split.facets(), cloud.points()), before - tet, 1e-15);
  EXPECT_NEAR(before - tet, 1.0 / 6.0 - 1.0 / 24.0, 1e-15);
  const auto m = hw::is_closed_manifold(split);
  EXPECT_TRUE(m.ok());
  EXPECT_EQ(m.euler, 2);
  EXPECT_EQ(m.edges, 9u);
  // windings inherited: directed edges of the old facet survive
  for (int k = 0; k < 3; ++k) {
    EXPECT_TRUE(split.facet_with_edge(facet[static_cast<std::size_t>(k)], facet[static_cast<std::size_t>((k + 1) % 3)]));
  }
}

TEST(SplitFacet, CoplanarCentroidKeepsVolumeAndArea) {
  const auto cloud = scaled_tetra_with({{1, 1, 1}});
  const auto hull = hw::convex_hull(cloud);
  const auto facet = *std::find_if(hull.facets().begin(), hull.facets().end(), [](const hw::Facet& f) {
    return std::find(f.begin(), f.end(), 0u) == f.end();
  });
  ASSERT_EQ(hw::orientation(cloud[facet[0]], cloud[facet[1]], cloud[facet[2]], cloud[4]), 0);
  const auto split = hw::split_facet(hull, facet, 4, cloud);
  EXPECT_DOUBLE_EQ(fixtures::mesh_volume(split.facets(), cloud.points()),
                   fixtures::mesh_volume(hull.facets(), cloud.points()));
  EXPECT_NEAR(fixtures::mesh_area(split.facets(), cloud.points()), fixtures::mesh_area(hull.facets(), cloud.points()),
              1e-12);
  EXPECT_TRUE(hw::is_closed_manifold(split).ok());
}

TEST(SplitFacet, Errors) {
  const auto cloud = scaled_tetra_with({{1, 1, 1}, {1.5, 1.5, 0}, {0.5, 0.5, 0.5}});
  const auto hull = hw::convex_hull(cloud);
  const hw::Facet bottom = *std::find_if(hull.facets().begin(), hull.facets().end(), [](const hw::Facet& f) {
    return std::find(f.begin(), f.end(), 3u) == f.end();
  });
  const auto kind_of = [&](const hw::Facet& f, hw::PointId p) {
    try {
      hw::split_facet(hull, f, p, cloud);
    } catch (const hw::Error& e) {
      return e.kind();
    }
    return hw::ErrorKind::Config;  // sentinel: no error
  };
  EXPECT_EQ(kind_of(bottom, 1), hw::ErrorKind::DuplicateVertex);
  EXPECT_EQ(kind_of(bottom, 5), hw::ErrorKind::DegenerateFacet);  // midpoint of edge (1,2)
  EXPECT_EQ(kind_of({bottom[0], bottom[2], bottom[1]}, 6), hw::ErrorKind::InconsistentInput);  // reversed
  EXPECT_EQ(kind_of(bottom, 6), hw::ErrorKind::Config);
}

TEST(Guard, ConvexPositionIsLegal) {
  const auto cloud = cloud_of(hw::generate_points({"ball-uniform", 60, 4}));
  const auto hull = hw::convex_hull(cloud);
  const auto part = hw::classify_points(cloud, hull);
  for (hw::PointId p : part.interior) {
    const auto e = hw::compute_priorities(std::vector<hw::PointId>{p}, hull, cloud, hw::PriorityMode::TrueDistance);
    EXPECT_TRUE(hw::guard_insertion(hull, cloud, e[0].vertices, p).legal()) << "point " << p;
  }
}

TEST(Guard, CoplanarOverlapWithNeighbourIsIllegal) {
  // (1,1,0) is the centroid of the bottom face; splitting the slanted face
  // toward it lays a new facet flat over the bottom face.
  const auto cloud = scaled_tetra_with({{1, 1, 0}});
  const auto hull = hw::convex_hull(cloud);
  const auto slanted = *std::find_if(hull.facets().begin(), hull.facets().end(), [](const hw::Facet& f) {
    return std::find(f.begin(), f.end(), 0u) == f.end();
  });
  const auto d = hw::guard_insertion(hull, cloud, slanted, 4);
  EXPECT_EQ(d.verdict, hw::GuardVerdict::Intersects);
  ASSERT_TRUE(d.offending.has_value());
  for (hw::PointId v : d.offending_vertices) EXPECT_EQ(cloud[v].z, 0.0);
}

TEST(Guard, DeepDentIsIllegalWithWitness) {
  const DeepDent d = deep_dent();
  ASSERT_TRUE(hw::containment_check(d.cloud, d.dented));
  const auto nearest = hw::compute_priorities(std::vector<hw::PointId>{9}, d.dented, d.cloud, hw::PriorityMode::Centroid);
  const auto g = hw::guard_insertion(d.dented, d.cloud, nearest[0].vertices, 9);
  ASSERT_EQ(g.verdict, hw::GuardVerdict::Intersects);
  ASSERT_TRUE(g.offending.has_value());
  EXPECT_EQ(d.dented.facet(*g.offending), g.offending_vertices);
  EXPECT_NE(std::find(g.offending_vertices.begin(), g.offending_vertices.end(), 8u), g.offending_vertices.end());
  // exhaustive check of the witness pair with rational arithmetic
  const auto tri = [&](const hw::Facet& f) { return hw::triangle_of(f, d.cloud.points()); };
  EXPECT_TRUE(oracle::forbidden_contact(oracle::to_q(tri(g.candidate)), oracle::to_q(tri(g.offending_vertices)),
                                        hw::SharedTopology::of(g.candidate, g.offending_vertices)));
  // applying it anyway really does self-intersect
  const auto forced = hw::split_facet(d.dented, nearest[0].vertices, 9, d.cloud);
  EXPECT_FALSE(hw::self_intersection_free_exhaustive(forced, d.cloud).free);
}

TEST(Guard, ExpelledPendingPointIsReported) {
  // point 5 sits inside the tetrahedron carved by splitting the slanted face toward 4
  const auto cloud = scaled_tetra_with({{0.2, 0.2, 0.2}, {0.9, 0.9, 0.9}, {0.3, 0.3, 0.1}});
  const auto hull = hw::convex_hull(cloud);
  const auto slanted = *std::find_if(hull.facets().begin(), hull.facets().end(), [](const hw::Facet& f) {
    return std::find(f.begin(), f.end(), 0u) == f.end();
  });
  const std::vector<hw::PointId> pending{6, 5};
  const auto g = hw::guard_insertion(hull, cloud, slanted, 4, pending);
  EXPECT_EQ(g.verdict, hw::GuardVerdict::ExpelsPoint);
  EXPECT_EQ(g.expelled, 5u);
  EXPECT_TRUE(hw::guard_insertion(hull, cloud, slanted, 4, std::vector<hw::PointId>{6}).legal());
  EXPECT_TRUE(hw::guard_insertion(hull, cloud, slanted, 4).legal());
}

TEST(Contract, TetrahedronNeedsNothing) {
  const auto cloud = fixtures::tetra_cloud();
  const auto r = hw::contract(cloud);
  EXPECT_EQ(r.outcome, hw::Outcome::Complete);
  EXPECT_EQ(r.insertions, 0u);
  EXPECT_EQ(r.mesh.facets(), hw::convex_hull(cloud).facets());
  ASSERT_EQ(r.trace.steps.size(), 1u);
  EXPECT_EQ(r.trace.steps[0].action, hw::StepAction::Initial);
}

TEST(Contract, CubeWithCentroid) {
  const auto cloud = fixtures::cube_centroid_cloud();
  for (auto mode : {hw::PriorityMode::Centroid, hw::PriorityMode::TrueDistance}) {
    hw::ContractionConfig config;
    config.priority = mode;
    const auto r = hw::contract(cloud, config);
    EXPECT_EQ(r.outcome, hw::Outcome::Complete);
    EXPECT_EQ(r.insertions, 1u);
    EXPECT_EQ(r.hull_vertices, 8u);
    EXPECT_EQ(r.mesh.vertex_count(), 9u);
    EXPECT_EQ(r.mesh.facet_count(), 14u);
    const auto report = hw::validate(r.mesh, cloud, &r.trace);
    EXPECT_TRUE(report.passed()) << report.to_key_values();
    EXPECT_NEAR(report.volume, 1.0 - 1.0 / 12.0, 1e-15);  // a half-unit-high pyramid over a half face
    EXPECT_NEAR(r.trace.steps[0].hausdorff, 0.5, 1e-15);
  }
}

TEST(Contract, SphereShellNeedsNoInsertions) {
  const auto cloud = cloud_of(hw::generate_points({"sphere-shell", 50, 7}));
  const auto r = hw::contract(cloud);
  EXPECT_EQ(r.outcome, hw::Outcome::Complete);
  EXPECT_EQ(r.hull_vertices, 50u);
  EXPECT_EQ(r.insertions, 0u);
}

TEST(Contract, FiveHundredPointBall) {
  const auto cloud = cloud_of(hw::generate_points({"ball-uniform", 500, 7}));
  const auto r = hw::contract(cloud);
  ASSERT_EQ(r.outcome, hw::Outcome::Complete);
  EXPECT_EQ(r.insertions, cloud.size() - r.hull_vertices);
  EXPECT_EQ(r.trace.insertion_count(), r.insertions);
  const auto report = hw::validate(r.mesh, cloud, &r.trace);
  EXPECT_TRUE(report.passed()) << report.to_key_values();
  EXPECT_EQ(report.euler, 2);
  EXPECT_EQ(report.metric, 0.0);
}

TEST(Contract, EverySnapshotIsAnEmbeddedEnclosingSurface) {
  hw::ContractionConfig config;
  config.verbosity = hw::TraceVerbosity::Snapshots;
  const auto cloud = cloud_of(hw::generate_points({"ball-uniform", 120, 3}));
  const auto r = hw::contract(cloud, config);
  ASSERT_EQ(r.outcome, hw::Outcome::Complete);
  ASSERT_EQ(r.trace.snapshots.size(), r.insertions + 1);
  double volume = std::numeric_limits<double>::infinity();
  std::size_t on_surface = 0;
  for (const auto& facets : r.trace.snapshots) {
    const hw::SurfaceMesh mesh(facets);
    const auto m = hw::is_closed_manifold(mesh);
    ASSERT_TRUE(m.ok());
    EXPECT_EQ(m.euler, 2);
    ASSERT_TRUE(hw::self_intersection_free(mesh, cloud).free);
    EXPECT_TRUE(hw::containment_check(cloud, mesh));
    const double v = fixtures::mesh_volume(facets, cloud.points());
    EXPECT_LT(v, volume);
    volume = v;
    EXPECT_EQ(mesh.vertex_count(), r.hull_vertices + on_surface);
    ++on_surface;
  }
  EXPECT_LE(volume, fixtures::mesh_volume(hw::convex_hull(cloud).facets(), cloud.points()));
}

TEST(Contract, DeepDentCloudStillCompletes) {
  const DeepDent d = deep_dent();
  const auto r = hw::contract(d.cloud);
  EXPECT_EQ(r.outcome, hw::Outcome::Complete);
  EXPECT_TRUE(hw::validate(r.mesh, d.cloud, &r.trace).passed());
}

TEST(Contract, Deterministic) {
  const auto cloud = cloud_of(hw::generate_points({"two-lobes", 300, 5}));
  const auto a = hw::contract(cloud);
  const auto b = hw::contract(cloud);
  EXPECT_EQ(a.mesh.facets(), b.mesh.facets());
  ASSERT_EQ(a.trace.steps.size(), b.trace.steps.size());
  for (std::size_t i = 0; i < a.trace.steps.size(); ++i) {
    const auto &x = a.trace.steps[i], &y = b.trace.steps[i];
    EXPECT_EQ(x.point, y.point);
    EXPECT_EQ(x.facet, y.facet);
    EXPECT_EQ(x.action, y.action);
    EXPECT_EQ(x.metric, y.metric);
    EXPECT_EQ(x.volume, y.volume);
    EXPECT_EQ(x.area, y.area);
  }
}

TEST(Contract, TraceAccountsForEveryEvent) {
  const auto cloud = cloud_of(hw::generate_points({"gaussian-blob", 400, 2}));
  const auto r = hw::contract(cloud);
  std::size_t inserted = 0, skipped = 0, deferred = 0;
  for (const auto& s : r.trace.steps) {
    inserted += s.action == hw::StepAction::Inserted;
    skipped += s.action == hw::StepAction::SkippedSharedFacet;
    deferred += s.action == hw::StepAction::Deferred;
    EXPECT_TRUE(std::isfinite(s.metric) && s.metric >= 0);
    EXPECT_TRUE(std::isfinite(s.volume) && s.volume >= 0);
    EXPECT_TRUE(std::isfinite(s.area) && s.area >= 0);
  }
  EXPECT_EQ(inserted, r.insertions);
  EXPECT_EQ(skipped, r.skipped);
  EXPECT_EQ(deferred, r.deferred);
  EXPECT_GE(r.passes, 1u);
  const auto check = hw::check_trace(r.trace, cloud);
  EXPECT_TRUE(check.ok()) << check.failure;
}

TEST(Contract, StalledRunsReportBlockedPoints) {
  // Some two-lobes clouds cannot be completed by single-facet dents.
  std::size_t stalled = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto cloud = cloud_of(hw::generate_points({"two-lobes", 1000, seed}));
    const auto r = hw::contract(cloud);
    if (r.outcome != hw::Outcome::Stalled) continue;
    ++stalled;
    ASSERT_FALSE(r.blocked.empty());
    EXPECT_EQ(r.insertions + r.blocked.size(), cloud.size() - r.hull_vertices);
    for (const auto& b : r.blocked) EXPECT_FALSE(r.mesh.has_vertex(b.point));
    const auto report = hw::validate(r.mesh, cloud, &r.trace);
    EXPECT_TRUE(report.closed_manifold && report.orientation_consistent && report.self_intersection_free &&
                report.containment_ok);
    EXPECT_FALSE(report.all_points_on_surface);
    EXPECT_TRUE(report.trace->ok()) << report.trace->failure;
  }
  if (stalled == 0) GTEST_SKIP() << "no stalled run among the sampled seeds";
}

TEST(Contract, ConfigAndInputErrors) {
  hw::ContractionConfig bad;
  bad.fallback_breadth = 0;
  EXPECT_THROW(hw::contract(fixtures::cube_centroid_cloud(), bad), hw::Error);
  bad = {};
  bad.on_surface_tolerance = 0;
  EXPECT_THROW(hw::contract(fixtures::cube_centroid_cloud(), bad), hw::Error);
  EXPECT_THROW(hw::contract(cloud_of({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}})), hw::Error);
}
