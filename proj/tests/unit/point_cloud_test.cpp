#include <gtest/gtest.h>

#include <limits>

#include "hullwrap/point_cloud.hpp"
#include "hullwrap/surface_mesh.hpp"
#include "support/fixtures.hpp"

namespace hw = hullwrap;

TEST(PointCloud, KeepsInputOrderAndMergesNearDuplicates) {
  std::size_t merged = 0;
  const auto cloud = hw::PointCloud::from_points(
      {{0, 0, 0}, {1, 0, 0}, {1e-12, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1e-11}}, &merged);
  EXPECT_EQ(merged, 2u);
  ASSERT_EQ(cloud.size(), 4u);
  EXPECT_EQ(cloud[0], (hw::Point3{0, 0, 0}));
  EXPECT_EQ(cloud[1], (hw::Point3{1, 0, 0}));
  EXPECT_EQ(cloud[2], (hw::Point3{0, 1, 0}));
  EXPECT_EQ(cloud[3], (hw::Point3{0, 0, 1}));
}

TEST(PointCloud, DistinctPointsBeyondToleranceSurvive) {
  std::size_t merged = 0;
  const auto cloud = hw::PointCloud::from_points({{0, 0, 0}, {1, 1, 1}, {1e-6, 0, 0}}, &merged);
  EXPECT_EQ(merged, 0u);
  EXPECT_EQ(cloud.size(), 3u);
}

TEST(PointCloud, RejectsNonFiniteCoordinates) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    hw::PointCloud::from_points({{0, 0, 0}, {nan, 0, 0}});
    FAIL() << "expected an error";
  } catch (const hw::Error& e) {
    EXPECT_EQ(e.kind(), hw::ErrorKind::InconsistentInput);
  }
  EXPECT_THROW(hw::PointCloud::from_points({{std::numeric_limits<double>::infinity(), 0, 0}}), hw::Error);
}

TEST(SurfaceMesh, TetrahedronAdjacency) {
  const hw::SurfaceMesh mesh(fixtures::tetra_facets());
  EXPECT_EQ(mesh.facet_count(), 4u);
  EXPECT_EQ(mesh.vertex_count(), 4u);
  EXPECT_EQ(mesh.edge_conflicts(), 0u);
  for (hw::FacetId f = 0; f < 4; ++f) {
    const hw::Facet& t = mesh.facet(f);
    for (int k = 0; k < 3; ++k) {
      const auto n = mesh.neighbor(f, k);
      ASSERT_TRUE(n.has_value());
      EXPECT_NE(*n, f);
      // the neighbour traverses the shared edge in the opposite direction
      EXPECT_EQ(mesh.facet_with_edge(t[static_cast<std::size_t>((k + 1) % 3)], t[static_cast<std::size_t>(k)]), n);
    }
  }
  EXPECT_EQ(mesh.find({2, 1, 0}), std::optional<hw::FacetId>(0));  // rotation of (0,2,1)
  EXPECT_FALSE(mesh.find({0, 1, 2}).has_value());                   // opposite winding
}

TEST(SurfaceMesh, ReplaceAndAddKeepAdjacencyCurrent) {
  hw::SurfaceMesh mesh(fixtures::tetra_facets());
  mesh.replace(3, {1, 2, 4});
  mesh.add({2, 3, 4});
  mesh.add({3, 1, 4});
  EXPECT_EQ(mesh.facet_count(), 6u);
  EXPECT_EQ(mesh.vertex_count(), 5u);
  EXPECT_TRUE(mesh.has_vertex(4));
  EXPECT_EQ(mesh.edge_conflicts(), 0u);
  EXPECT_TRUE(mesh.facet_with_edge(4, 1).has_value());
  EXPECT_FALSE(mesh.find({1, 2, 3}).has_value());
}

TEST(SurfaceMesh, DuplicateDirectedEdgeIsCounted) {
  const hw::SurfaceMesh mesh(std::vector<hw::Facet>{{0, 1, 2}, {0, 1, 3}});
  EXPECT_GT(mesh.edge_conflicts(), 0u);
}
