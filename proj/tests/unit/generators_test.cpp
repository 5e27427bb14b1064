#include <gtest/gtest.h>

#include <cmath>

#include "hullwrap/convex_hull.hpp"
#include "hullwrap/generators.hpp"
#include "hullwrap/mesh_io.hpp"

namespace hw = hullwrap;

TEST(Generators, ParseSpecs) {
  const auto s = hw::parse_generator(" ball-uniform( 50 , 7 ) ");
  EXPECT_EQ(s.name, "ball-uniform");
  EXPECT_EQ(s.n, 50u);
  EXPECT_EQ(s.seed, 7u);
  EXPECT_EQ(s.str(), "ball-uniform(50,7)");
  EXPECT_EQ(hw::parse_generator("two-lobes(10)", 3).seed, 3u);
  for (const char* bad : {"cube(5,1)", "ball-uniform(0,1)", "ball-uniform(5,0)", "ball-uniform(5,-1)",
                          "ball-uniform(5", "ball-uniform", "ball-uniform(x,1)", "ball-uniform(5)"}) {
    try {
      hw::parse_generator(bad);
      ADD_FAILURE() << bad;
    } catch (const hw::Error& e) {
      EXPECT_EQ(e.kind(), hw::ErrorKind::Config) << bad;
    }
  }
}

TEST(Generators, SphereShellIsOnTheUnitSphere) {
  const auto pts = hw::generate_points({"sphere-shell", 50, 7});
  ASSERT_EQ(pts.size(), 50u);
  for (const auto& p : pts) EXPECT_NEAR(hw::norm(p), 1.0, 1e-12);
}

TEST(Generators, SupportsAreRespected) {
  for (const auto& p : hw::generate_points({"ball-uniform", 500, 3})) EXPECT_LE(hw::squared_norm(p), 1.0);
  for (const auto& p : hw::generate_points({"two-lobes", 500, 3})) {
    const double dl = hw::distance(p, {-1.25, 0, 0}), dr = hw::distance(p, {1.25, 0, 0});
    EXPECT_LE(std::min(dl, dr), 1.0 + 1e-15);
  }
  const auto blob = hw::generate_points({"gaussian-blob", 4000, 3});
  double mean = 0, var = 0;
  for (const auto& p : blob) mean += p.x + p.y + p.z;
  mean /= 3.0 * double(blob.size());
  for (const auto& p : blob) var += (p.x - mean) * (p.x - mean) + (p.y - mean) * (p.y - mean) + (p.z - mean) * (p.z - mean);
  var /= 3.0 * double(blob.size());
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Generators, Deterministic) {
  EXPECT_EQ(hw::generate_points({"ball-uniform", 500, 7}), hw::generate_points({"ball-uniform", 500, 7}));
  EXPECT_NE(hw::generate_points({"ball-uniform", 500, 7}), hw::generate_points({"ball-uniform", 500, 8}));
  // pinned leading sample guards the stream against silent changes
  const auto first = hw::generate_points({"ball-uniform", 1, 1}).front();
  const auto again = hw::read_cloud(hw::GeneratorSpec{"ball-uniform", 10, 1}).cloud[0];
  EXPECT_EQ(first, again);
}

TEST(Generators, TwoLobesHasFewHullVertices) {
  const auto cloud = hw::read_cloud(hw::GeneratorSpec{"two-lobes", 100, 3}).cloud;
  const auto hull = hw::convex_hull(cloud);
  const double fraction = double(hull.vertex_count()) / double(cloud.size());
  EXPECT_LT(fraction, 0.6);
  EXPECT_EQ(hull.vertex_count(), 38u);  // measured
}
