// Contracts a 50-point ball sample and writes the surface next to the binary.
#include <iostream>

#include "hullwrap/contraction.hpp"
#include "hullwrap/generators.hpp"
#include "hullwrap/mesh_io.hpp"
#include "hullwrap/validation.hpp"

int main() {
  const hullwrap::PointCloud cloud = hullwrap::read_cloud(hullwrap::GeneratorSpec{"ball-uniform", 50, 7}).cloud;
  const hullwrap::ContractionResult result = hullwrap::contract(cloud);
  hullwrap::write_mesh(result.mesh, cloud, "ball50.obj", hullwrap::MeshFormat::Obj);

  const hullwrap::ValidationReport report = hullwrap::validate(result.mesh, cloud, &result.trace);
  std::cout << "outcome=" << hullwrap::to_string(result.outcome) << '\n'
            << "hull_vertices=" << result.hull_vertices << '\n'
            << "insertions=" << result.insertions << '\n'
            << report.to_key_values();
  return report.passed() ? 0 : 1;
}
