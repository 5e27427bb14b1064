#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hullwrap/hullwrap.hpp"

namespace {

using hullwrap::Error;
using hullwrap::ErrorKind;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCheck = 2;

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct ContractArgs {
  std::string input;
  std::string generate;
  std::string output;
  std::string format;
  std::string priority = "centroid";
  std::size_t fallback_breadth = 8;
  std::string trace_dir;
  bool snapshots = false;
  std::optional<std::uint64_t> seed;
  bool validate = false;
};

int run_contract(const ContractArgs& a) {
  if (a.input.empty() == a.generate.empty()) throw Error(ErrorKind::Config, "give exactly one of --input or --generate");
  hullwrap::ContractionConfig config;
  if (a.priority == "centroid") {
    config.priority = hullwrap::PriorityMode::Centroid;
  } else if (a.priority == "true") {
    config.priority = hullwrap::PriorityMode::TrueDistance;
  } else {
    throw Error(ErrorKind::Config, "unknown priority '" + a.priority + "' (centroid or true)");
  }
  config.fallback_breadth = a.fallback_breadth;
  config.verbosity = a.snapshots ? hullwrap::TraceVerbosity::Snapshots : hullwrap::TraceVerbosity::Steps;
  if (a.snapshots && a.trace_dir.empty()) throw Error(ErrorKind::Config, "--snapshots needs --trace-dir");
  config.check();

  std::optional<hullwrap::MeshFormat> format;
  if (!a.format.empty()) {
    format = hullwrap::parse_mesh_format(a.format);
    if (!format) throw Error(ErrorKind::Config, "unknown format '" + a.format + "' (obj or ply)");
  }

  const hullwrap::LoadedCloud loaded = a.input.empty()
                                           ? hullwrap::read_cloud(hullwrap::parse_generator(a.generate, a.seed))
                                           : hullwrap::read_cloud(std::filesystem::path(a.input));
  print_warnings(loaded.warnings);
  const hullwrap::PointCloud& cloud = loaded.cloud;

  const hullwrap::ContractionResult result = hullwrap::contract(cloud, config);

  if (!a.output.empty()) {
    hullwrap::write_mesh(result.mesh, cloud, a.output, format.value_or(hullwrap::mesh_format_for(a.output)));
  }
  if (!a.trace_dir.empty()) hullwrap::write_trace(result.trace, cloud, a.trace_dir);

  Json summary = hullwrap::to_json(result, cloud.size());
  summary["source"] = a.input.empty() ? hullwrap::parse_generator(a.generate, a.seed).str() : a.input;
  summary["points_read"] = loaded.read;
  summary["points_merged"] = loaded.merged;
  int code = kExitOk;
  if (a.validate) {
    const hullwrap::ValidationReport report =
        hullwrap::validate(result.mesh, cloud, &result.trace, config.on_surface_tolerance);
    summary["validation"] = hullwrap::to_json(report);
    if (!report.passed()) {
      std::cerr << "validation failed\n" << report.to_key_values();
      code = kExitCheck;
    }
  }
  if (result.outcome == hullwrap::Outcome::Stalled) {
    std::cerr << "stalled with " << result.blocked.size() << " blocked point(s):";
    for (const auto& b : result.blocked) {
      std::cerr << ' ' << b.point;
      if (b.last) std::cerr << " (" << hullwrap::to_string(b.last->verdict) << ')';
    }
    std::cerr << '\n';
    code = kExitCheck;
  }
  print_json(summary);
  return code;
}

struct ValidateArgs {
  std::string mesh;
  std::string cloud;
  std::string trace;
};

/// Re-indexes the mesh onto the cloud by exact coordinates. Mesh vertices not
/// found in the cloud are appended so the surface stays intact; the cloud
/// points it misses then show up as off-surface.
struct Indexed {
  hullwrap::PointCloud cloud;
  std::vector<hullwrap::Facet> facets;
  std::size_t unmatched = 0;
};

Indexed index_mesh(const hullwrap::LoadedMesh& mesh, const hullwrap::PointCloud& cloud) {
  using Key = std::tuple<double, double, double>;
  std::map<Key, hullwrap::PointId> ids;
  std::vector<hullwrap::Point3> points(cloud.points().begin(), cloud.points().end());
  for (hullwrap::PointId i = 0; i < points.size(); ++i) ids.emplace(Key{points[i].x, points[i].y, points[i].z}, i);
  Indexed out;
  std::vector<hullwrap::PointId> remap(mesh.points.size());
  for (std::size_t v = 0; v < mesh.points.size(); ++v) {
    const hullwrap::Point3& p = mesh.points[v];
    const auto [it, fresh] = ids.emplace(Key{p.x, p.y, p.z}, static_cast<hullwrap::PointId>(points.size()));
    if (fresh) {
      points.push_back(p);
      ++out.unmatched;
    }
    remap[v] = it->second;
  }
  const std::size_t expected = points.size();
  std::size_t merged = 0;
  out.cloud = hullwrap::PointCloud::from_points(std::move(points), &merged);
  if (merged != 0 || out.cloud.size() != expected) {
    throw Error(ErrorKind::InconsistentInput, "mesh vertices nearly coincide with cloud points without matching them");
  }
  out.facets.reserve(mesh.facets.size());
  for (const hullwrap::Facet& f : mesh.facets) out.facets.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  return out;
}

int run_validate(const ValidateArgs& a) {
  const hullwrap::LoadedCloud loaded = hullwrap::read_cloud(std::filesystem::path(a.cloud));
  print_warnings(loaded.warnings);
  const hullwrap::LoadedMesh mesh = hullwrap::read_mesh(a.mesh);
  const Indexed indexed = index_mesh(mesh, loaded.cloud);
  if (indexed.unmatched > 0) {
    std::cerr << "warning: " << indexed.unmatched << " mesh vertex(es) are not cloud points\n";
  }
  const hullwrap::SurfaceMesh surface(indexed.facets);
  hullwrap::ValidationReport report = hullwrap::validate(surface, indexed.cloud);
  if (indexed.unmatched > 0) report.all_points_on_surface = false;

  std::optional<std::vector<hullwrap::TraceRow>> rows;
  if (!a.trace.empty()) {
    rows = hullwrap::read_trace_csv(a.trace);
    hullwrap::TraceCheck check = hullwrap::check_trace_rows(*rows);
    if (!rows->empty()) {
      const double v = rows->back().volume;
      if (std::abs(v - report.volume) > hullwrap::kVolumeRelTolerance * std::max(std::abs(report.volume), 1e-300)) {
        check.volume_consistent = false;
        if (check.failure.empty()) check.failure = "final trace volume does not match the mesh";
      }
    }
    report.trace = check;
  }
  Json j = hullwrap::to_json(report);
  j["unmatched_mesh_vertices"] = indexed.unmatched;
  print_json(j);
  if (!report.passed()) {
    std::cerr << report.to_key_values();
    return kExitCheck;
  }
  return kExitOk;
}

struct BenchArgs {
  std::string sizes = "100,200,400,800,1600,3200";
  std::string generator = "ball-uniform";
  std::size_t repeats = 3;
  std::uint64_t seed = 1;
  std::string csv;
};

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const auto field = hullwrap::detail::trim(std::string_view(text).substr(start, end - start));
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw Error(ErrorKind::Config, "bad size '" + std::string(field) + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

int run_bench(const BenchArgs& a) {
  hullwrap::BenchConfig config;
  config.sizes = parse_sizes(a.sizes);
  config.generator = a.generator;
  config.repeats = a.repeats;
  config.seed = a.seed;
  const auto records = hullwrap::run_bench(config);
  if (!a.csv.empty()) hullwrap::detail::write_file(a.csv, hullwrap::bench_csv(records));
  const hullwrap::ScalingSummary s = hullwrap::summarize(records);

  std::fprintf(stderr, "%8s %8s %10s %10s %12s %12s %12s\n", "n", "n-m", "n/100", "total[s]", "sort[s]", "insert[s]",
               "validate[s]");
  for (const auto& z : s.sizes) {
    std::fprintf(stderr, "%8zu %8zu %10.2f %10.4g %12.4g %12.4g %12.4g%s\n", z.n, z.n_minus_m, z.n_over_100, z.t_total,
                 z.t_sort, z.t_insert, z.t_validate, z.complete ? "" : "  (stalled)");
  }
  std::fprintf(stderr, "total slope %.3f (soft <= %.1f: %s, hard <= %.1f: %s)\n", s.slope_total, hullwrap::kSoftTotalSlope,
               s.total_within_soft ? "ok" : "exceeded", hullwrap::kHardTotalSlope, s.total_within_hard ? "ok" : "exceeded");
  std::fprintf(stderr, "sort slope %.3f vs (n-m)log(n-m) %.3f (band %.1f: %s)\n", s.slope_sort, s.expected_sort_slope,
               hullwrap::kSortSlopeBand, s.sort_within_band ? "ok" : "outside");

  Json j = hullwrap::to_json(s);
  j["generator"] = a.generator;
  j["repeats"] = a.repeats;
  j["seed"] = a.seed;
  print_json(j);
  return s.total_within_hard ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concave surface reconstruction by hull contraction"};
  app.require_subcommand(1);

  ContractArgs ca;
  auto* contract = app.add_subcommand("contract", "Contract the convex hull of a cloud onto all of its points");
  auto* input = contract->add_option("--input", ca.input, "Point cloud (.xyz, .csv, .ply)");
  auto* generate = contract->add_option("--generate", ca.generate, "Generator spec, e.g. ball-uniform(50,7)");
  input->excludes(generate);
  contract->add_option("--output", ca.output, "Output mesh path");
  contract->add_option("--format", ca.format, "obj or ply (default: from the output extension)");
  contract->add_option("--priority", ca.priority, "centroid or true")->capture_default_str();
  contract->add_option("--fallback-breadth", ca.fallback_breadth, "Alternative facets tried per point")
      ->capture_default_str();
  contract->add_option("--trace-dir", ca.trace_dir, "Directory for trace.csv, events.csv and snapshots");
  contract->add_flag("--snapshots", ca.snapshots, "Write a mesh after every insertion");
  contract->add_option("--seed", ca.seed, "Seed used when the generator spec has none");
  contract->add_flag("--validate", ca.validate, "Validate the result");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check a mesh against a cloud");
  validate->add_option("--mesh", va.mesh, "Mesh (.obj or .ply)")->required();
  validate->add_option("--cloud", va.cloud, "Point cloud")->required();
  validate->add_option("--trace", va.trace, "trace.csv from a contraction run");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Measure scaling over cloud sizes");
  bench->add_option("--sizes", ba.sizes, "Comma-separated ascending sizes")->capture_default_str();
  bench->add_option("--generator", ba.generator, "Generator name")->capture_default_str();
  bench->add_option("--repeats", ba.repeats, "Runs per size")->capture_default_str();
  bench->add_option("--seed", ba.seed, "Generator seed")->capture_default_str();
  bench->add_option("--csv", ba.csv, "Per-run CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*contract) return run_contract(ca);
    if (*validate) return run_validate(va);
    if (*bench) return run_bench(ba);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
