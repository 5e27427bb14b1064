#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hullwrap/contraction.hpp"
#include "hullwrap/error.hpp"
#include "hullwrap/generators.hpp"
#include "hullwrap/point_cloud.hpp"
#include "hullwrap/surface_mesh.hpp"
#include "hullwrap/trace.hpp"
#include "hullwrap/validation.hpp"

namespace hullwrap {

enum class CloudFormat { Xyz, Csv, Ply };
enum class MeshFormat { Obj, Ply };

struct LoadedCloud {
  PointCloud cloud;
  std::size_t read = 0;    // points before merging
  std::size_t merged = 0;  // near-duplicates dropped
  std::vector<std::string> warnings;
};

struct LoadedMesh {
  std::vector<Point3> points;
  std::vector<Facet> facets;
};

namespace detail {

inline Error parse_error(const std::string& source, std::size_t line, const std::string& what) {
  return Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + what);
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::vector<std::string_view> split_fields(std::string_view line, bool commas) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (commas) {
      const auto j = std::min(line.find(',', i), line.size());
      out.push_back(trim(line.substr(i, j - i)));
      i = j + 1;
      if (j == line.size() - 1) out.push_back({});
    } else {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const auto start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) out.push_back(line.substr(start, i - start));
    }
  }
  return out;
}

inline bool parse_double(std::string_view s, double& v) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && end == s.data() + s.size() && !s.empty();
}

template <typename T>
bool parse_integer(std::string_view s, T& v) {
  s = trim(s);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && end == s.data() + s.size() && !s.empty();
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

inline Point3 parse_xyz(const std::vector<std::string_view>& f, const std::string& src, std::size_t line) {
  if (f.size() != 3) throw parse_error(src, line, "expected 3 coordinates, got " + std::to_string(f.size()));
  Point3 p;
  if (!parse_double(f[0], p.x) || !parse_double(f[1], p.y) || !parse_double(f[2], p.z)) {
    throw parse_error(src, line, "malformed coordinate");
  }
  if (!is_finite(p)) throw parse_error(src, line, "non-finite coordinate");
  return p;
}

struct PlyHeader {
  std::size_t vertices = 0;
  std::size_t faces = 0;
  std::vector<std::string> vertex_props;
  std::size_t body = 0;  // first line after end_header
};

inline PlyHeader parse_ply_header(const std::vector<std::string>& lines, const std::string& src) {
  if (lines.empty() || trim(lines[0]) != "ply") throw parse_error(src, 1, "missing 'ply' magic");
  PlyHeader h;
  std::string element;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i], false);
    if (f.empty()) continue;
    if (f[0] == "format") {
      if (f.size() < 2 || f[1] != "ascii") throw parse_error(src, i + 1, "only ASCII PLY is supported");
    } else if (f[0] == "comment" || f[0] == "obj_info") {
    } else if (f[0] == "element") {
      if (f.size() != 3) throw parse_error(src, i + 1, "malformed element line");
      element = std::string(f[1]);
      std::size_t count = 0;
      if (!parse_integer(f[2], count)) throw parse_error(src, i + 1, "malformed element count");
      if (element == "vertex") h.vertices = count;
      if (element == "face") h.faces = count;
    } else if (f[0] == "property") {
      if (element == "vertex") h.vertex_props.emplace_back(f.back());
    } else if (f[0] == "end_header") {
      h.body = i + 1;
      for (const char* axis : {"x", "y", "z"}) {
        if (std::find(h.vertex_props.begin(), h.vertex_props.end(), axis) == h.vertex_props.end()) {
          throw parse_error(src, i + 1, std::string("vertex element lacks property ") + axis);
        }
      }
      return h;
    } else {
      throw parse_error(src, i + 1, "unexpected header line");
    }
  }
  throw parse_error(src, lines.size(), "missing end_header");
}

inline Point3 parse_ply_vertex(const PlyHeader& h, std::string_view line, const std::string& src, std::size_t no) {
  const auto f = split_fields(line, false);
  if (f.size() != h.vertex_props.size()) throw parse_error(src, no, "vertex has wrong number of properties");
  Point3 p;
  double* slot[3] = {&p.x, &p.y, &p.z};
  for (std::size_t k = 0; k < f.size(); ++k) {
    const std::string& name = h.vertex_props[k];
    if (name == "x" || name == "y" || name == "z") {
      if (!parse_double(f[k], *slot[name[0] - 'x'])) throw parse_error(src, no, "malformed coordinate");
    }
  }
  if (!is_finite(p)) throw parse_error(src, no, "non-finite coordinate");
  return p;
}

inline std::vector<Point3> parse_cloud_lines(const std::vector<std::string>& lines, CloudFormat format,
                                             const std::string& src) {
  std::vector<Point3> pts;
  if (format == CloudFormat::Ply) {
    const PlyHeader h = parse_ply_header(lines, src);
    std::size_t i = h.body;
    for (; pts.size() < h.vertices; ++i) {
      if (i >= lines.size()) throw parse_error(src, lines.size(), "fewer vertices than declared");
      if (trim(lines[i]).empty()) continue;
      pts.push_back(parse_ply_vertex(h, lines[i], src, i + 1));
    }
    return pts;
  }
  bool first = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto f = split_fields(line, format == CloudFormat::Csv);
    if (format == CloudFormat::Csv && first) {
      first = false;
      double probe = 0.0;
      if (f.size() == 3 && !parse_double(f[0], probe) && !parse_double(f[1], probe) && !parse_double(f[2], probe)) {
        continue;  // header row
      }
    }
    first = false;
    pts.push_back(parse_xyz(f, src, i + 1));
  }
  return pts;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace detail

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline CloudFormat cloud_format_for(const std::filesystem::path& path) {
  const std::string ext = detail::lower(path.extension().string());
  if (ext == ".csv") return CloudFormat::Csv;
  if (ext == ".ply") return CloudFormat::Ply;
  return CloudFormat::Xyz;
}

inline MeshFormat mesh_format_for(const std::filesystem::path& path) {
  return detail::lower(path.extension().string()) == ".ply" ? MeshFormat::Ply : MeshFormat::Obj;
}

inline std::optional<MeshFormat> parse_mesh_format(std::string_view s) {
  const std::string l = detail::lower(s);
  if (l == "obj") return MeshFormat::Obj;
  if (l == "ply") return MeshFormat::Ply;
  return std::nullopt;
}

/// Builds a cloud from raw points: merges near-duplicates (with a warning)
/// and requires at least 4 distinct points.
inline LoadedCloud make_cloud(std::vector<Point3> points, const std::string& source) {
  LoadedCloud out;
  out.read = points.size();
  out.cloud = PointCloud::from_points(std::move(points), &out.merged);
  if (out.merged > 0) {
    out.warnings.push_back(source + ": merged " + std::to_string(out.merged) + " near-duplicate point" +
                           (out.merged == 1 ? "" : "s"));
  }
  if (out.cloud.size() < 4) {
    throw Error(ErrorKind::DimensionalDeficiency,
                source + ": need at least 4 distinct points, got " + std::to_string(out.cloud.size()));
  }
  return out;
}

inline LoadedCloud read_cloud(const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path);
  return make_cloud(detail::parse_cloud_lines(lines, cloud_format_for(path), path.string()), path.string());
}

inline LoadedCloud read_cloud(const GeneratorSpec& spec) { return make_cloud(generate_points(spec), spec.str()); }

/// Points in id order as XYZ text.
inline std::string cloud_to_xyz(const PointCloud& cloud) {
  std::string s;
  for (const Point3& p : cloud.points()) {
    s += format_double(p.x) + ' ' + format_double(p.y) + ' ' + format_double(p.z) + '\n';
  }
  return s;
}

inline void write_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  detail::write_file(path, cloud_to_xyz(cloud));
}

/// Every cloud point as a vertex (id order) plus the facets, winding kept.
inline std::string mesh_to_string(const std::vector<Facet>& facets, const PointCloud& cloud, MeshFormat format) {
  for (const Facet& f : facets) {
    for (PointId v : f) {
      if (v >= cloud.size()) throw Error(ErrorKind::InconsistentInput, "facet index outside the cloud");
    }
  }
  std::string s;
  if (format == MeshFormat::Obj) {
    for (const Point3& p : cloud.points()) {
      s += "v " + format_double(p.x) + ' ' + format_double(p.y) + ' ' + format_double(p.z) + '\n';
    }
    for (const Facet& f : facets) {
      s += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' + std::to_string(f[2] + 1) + '\n';
    }
    return s;
  }
  s += "ply\nformat ascii 1.0\n";
  s += "element vertex " + std::to_string(cloud.size()) + "\n";
  s += "property double x\nproperty double y\nproperty double z\n";
  s += "element face " + std::to_string(facets.size()) + "\n";
  s += "property list uchar int vertex_indices\nend_header\n";
  for (const Point3& p : cloud.points()) {
    s += format_double(p.x) + ' ' + format_double(p.y) + ' ' + format_double(p.z) + '\n';
  }
  for (const Facet& f : facets) {
    s += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) + '\n';
  }
  return s;
}

inline void write_mesh(const SurfaceMesh& mesh, const PointCloud& cloud, const std::filesystem::path& path,
                       MeshFormat format) {
  detail::write_file(path, mesh_to_string(mesh.facets(), cloud, format));
}

/// Reads OBJ (`v`, `f`; polygons fanned, `a/b/c` and negative indices
/// accepted) or ASCII PLY with triangle faces.
inline LoadedMesh read_mesh(const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path);
  const std::string src = path.string();
  LoadedMesh m;
  if (mesh_format_for(path) == MeshFormat::Ply) {
    const detail::PlyHeader h = detail::parse_ply_header(lines, src);
    std::size_t i = h.body;
    while (m.points.size() < h.vertices) {
      if (i >= lines.size()) throw detail::parse_error(src, lines.size(), "fewer vertices than declared");
      if (!detail::trim(lines[i]).empty()) m.points.push_back(detail::parse_ply_vertex(h, lines[i], src, i + 1));
      ++i;
    }
    while (m.facets.size() < h.faces) {
      if (i >= lines.size()) throw detail::parse_error(src, lines.size(), "fewer faces than declared");
      const auto f = detail::split_fields(lines[i], false);
      ++i;
      if (f.empty()) continue;
      std::size_t k = 0;
      if (!detail::parse_integer(f[0], k) || k != 3 || f.size() != 4) {
        throw detail::parse_error(src, i, "only triangle faces are supported");
      }
      Facet t{};
      for (std::size_t j = 0; j < 3; ++j) {
        if (!detail::parse_integer(f[j + 1], t[j]) || t[j] >= h.vertices) {
          throw detail::parse_error(src, i, "face index out of range");
        }
      }
      m.facets.push_back(t);
    }
    return m;
  }
  std::vector<std::pair<std::vector<long>, std::size_t>> faces;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const auto f = detail::split_fields(line, false);
    if (f.empty()) continue;
    if (f[0] == "v") {
      if (f.size() < 4) throw detail::parse_error(src, i + 1, "vertex needs 3 coordinates");
      m.points.push_back(detail::parse_xyz({f[1], f[2], f[3]}, src, i + 1));
    } else if (f[0] == "f") {
      if (f.size() < 4) throw detail::parse_error(src, i + 1, "face needs at least 3 vertices");
      std::vector<long> idx;
      for (std::size_t k = 1; k < f.size(); ++k) {
        long v = 0;
        if (!detail::parse_integer(f[k].substr(0, f[k].find('/')), v) || v == 0) {
          throw detail::parse_error(src, i + 1, "malformed face index");
        }
        idx.push_back(v);
      }
      faces.emplace_back(std::move(idx), i + 1);
    }
  }
  const long n = static_cast<long>(m.points.size());
  for (const auto& [idx, line] : faces) {
    std::vector<PointId> ids;
    for (long v : idx) {
      const long z = v > 0 ? v - 1 : n + v;
      if (z < 0 || z >= n) throw detail::parse_error(src, line, "face index out of range");
      ids.push_back(static_cast<PointId>(z));
    }
    for (std::size_t k = 1; k + 1 < ids.size(); ++k) m.facets.push_back({ids[0], ids[k], ids[k + 1]});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Trace output

inline std::string_view trace_action(const StepRecord& s) {
  if (s.action == StepAction::Inserted && s.coplanar) return "INSERTED_COPLANAR";
  return to_string(s.action);
}

/// `k,point_id,action,metric,volume,area`: the initial state and one row per
/// insertion.
inline std::string trace_to_csv(const ContractionTrace& trace) {
  std::string s = "k,point_id,action,metric,volume,area\n";
  for (const StepRecord& r : trace.steps) {
    if (r.action != StepAction::Initial && r.action != StepAction::Inserted) continue;
    s += std::to_string(r.k) + ',' + (r.point == kNoPoint ? std::string("-1") : std::to_string(r.point)) + ',' +
         std::string(trace_action(r)) + ',' + format_double(r.metric) + ',' + format_double(r.volume) + ',' +
         format_double(r.area) + '\n';
  }
  return s;
}

/// Every event of the run, including deferrals and skips.
inline std::string events_to_csv(const ContractionTrace& trace) {
  std::string s = "k,pass,point_id,action,facet_a,facet_b,facet_c,metric,hausdorff,volume,area,volume_delta,area_delta\n";
  for (const StepRecord& r : trace.steps) {
    const auto id = [](PointId v) { return v == kNoPoint ? std::string("-1") : std::to_string(v); };
    const bool has_facet = r.action != StepAction::Initial;
    s += std::to_string(r.k) + ',' + std::to_string(r.pass) + ',' + id(r.point) + ',' + std::string(trace_action(r)) +
         ',' + (has_facet ? id(r.facet[0]) + ',' + id(r.facet[1]) + ',' + id(r.facet[2]) : std::string("-1,-1,-1")) +
         ',' + format_double(r.metric) + ',' + format_double(r.hausdorff) + ',' + format_double(r.volume) + ',' +
         format_double(r.area) + ',' + format_double(r.volume_delta) + ',' + format_double(r.area_delta) + '\n';
  }
  return s;
}

/// Writes trace.csv and events.csv into `dir`, plus step_NNNN.obj snapshots
/// when the trace carries them.
inline void write_trace(const ContractionTrace& trace, const PointCloud& cloud, const std::filesystem::path& dir) {
  if (trace.steps.empty()) throw Error(ErrorKind::InconsistentInput, "trace is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  detail::write_file(dir / "trace.csv", trace_to_csv(trace));
  detail::write_file(dir / "events.csv", events_to_csv(trace));
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%04zu.obj", i);
    detail::write_file(dir / name, mesh_to_string(trace.snapshots[i], cloud, MeshFormat::Obj));
  }
}

/// Row of trace.csv.
struct TraceRow {
  std::size_t k = 0;
  long point = -1;
  std::string action;
  double metric = 0.0;
  double volume = 0.0;
  double area = 0.0;
};

inline std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  const auto lines = detail::read_lines(path);
  const std::string src = path.string();
  if (lines.empty() || detail::trim(lines[0]) != "k,point_id,action,metric,volume,area") {
    throw detail::parse_error(src, 1, "unexpected trace header");
  }
  std::vector<TraceRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const auto f = detail::split_fields(lines[i], true);
    TraceRow r;
    if (f.size() != 6 || !detail::parse_integer(f[0], r.k) || !detail::parse_integer(f[1], r.point) ||
        !detail::parse_double(f[3], r.metric) || !detail::parse_double(f[4], r.volume) ||
        !detail::parse_double(f[5], r.area)) {
      throw detail::parse_error(src, i + 1, "malformed trace row");
    }
    r.action = std::string(f[2]);
    if (r.action != "INITIAL" && r.action != "INSERTED" && r.action != "INSERTED_COPLANAR") {
      throw detail::parse_error(src, i + 1, "unknown action '" + r.action + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Checks a trace.csv replay: metric strictly decreasing on INSERTED rows
/// (non-increasing on coplanar ones), volume decreasing (unchanged within
/// rounding when coplanar), area non-decreasing.
inline TraceCheck check_trace_rows(const std::vector<TraceRow>& rows) {
  TraceCheck c;
  const auto fail = [&](std::size_t i, bool& flag, const std::string& what) {
    flag = false;
    if (!c.first_failure) {
      c.first_failure = i;
      c.failure = what + " at row " + std::to_string(i + 1);
    }
  };
  if (rows.empty() || rows.front().action != "INITIAL") {
    fail(0, c.metric_decreasing, "trace does not start with the initial state");
    return c;
  }
  const double v0 = std::abs(rows.front().volume);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const TraceRow& prev = rows[i - 1];
    const TraceRow& r = rows[i];
    ++c.insertions;
    const bool coplanar = r.action == "INSERTED_COPLANAR";
    if (r.action == "INITIAL" || r.k != prev.k + 1) fail(i, c.volume_consistent, "rows out of sequence");
    if (coplanar ? !(r.metric <= prev.metric) : !(r.metric < prev.metric)) {
      fail(i, c.metric_decreasing, "metric did not decrease");
    }
    const double dv = prev.volume - r.volume;
    if (coplanar ? !(std::abs(dv) <= kSeriesRelTolerance * v0) : !(dv > 0.0)) {
      fail(i, c.volume_consistent, "volume did not decrease");
    }
    if (!(r.area >= prev.area - kSeriesRelTolerance * prev.area)) fail(i, c.area_nondecreasing, "area decreased");
  }
  return c;
}

}  // namespace hullwrap
