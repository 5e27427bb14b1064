#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "hullwrap/contraction.hpp"
#include "hullwrap/error.hpp"
#include "hullwrap/generators.hpp"
#include "hullwrap/mesh_io.hpp"
#include "hullwrap/validation.hpp"

namespace hullwrap {

struct BenchRecord {
  std::string generator;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t repeat = 0;
  std::size_t hull_vertices = 0;
  std::size_t insertions = 0;
  std::size_t passes = 0;
  double t_hull = 0.0;
  double t_sort = 0.0;
  double t_prioritize = 0.0;
  double t_insert = 0.0;
  double t_validate = 0.0;
  double t_total = 0.0;
  double metric = 0.0;
  bool validated = false;
  Outcome outcome = Outcome::Complete;
};

struct BenchConfig {
  std::vector<std::size_t> sizes;
  std::string generator = "ball-uniform";
  std::size_t repeats = 1;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  ContractionConfig contraction;

  void check() const {
    if (sizes.empty()) throw Error(ErrorKind::Config, "no sizes given");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (sizes[i] == 0) throw Error(ErrorKind::Config, "sizes must be positive");
      if (i > 0 && sizes[i] <= sizes[i - 1]) throw Error(ErrorKind::Config, "sizes must be strictly ascending");
    }
    if (repeats == 0) throw Error(ErrorKind::Config, "repeats must be positive");
    if (seed == 0) throw Error(ErrorKind::Config, "seed must be positive");
    parse_generator(generator + "(1,1)");
    contraction.check();
  }
};

/// Worker count from HULLWRAP_THREADS (0 or unset: hardware concurrency).
inline std::size_t thread_budget() {
  std::size_t n = 0;
  if (const char* env = std::getenv("HULLWRAP_THREADS")) {
    const auto v = detail::trim(env);
    std::from_chars(v.data(), v.data() + v.size(), n);
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

inline BenchRecord bench_once(const GeneratorSpec& spec, std::size_t repeat, const ContractionConfig& config) {
  const PointCloud cloud = read_cloud(spec).cloud;
  BenchRecord r;
  r.generator = spec.name;
  r.n = cloud.size();
  r.seed = spec.seed;
  r.repeat = repeat;
  const auto t0 = std::chrono::steady_clock::now();
  const ContractionResult c = contract(cloud, config);
  const auto t1 = std::chrono::steady_clock::now();
  const ValidationReport v = validate(c.mesh, cloud, &c.trace, config.on_surface_tolerance);
  const auto t2 = std::chrono::steady_clock::now();
  r.hull_vertices = c.hull_vertices;
  r.insertions = c.insertions;
  r.passes = c.passes;
  r.t_hull = c.times.hull;
  r.t_sort = c.times.sort;
  r.t_prioritize = c.times.prioritize;
  r.t_insert = c.times.insert;
  r.t_validate = std::chrono::duration<double>(t2 - t1).count();
  r.t_total = std::chrono::duration<double>(t2 - t0).count();
  r.metric = v.metric;
  r.validated = v.passed();
  r.outcome = c.outcome;
  return r;
}

/// One record per (size, repeat), ordered by size then repeat. Repeats of a
/// size share the cloud; runs are spread over worker threads.
inline std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  config.check();
  struct Job {
    GeneratorSpec spec;
    std::size_t repeat;
  };
  std::vector<Job> jobs;
  for (std::size_t n : config.sizes) {
    for (std::size_t r = 0; r < config.repeats; ++r) jobs.push_back({{config.generator, n, config.seed}, r});
  }
  std::vector<BenchRecord> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out[i] = bench_once(jobs[i].spec, jobs[i].repeat, config.contraction);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(jobs.size(), config.threads == 0 ? thread_budget() : config.threads);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::string s =
      "generator,n,seed,repeat,hull_vertices,insertions,n_minus_m,passes,outcome,validated,metric,"
      "t_hull,t_sort,t_prioritize,t_insert,t_validate,t_total\n";
  for (const BenchRecord& r : records) {
    s += r.generator + ',' + std::to_string(r.n) + ',' + std::to_string(r.seed) + ',' + std::to_string(r.repeat) + ',' +
         std::to_string(r.hull_vertices) + ',' + std::to_string(r.insertions) + ',' +
         std::to_string(r.n - r.hull_vertices) + ',' + std::to_string(r.passes) + ',' + std::string(to_string(r.outcome)) +
         ',' + (r.validated ? "true" : "false") + ',' + format_double(r.metric) + ',' + format_double(r.t_hull) + ',' +
         format_double(r.t_sort) + ',' + format_double(r.t_prioritize) + ',' + format_double(r.t_insert) + ',' +
         format_double(r.t_validate) + ',' + format_double(r.t_total) + '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Scaling summary

/// Least-squares slope of log(y) against log(x); pairs with y <= 0 are dropped.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++k;
  }
  if (k < 2) return std::nan("");
  const double den = static_cast<double>(k) * sxx - sx * sx;
  return den == 0.0 ? std::nan("") : (static_cast<double>(k) * sxy - sx * sy) / den;
}

inline constexpr double kSoftTotalSlope = 2.2;
inline constexpr double kSortSlopeBand = 0.5;
inline constexpr double kHardTotalSlope = 2.5;

struct SizeSummary {
  std::size_t n = 0;
  std::size_t hull_vertices = 0;
  std::size_t insertions = 0;
  std::size_t n_minus_m = 0;
  double n_over_100 = 0.0;
  bool complete = false;         // every repeat finished COMPLETE
  bool accounting_ok = false;    // insertions == n - m on every COMPLETE repeat
  double t_total = 0.0;          // medians over repeats
  double t_hull = 0.0;
  double t_sort = 0.0;
  double t_prioritize = 0.0;
  double t_insert = 0.0;
  double t_validate = 0.0;
};

struct ScalingSummary {
  std::vector<SizeSummary> sizes;
  double slope_total = 0.0;
  double slope_hull = 0.0;
  double slope_sort = 0.0;
  double slope_prioritize = 0.0;
  double slope_insert = 0.0;
  double slope_validate = 0.0;
  double expected_sort_slope = 0.0;  // fitted slope of (n-m) log(n-m)
  bool total_within_soft = false;
  bool sort_within_band = false;
  bool total_within_hard = false;
  bool accounting_ok = false;
  bool n_over_100_matches = false;  // whether n/100 equals n - m anywhere (it is not expected to)
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline ScalingSummary summarize(const std::vector<BenchRecord>& records) {
  ScalingSummary s;
  std::vector<std::size_t> ns;
  for (const auto& r : records) {
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  }
  std::sort(ns.begin(), ns.end());
  s.accounting_ok = true;
  for (std::size_t n : ns) {
    SizeSummary z;
    z.n = n;
    z.complete = true;
    z.accounting_ok = true;
    std::vector<double> tot, hull, sort, prio, ins, val;
    for (const auto& r : records) {
      if (r.n != n) continue;
      z.hull_vertices = r.hull_vertices;
      z.insertions = r.insertions;
      z.complete = z.complete && r.outcome == Outcome::Complete;
      if (r.outcome == Outcome::Complete && r.insertions != r.n - r.hull_vertices) z.accounting_ok = false;
      tot.push_back(r.t_total);
      hull.push_back(r.t_hull);
      sort.push_back(r.t_sort);
      prio.push_back(r.t_prioritize);
      ins.push_back(r.t_insert);
      val.push_back(r.t_validate);
    }
    z.n_minus_m = n - z.hull_vertices;
    z.n_over_100 = static_cast<double>(n) / 100.0;
    s.n_over_100_matches = s.n_over_100_matches || static_cast<double>(z.n_minus_m) == z.n_over_100;
    z.t_total = median(tot);
    z.t_hull = median(hull);
    z.t_sort = median(sort);
    z.t_prioritize = median(prio);
    z.t_insert = median(ins);
    z.t_validate = median(val);
    s.accounting_ok = s.accounting_ok && z.accounting_ok;
    s.sizes.push_back(z);
  }
  std::vector<double> x, total, hull, sort, prio, ins, val, model;
  for (const auto& z : s.sizes) {
    x.push_back(static_cast<double>(z.n));
    total.push_back(z.t_total);
    hull.push_back(z.t_hull);
    sort.push_back(z.t_sort);
    prio.push_back(z.t_prioritize);
    ins.push_back(z.t_insert);
    val.push_back(z.t_validate);
    const double k = static_cast<double>(std::max<std::size_t>(z.n_minus_m, 2));
    model.push_back(k * std::log(k));
  }
  s.slope_total = loglog_slope(x, total);
  s.slope_hull = loglog_slope(x, hull);
  s.slope_sort = loglog_slope(x, sort);
  s.slope_prioritize = loglog_slope(x, prio);
  s.slope_insert = loglog_slope(x, ins);
  s.slope_validate = loglog_slope(x, val);
  s.expected_sort_slope = loglog_slope(x, model);
  s.total_within_soft = s.slope_total <= kSoftTotalSlope;
  s.sort_within_band = std::abs(s.slope_sort - s.expected_sort_slope) <= kSortSlopeBand;
  s.total_within_hard = s.slope_total <= kHardTotalSlope;
  return s;
}

}  // namespace hullwrap
