#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hullwrap/error.hpp"
#include "hullwrap/geom_core.hpp"

namespace hullwrap {

struct GeneratorSpec {
  std::string name;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  std::string str() const { return name + "(" + std::to_string(n) + "," + std::to_string(seed) + ")"; }
};

inline constexpr std::string_view kGenerators[] = {"ball-uniform", "sphere-shell", "gaussian-blob", "two-lobes"};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
std::optional<T> parse_positive(std::string_view s) {
  s = trim(s);
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || v == 0) return std::nullopt;
  return v;
}

// Uniform double in [0,1) from the top 53 bits; stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  Point3 in_ball() {
    for (;;) {
      const Point3 p{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
      if (squared_norm(p) <= 1.0) return p;
    }
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace detail

/// Parses `name(n,seed)` or `name(n)`; the second form takes `default_seed`.
inline GeneratorSpec parse_generator(std::string_view text, std::optional<std::uint64_t> default_seed = std::nullopt) {
  const auto fail = [&](const std::string& why) {
    return Error(ErrorKind::Config, "bad generator spec '" + std::string(text) + "': " + why);
  };
  const std::string_view s = detail::trim(text);
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') throw fail("expected name(n,seed)");
  GeneratorSpec spec;
  spec.name = std::string(detail::trim(s.substr(0, open)));
  bool known = false;
  for (std::string_view g : kGenerators) known = known || g == spec.name;
  if (!known) throw fail("unknown generator '" + spec.name + "'");

  const std::string_view args = s.substr(open + 1, s.size() - open - 2);
  const auto comma = args.find(',');
  const auto n = detail::parse_positive<std::size_t>(args.substr(0, comma));
  if (!n) throw fail("n must be a positive integer");
  spec.n = *n;
  if (comma == std::string_view::npos) {
    if (!default_seed) throw fail("missing seed");
    spec.seed = *default_seed;
  } else {
    const auto seed = detail::parse_positive<std::uint64_t>(args.substr(comma + 1));
    if (!seed) throw fail("seed must be a positive integer");
    spec.seed = *seed;
  }
  return spec;
}

/// Deterministic sample for a generator spec.
inline std::vector<Point3> generate_points(const GeneratorSpec& spec) {
  detail::Rng rng(spec.seed);
  std::vector<Point3> pts;
  pts.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (spec.name == "ball-uniform") {
      pts.push_back(rng.in_ball());
    } else if (spec.name == "sphere-shell") {
      Point3 v{};
      double len = 0.0;
      while (!(len > 1e-6)) {
        v = {rng.normal(), rng.normal(), rng.normal()};
        len = norm(v);
      }
      pts.push_back(v * (1.0 / len));
    } else if (spec.name == "gaussian-blob") {
      pts.push_back({rng.normal(), rng.normal(), rng.normal()});
    } else if (spec.name == "two-lobes") {
      const double shift = rng.uniform() < 0.5 ? -1.25 : 1.25;
      pts.push_back(rng.in_ball() + Point3{shift, 0.0, 0.0});
    } else {
      throw Error(ErrorKind::Config, "unknown generator '" + spec.name + "'");
    }
  }
  return pts;
}

}  // namespace hullwrap
