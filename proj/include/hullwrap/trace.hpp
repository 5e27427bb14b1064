#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hullwrap/surface_mesh.hpp"

namespace hullwrap {

enum class StepAction { Initial, Inserted, Deferred, SkippedSharedFacet };

inline std::string_view to_string(StepAction a) {
  switch (a) {
    case StepAction::Initial: return "INITIAL";
    case StepAction::Inserted: return "INSERTED";
    case StepAction::Deferred: return "DEFERRED";
    case StepAction::SkippedSharedFacet: return "SKIPPED_SHARED_FACET";
  }
  return "UNKNOWN";
}

inline constexpr PointId kNoPoint = static_cast<PointId>(-1);

/// One event of a contraction run. Metric, volume and area describe the
/// surface after the event; the deltas are set only for insertions.
struct StepRecord {
  std::size_t k = 0;  // insertions performed so far
  std::size_t pass = 0;
  PointId point = kNoPoint;
  Facet facet{};
  StepAction action = StepAction::Initial;
  bool coplanar = false;
  double metric = 0.0;
  double hausdorff = 0.0;
  double volume = 0.0;
  double area = 0.0;
  double volume_delta = 0.0;  // enclosed volume removed by the split
  double area_delta = 0.0;    // surface area added by the split
};

struct ContractionTrace {
  std::vector<StepRecord> steps;               // steps[0] is the initial state
  std::vector<std::vector<Facet>> snapshots;   // initial mesh + one per insertion, when requested
  Point3 volume_origin;

  std::size_t insertion_count() const {
    std::size_t n = 0;
    for (const auto& s : steps) n += s.action == StepAction::Inserted;
    return n;
  }
};

}  // namespace hullwrap
