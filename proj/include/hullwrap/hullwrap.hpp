#pragma once

#include "hullwrap/aabb_tree.hpp"
#include "hullwrap/bench.hpp"
#include "hullwrap/contraction.hpp"
#include "hullwrap/convex_hull.hpp"
#include "hullwrap/error.hpp"
#include "hullwrap/generators.hpp"
#include "hullwrap/geom_core.hpp"
#include "hullwrap/mesh_io.hpp"
#include "hullwrap/point_cloud.hpp"
#include "hullwrap/report_json.hpp"
#include "hullwrap/surface_mesh.hpp"
#include "hullwrap/trace.hpp"
#include "hullwrap/validation.hpp"
