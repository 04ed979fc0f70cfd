#pragma once

#include "tetforge/barrier.hpp"
#include "tetforge/driver.hpp"
#include "tetforge/error.hpp"
#include "tetforge/fixtures.hpp"
#include "tetforge/geometry.hpp"
#include "tetforge/mesh.hpp"
#include "tetforge/mesh_io.hpp"
#include "tetforge/metrics.hpp"
#include "tetforge/patch.hpp"
#include "tetforge/quality.hpp"
#include "tetforge/solver.hpp"
#include "tetforge/surface_constraint.hpp"
#include "tetforge/topology.hpp"
