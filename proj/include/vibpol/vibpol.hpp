#pragma once

#include "vibpol/units.hpp"
#include "vibpol/grid.hpp"
#include "vibpol/molecule.hpp"
#include "vibpol/cavity.hpp"
#include "vibpol/hermite.hpp"
#include "vibpol/propagator.hpp"
#include "vibpol/field_stats.hpp"
#include "vibpol/dense_oracle.hpp"
#include "vibpol/snapshot.hpp"
#include "vibpol/scenario.hpp"
#include "vibpol/runner.hpp"
#include "vibpol/reports.hpp"
