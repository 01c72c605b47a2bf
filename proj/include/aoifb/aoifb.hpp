#pragma once

#include "aoifb/aoi.hpp"
#include "aoifb/csv.hpp"
#include "aoifb/dp.hpp"
#include "aoifb/offline.hpp"
#include "aoifb/parallel.hpp"
#include "aoifb/policy_io.hpp"
#include "aoifb/region.hpp"
#include "aoifb/rng.hpp"
#include "aoifb/schedule_io.hpp"
#include "aoifb/sim.hpp"
#include "aoifb/types.hpp"
