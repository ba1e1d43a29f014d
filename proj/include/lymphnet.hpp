#pragma once

#include "lymphnet/types.hpp"
#include "lymphnet/random.hpp"
#include "lymphnet/geometry.hpp"
#include "lymphnet/scaling.hpp"
#include "lymphnet/sim.hpp"
#include "lymphnet/scenario.hpp"
#include "lymphnet/config.hpp"
#include "lymphnet/csv.hpp"
