#pragma once

#include "setreg/altproj.hpp"
#include "setreg/battery.hpp"
#include "setreg/constants.hpp"
#include "setreg/errors.hpp"
#include "setreg/geometry.hpp"
#include "setreg/intersect.hpp"
#include "setreg/normal_cones.hpp"
#include "setreg/projections.hpp"
#include "setreg/regmap.hpp"
#include "setreg/rng.hpp"
#include "setreg/scenario.hpp"
#include "setreg/set_rep.hpp"
