/**
 * @file vexan.hpp
 * @brief Umbrella header.
 */
#pragma once

#include "vexan/exponent.hpp"
#include "vexan/discretize.hpp"
#include "vexan/norms.hpp"
#include "vexan/maximal.hpp"
#include "vexan/operators.hpp"
#include "vexan/commutators.hpp"
#include "vexan/families.hpp"
#include "vexan/harness.hpp"
#include "vexan/config.hpp"
