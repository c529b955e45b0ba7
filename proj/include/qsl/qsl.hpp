#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "state.hpp"
#include "random.hpp"
#include "evolution.hpp"
#include "moments.hpp"
#include "metrics.hpp"
#include "bounds.hpp"
#include "speed_limits.hpp"
#include "harness.hpp"
#include "io.hpp"
