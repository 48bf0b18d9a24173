#pragma once

// Umbrella header for the sw-TLE kernel-regression transfer-learning library.

#include "swtle/adjust.hpp"
#include "swtle/bandwidth.hpp"
#include "swtle/baselines.hpp"
#include "swtle/csv.hpp"
#include "swtle/curve.hpp"
#include "swtle/errors.hpp"
#include "swtle/estimators.hpp"
#include "swtle/experiments.hpp"
#include "swtle/kernel.hpp"
#include "swtle/math.hpp"
#include "swtle/nls.hpp"
#include "swtle/realdata.hpp"
#include "swtle/rng.hpp"
#include "swtle/sample.hpp"
#include "swtle/svg.hpp"
