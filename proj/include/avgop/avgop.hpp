#pragma once

// Umbrella header: averaging operators on finite metric measure spaces and
// the diagnostics built on them.

#include "avgop/space.hpp"
#include "avgop/operator.hpp"
#include "avgop/regularity.hpp"
#include "avgop/compactness.hpp"
#include "avgop/counterexample.hpp"
#include "avgop/battery.hpp"
