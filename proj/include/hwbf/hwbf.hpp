#pragma once

#include "hwbf/bridge.hpp"
#include "hwbf/contour.hpp"
#include "hwbf/core.hpp"
#include "hwbf/dataset.hpp"
#include "hwbf/densities.hpp"
#include "hwbf/diagnostics.hpp"
#include "hwbf/elicit.hpp"
#include "hwbf/evidence.hpp"
#include "hwbf/experiments.hpp"
#include "hwbf/linalg.hpp"
#include "hwbf/models.hpp"
#include "hwbf/parallel.hpp"
#include "hwbf/random.hpp"
#include "hwbf/sampler.hpp"
#include "hwbf/serialize.hpp"
#include "hwbf/synth.hpp"
