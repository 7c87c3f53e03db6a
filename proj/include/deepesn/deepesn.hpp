#pragma once

#include "deepesn/core.hpp"
#include "deepesn/config.hpp"
#include "deepesn/data.hpp"
#include "deepesn/experiment.hpp"
#include "deepesn/intrinsic_plasticity.hpp"
#include "deepesn/metrics.hpp"
#include "deepesn/random.hpp"
#include "deepesn/readout.hpp"
#include "deepesn/report.hpp"
#include "deepesn/reservoir.hpp"
#include "deepesn/selection.hpp"
#include "deepesn/spectral.hpp"
