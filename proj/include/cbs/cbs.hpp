#pragma once

// Umbrella header for the CBS model-fitting library.

#include "cbs/affinity.hpp"
#include "cbs/bench.hpp"
#include "cbs/common.hpp"
#include "cbs/dataset.hpp"
#include "cbs/io.hpp"
#include "cbs/kernels.hpp"
#include "cbs/metrics.hpp"
#include "cbs/pipeline.hpp"
#include "cbs/rng.hpp"
#include "cbs/sampler.hpp"
#include "cbs/scale.hpp"
#include "cbs/spectral.hpp"
#include "cbs/synthetic.hpp"
