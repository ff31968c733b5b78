#pragma once

// Streaming anomaly detection with adaptive Gaussian mixtures under
// concept drift: an unconstrained merging variant next to the classic
// capacity-capped baseline, plus a PCA front-end, a synthetic drift
// generator, and the experiment protocols that exercise them.

#include "driftmix/config.hpp"
#include "driftmix/csv.hpp"
#include "driftmix/distance.hpp"
#include "driftmix/engine.hpp"
#include "driftmix/format.hpp"
#include "driftmix/harness.hpp"
#include "driftmix/log.hpp"
#include "driftmix/merge.hpp"
#include "driftmix/pca.hpp"
#include "driftmix/report.hpp"
#include "driftmix/snapshot.hpp"
#include "driftmix/stream.hpp"
#include "driftmix/types.hpp"
