#pragma once

#include "cfisac/config.hpp"
#include "cfisac/estimation.hpp"
#include "cfisac/geometry.hpp"
#include "cfisac/performance.hpp"

namespace cfisac {

geo::DeployConfig deploy_config(const ExperimentConfig& cfg);
geo::CorrConfig corr_config(const ExperimentConfig& cfg);

// Grid with the CP length derived from the configured delay spread.
dd::DDGridSpec derive_grid(const ExperimentConfig& cfg);

/**
 * Full per-scenario statistics for the OTFS system with embedded-pilot MMSE
 * estimation: per (p, q, i) the pair (R, B), the sensing-beam covariances
 * pointed at the hotspot center, and the target/clutter statistics at the
 * scenario's target position. perfect_csi replaces every B by R.
 */
perf::SystemStats build_stats_otfs(const geo::Scenario& sc, const ExperimentConfig& cfg);

// Same statistics with the block-type OFDM pilot model: users share pilot_len
// orthogonal pilots round-robin, co-pilot users contaminate Psi, and the
// pre-log switches to the per-symbol form. Paths are shared with the OTFS
// build for the same scenario (same physical channel).
perf::SystemStats build_stats_ofdm(const geo::Scenario& sc, const ExperimentConfig& cfg);

}  // namespace cfisac
