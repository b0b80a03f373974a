#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsnn/common.hpp"

namespace gsnn {

/// Fired neuron indices for one simulation step (ascending order).
struct RasterStep {
  double t_ms = 0.0;
  std::vector<NeuronId> fired;
};

/// Spike raster over a run: one entry per step.
using Raster = std::vector<RasterStep>;

/// Export as CSV rows `time_ms,neuron_id` (spikes only).
void write_raster_csv(const Raster& raster, const std::string& path);

}  // namespace gsnn
