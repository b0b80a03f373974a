#include "gsnn/raster.hpp"

#include <fstream>

namespace gsnn {

void write_raster_csv(const Raster& raster, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write raster CSV: " + path);
  out << "time_ms,neuron_id\n";
  out.precision(17);
  for (const auto& step : raster)
    for (NeuronId id : step.fired) out << step.t_ms << ',' << id << '\n';
  if (!out) throw IoError("error writing raster CSV: " + path);
}

}  // namespace gsnn
