#pragma once

#include <iosfwd>
#include <string>

#include "poolnet/trainer.hpp"

namespace poolnet {

enum class ProjectionRows { All, Lucky, None };

/// Long-format CSV with header `step,layer,loss,filter,pattern,projection`.
/// Loss rows leave filter/pattern/projection empty; projection rows leave
/// loss empty. Layer 1 is the filter loop (or joint training), layer 2 the
/// readout loop.
void write_telemetry_csv(std::ostream& out, const TrainRun& run,
                         ProjectionRows rows = ProjectionRows::All);

/// JSON object with the configuration, regime checks, split sizes, lucky-set
/// sizes, final losses and timings of a run.
std::string run_manifest_json(const TrainRun& run);

}  // namespace poolnet
