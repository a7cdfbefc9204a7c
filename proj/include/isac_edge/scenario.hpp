#pragma once

// JSON scenario files and JSON run reports.
//
// A scenario has four top-level keys: "system", "geometry", "tasks" and
// "seed", plus an optional "target_error". Scalars with a physical dB form
// may be given either linearly or with a suffix (`_dbm` for powers, `_db`
// for gains and SINR thresholds, `_deg` for angles), never both. Unknown
// keys are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "isac_edge/channels.hpp"
#include "isac_edge/model.hpp"
#include "isac_edge/pipeline.hpp"

namespace isac_edge {

struct Scenario {
  SystemConfig system;
  SceneGeometry geometry;
  std::uint64_t seed = 0;
  std::optional<double> target_error;

  ChannelSet channels() const { return build_channels(geometry, system, seed); }
};

/// Throws Error(Schema) for malformed JSON, unknown or missing keys and
/// wrong types, Error(InvalidArgument) for out-of-range values.
Scenario parse_scenario(std::string_view json_text);

/// Throws Error(Io) when the file cannot be read.
Scenario load_scenario(const std::string& path);

/// Pretty-printed, key-sorted JSON; identical inputs give identical bytes.
std::string report_to_json(const RunReport& report, const SystemConfig& cfg);

}  // namespace isac_edge
