#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "gsnn/network.hpp"

namespace gsnn {

/// Versioned binary container: magic "GSNN", u32 format version, then
/// tagged sections (PARM, REGY, NEUR, SYNS) and a trailing CRC32.
/// Writes are atomic (temp file + rename).
void save_snapshot(const Network& net, const std::string& path);

/// Load a snapshot written by save_snapshot. Throws IoError naming the
/// failed section on version mismatch, truncation or corruption.
Network load_snapshot(const std::string& path);

/// Lossless JSON dump of the full snapshot contents (debug export).
nlohmann::json snapshot_debug_json(const Network& net);

}  // namespace gsnn
