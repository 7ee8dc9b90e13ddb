/**
 * @file snapshot.hpp
 * @brief Binary snapshot files and trajectory directories.
 *
 * Snapshot layout (all little-endian):
 *
 *     "OBS1"            4 bytes magic
 *     version           u16 (currently 1)
 *     mode              u8  (0 = one obstacle, 1 = two obstacles)
 *     n                 u64
 *     R, t, eps         3 x f64
 *     u, w, v           3 x n x f64
 *     crc               u32, CRC-32 of every preceding byte
 *
 * A trajectory directory holds `snap_NNNNNN.obs` per record, the effective
 * configuration as `effective.cfg`, and `manifest.txt` listing
 * `index time dissipation file` per record plus the configuration hash.
 */
#pragma once

#include "obstacle/grid.hpp"
#include "obstacle/penalty.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace obstacle {

struct Trajectory;

inline constexpr std::uint16_t kSnapshotVersion = 1;

struct Snapshot {
  ObstacleMode mode = ObstacleMode::One;
  double half_width = 0.0;
  double epsilon = 0.0;
  State state;
};

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap);
/// Throws FormatError on bad magic, version mismatch, truncation or CRC mismatch.
Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

/// CRC-32 (zlib polynomial) of a byte string; also used as the config hash.
std::uint32_t crc32_of(const void* data, std::size_t size);
std::string config_hash(const std::string& effective_config_text);

void export_trajectory(const Trajectory& traj, const std::string& dir);
/// Reads records bit-exactly and re-derives the energy ledger.
Trajectory import_trajectory(const std::string& dir);

}  // namespace obstacle
