#pragma once

#include <filesystem>

#include "acrom/io.hpp"
#include "acrom/mesh.hpp"
#include "acrom/offline.hpp"
#include "acrom/pod.hpp"
#include "acrom/rom.hpp"

namespace acrom::io {

/// SHA-256 of the mesh's text form.
std::string mesh_hash(const Mesh& mesh);

nlohmann::json config_to_json(const OfflineConfig& cfg);
OfflineConfig config_from_json(const nlohmann::json& j);

void save_snapshots(const std::filesystem::path& path, const SnapshotSet& s);
SnapshotSet load_snapshots(const std::filesystem::path& path);
/// Hash identifying a snapshot file's payload.
std::string snapshot_hash(const std::filesystem::path& path);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

void save_basis(const std::filesystem::path& path, const PodBasis& b);
PodBasis load_basis(const std::filesystem::path& path);

void save_trajectory(const std::filesystem::path& path, const RomTrajectory& t, const nlohmann::json& meta);
RomTrajectory load_trajectory(const std::filesystem::path& path);

}  // namespace acrom::io
