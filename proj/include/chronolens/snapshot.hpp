#pragma once

#include <filesystem>
#include <optional>

#include "chronolens/archive.hpp"

namespace chronolens {

/// Writes `<dir>/snapshot/` atomically: the files go to `snapshot.tmp`, the
/// previous snapshot is moved to `snapshot.old`, the new one is renamed into
/// place, then the old one is removed. Throws SnapshotError on I/O failure.
void save_snapshot(const ArchiveState& state, const std::filesystem::path& dir);

/// Loads `<dir>/snapshot/`, falling back to `snapshot.old` when a crash
/// interrupted the swap. Returns nullopt when neither exists.
std::optional<ArchiveState> load_snapshot(const std::filesystem::path& dir);

/// The snapshot files of one state, keyed by file name.
std::map<std::string, std::string> serialize_snapshot(const ArchiveState& state);
ArchiveState deserialize_snapshot(const std::map<std::string, std::string>& files);

} // namespace chronolens
