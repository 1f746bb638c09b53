#pragma once

#include "adaffect/types.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace adaffect {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Writes content atomically: temp file in the target directory + rename.
void atomic_write_file(const std::string& path, const std::string& content);

/// FNV-1a-64 digest of the file bytes, as 16 hex digits.
std::string file_digest(const std::string& path);

/// Run manifest: effective config, its hash, input digests, tool version.
/// Contains nothing volatile so that reruns are byte-identical.
struct RunManifest {
    std::string subcommand;
    nlohmann::json config; // effective parameters, flags merged over file
    std::map<std::string, std::string> inputs; // path -> digest

    nlohmann::json to_json() const;
    void write(const std::string& out_dir) const;
};

/// Serializes `doc` (with schema_version injected) atomically to `path`.
void write_artifact(const std::string& path, nlohmann::json doc);

} // namespace adaffect
