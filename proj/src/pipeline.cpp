#include "adaffect/pipeline.hpp"

#include "adaffect/rng.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace adaffect {

void atomic_write_file(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ParseError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ParseError("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::string file_digest(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "' for digest");
    const std::string bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

nlohmann::json RunManifest::to_json() const
{
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["config"] = config;
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    j["config_hash"] = buf;
    j["inputs"] = inputs;
    return j;
}

void RunManifest::write(const std::string& out_dir) const
{
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    atomic_write_file((fs::path(out_dir) / "manifest.json").string(),
                      to_json().dump(2) + "\n");
}

void write_artifact(const std::string& path, nlohmann::json doc)
{
    doc["schema_version"] = kSchemaVersion;
    atomic_write_file(path, doc.dump(2) + "\n");
}

} // namespace adaffect
