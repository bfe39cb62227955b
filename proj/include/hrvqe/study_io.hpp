#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hrvqe/studies.hpp"

namespace hrvqe {

nlohmann::json selfcheck_to_json(const StudyResult& r);

/// UTC time as YYYYMMDDTHHMMSSZ.
std::string utc_timestamp();

/// Creates `<parent>/<prefix>_<timestamp>` (with a numeric suffix when the
/// name is taken) and returns it.
std::filesystem::path make_run_directory(const std::filesystem::path& parent, const std::string& prefix);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Writes results.csv, manifest.json, selfcheck.json, timing.json and the
/// extra CSVs. `config` is embedded in the manifest under "config".
std::filesystem::path write_study(const StudyResult& r, const std::filesystem::path& parent,
                                  const nlohmann::json& config);

}  // namespace hrvqe
