#include "hrvqe/study_io.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "hrvqe/errors.hpp"

namespace hrvqe {

namespace fs = std::filesystem;

nlohmann::json selfcheck_to_json(const StudyResult& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"expected", c.expected}});
  }
  return {{"study", r.name}, {"all_passed", r.all_passed()}, {"checks", checks}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path make_run_directory(const fs::path& parent, const std::string& prefix) {
  fs::create_directories(parent);
  const std::string base = prefix + "_" + utc_timestamp();
  fs::path dir = parent / base;
  for (int k = 1; !fs::create_directory(dir); ++k) dir = parent / fmt::format("{}-{}", base, k);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
}

fs::path write_study(const StudyResult& r, const fs::path& parent, const nlohmann::json& config) {
  const fs::path dir = make_run_directory(parent, r.name);
  nlohmann::json manifest = r.manifest;
  manifest["config"] = config;
  write_text(dir / "results.csv", r.results.to_csv());
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(dir / "selfcheck.json", selfcheck_to_json(r).dump(2) + "\n");
  write_text(dir / "timing.json", nlohmann::json{{"wall_seconds", r.wall_seconds}}.dump(2) + "\n");
  for (const auto& [name, csv] : r.extras) write_text(dir / name, csv);
  return dir;
}

}  // namespace hrvqe
