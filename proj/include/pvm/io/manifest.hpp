#pragma once

// JSON run manifest plus atomic file output helpers.

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#ifndef PVM_VERSION
#define PVM_VERSION "0.1.0"
#endif

namespace pvm::io {

namespace fs = std::filesystem;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `path` through a sibling temporary file and a rename, so readers
/// never see a partially written file.
inline void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write " + tmp.string());
    body(out);
    out.flush();
    if (!out) throw OutputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw OutputError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline void write_atomic(const fs::path& path, const std::string& content) {
  write_atomic(path, [&](std::ostream& os) { os << content; });
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw OutputError("cannot create output directory " + dir.string());
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunEntry {
  std::string case_label;
  std::string filter;
  std::string directory;
  std::string termination;
  std::string diagnostic;
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> case_labels;
  std::vector<std::string> filter_kinds;
  std::string tool_version = PVM_VERSION;
  std::string started_at;
  std::string finished_at;
  std::string status = "running";
  int exit_code = -1;
  std::vector<RunEntry> runs;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config_path"] = config_path;
    j["output_dir"] = output_dir;
    j["case_labels"] = case_labels;
    j["filter_kinds"] = filter_kinds;
    j["tool_version"] = tool_version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at.empty() ? nlohmann::json(nullptr) : nlohmann::json(finished_at);
    j["status"] = status;
    j["exit_code"] = exit_code < 0 ? nlohmann::json(nullptr) : nlohmann::json(exit_code);
    auto& runs_j = j["runs"] = nlohmann::json::array();
    for (const auto& r : runs)
      runs_j.push_back({{"case", r.case_label},
                        {"filter", r.filter},
                        {"directory", r.directory},
                        {"termination", r.termination},
                        {"diagnostic", r.diagnostic}});
    return j;
  }

  void write(const fs::path& dir) const {
    write_atomic(dir / "manifest.json", to_json().dump(2) + "\n");
  }
};

}  // namespace pvm::io
