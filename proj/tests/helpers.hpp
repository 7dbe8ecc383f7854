#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

namespace testutil {

inline std::string fixture(const std::string& rel) {
  return std::string(LGB_SOURCE_DIR) + "/" + rel;
}

/// Scratch directory removed when the object goes out of scope.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      auto candidate = base / ("lgb_test_" + std::to_string(::getpid()) + "_" +
                               std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path = candidate;
        return;
      }
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name, const std::string& content) const {
    auto p = path / name;
    std::ofstream out(p);
    out << content;
    out.close();
    return p.string();
  }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

}  // namespace testutil
