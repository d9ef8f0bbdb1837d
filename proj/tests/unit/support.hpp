#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "momentrec/core/audio_features.hpp"

namespace testing {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("momentrec-test-" + std::to_string(rd()) + "-" + std::to_string(++counter));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Returns the golden file's contents. With MOMENTREC_UPDATE_GOLDEN set, the
// file is rewritten from `actual` first.
inline std::string golden(const std::filesystem::path& p, const std::string& actual) {
  if (std::getenv("MOMENTREC_UPDATE_GOLDEN") != nullptr) write_file(p, actual);
  return slurp(p);
}

inline momentrec::AudioFeatures features_with(double danceability) {
  momentrec::AudioFeatures::Fields f;
  f.danceability = danceability;
  f.energy = 0.5;
  f.loudness = -8.0;
  f.duration_ms = 200000;
  return momentrec::AudioFeatures(f);
}

}  // namespace testing
