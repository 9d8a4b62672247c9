// Shared helpers for tests: scratch directories and tiny synthetic inputs.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "otmatch/embeddings.hpp"

namespace testutil {

class TempDir {
 public:
  explicit TempDir(const std::string& prefix) {
    std::random_device rd;
    std::ostringstream name;
    name << prefix << '-' << std::hex << rd() << rd();
    path_ = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Store with one pseudo-random unit-ish vector per token; deterministic in
// (seed, token order).
inline otmatch::EmbeddingStore random_store(const std::vector<std::string>& tokens,
                                            std::size_t dim, unsigned seed) {
  otmatch::EmbeddingStore store(dim);
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& tok : tokens) {
    std::vector<double> v(dim);
    double norm2 = 0.0;
    for (double& x : v) {
      x = gauss(rng);
      norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    store.insert(tok, std::move(v));
  }
  return store;
}

}  // namespace testutil
