#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace testutil {

inline std::filesystem::path temp_dir() {
  static std::filesystem::path dir = [] {
    std::random_device rd;
    auto p = std::filesystem::temp_directory_path() /
             ("driftgate-test-" + std::to_string(rd()));
    std::filesystem::create_directories(p);
    return p;
  }();
  return dir;
}

inline std::string write_file(const std::string& name,
                              const std::string& text) {
  const auto path = temp_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path.string();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
