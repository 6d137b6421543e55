#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <stdlib.h>

#include "imli/data.hpp"

namespace testutil {

inline imli::RawDataset csv(const std::string &text, const std::string &label,
                            const std::string &pos, const imli::LoadOptions &opts = {}) {
  return imli::make_dataset(imli::parse_csv(text), label, pos, opts);
}

// Directory removed when the object dies.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "imli-test-XXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string &name) const { return (path / name).string(); }
};

inline void write_file(const std::string &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string fixture(const std::string &name) {
  return std::string(IMLI_SOURCE_DIR) + "/tests/fixtures/" + name;
}

inline std::string data_file(const std::string &name) {
  return std::string(IMLI_SOURCE_DIR) + "/data/" + name;
}

}  // namespace testutil
