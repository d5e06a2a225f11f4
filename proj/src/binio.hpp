#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include "minles/error.hpp"

namespace minles::detail {

// Native-endian binary files with an 8-byte magic and a format version.
class BinWriter {
 public:
  BinWriter(const std::string& path, const char* magic, std::uint32_t version) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
    char m[8] = {};
    std::memcpy(m, magic, std::min<std::size_t>(std::strlen(magic), 8));
    out_.write(m, 8);
    put(version);
  }
  template <class T>
  void put(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <class T>
  void put_vector(const std::vector<T>& v) {
    put<std::uint64_t>(v.size());
    if (!v.empty()) out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(sizeof(T) * v.size()));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class BinReader {
 public:
  BinReader(const std::string& path, const char* magic, std::uint32_t version) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open '" + path + "'");
    char m[8] = {}, want[8] = {};
    std::memcpy(want, magic, std::min<std::size_t>(std::strlen(magic), 8));
    in_.read(m, 8);
    if (!in_ || std::memcmp(m, want, 8) != 0) throw IoError("'" + path + "' is not a " + magic + " file");
    const auto v = get<std::uint32_t>();
    if (v != version) {
      throw IoError("'" + path + "' has unsupported format version " + std::to_string(v) + " (expected " +
                    std::to_string(version) + ")");
    }
  }
  template <class T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw IoError("'" + path_ + "' is truncated");
    return v;
  }
  template <class T>
  std::vector<T> get_vector(std::uint64_t limit = (1ull << 34)) {
    const auto n = get<std::uint64_t>();
    if (n > limit) throw IoError("'" + path_ + "' has an implausible array length");
    std::vector<T> v(n);
    if (n) in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(T) * n));
    if (!in_) throw IoError("'" + path_ + "' is truncated");
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    if (n > (1u << 20)) throw IoError("'" + path_ + "' has an implausible string length");
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) throw IoError("'" + path_ + "' is truncated");
    return s;
  }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace minles::detail
