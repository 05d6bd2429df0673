#include "skillminer/common.h"

#include <charconv>
#include <fstream>
#include <sstream>

namespace skillminer {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

const char *error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput: return "input error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kState: return "state error";
    case ErrorKind::kData: return "data error";
  }
  return "error";
}

uint64_t fingerprint(std::string_view data) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

uint64_t derive_seed(uint64_t seed, std::string_view stream) {
  return splitmix64(seed ^ splitmix64(fingerprint(stream)));
}

uint64_t derive_seed(uint64_t seed, std::string_view stream, uint64_t index) {
  return splitmix64(derive_seed(seed, stream) + splitmix64(index + 1));
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInput, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInput, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::kInput, "write failed for " + path);
}

std::string format_double(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace skillminer
