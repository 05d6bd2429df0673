#ifndef SKILLMINER_COMMON_H_
#define SKILLMINER_COMMON_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace skillminer {

// Broad error categories. The CLI maps each one to its own exit code.
enum class ErrorKind {
  kInput,    // bad or missing input file, malformed record
  kConfig,   // invalid parameter value
  kState,    // stage-order violation, missing artifact
  kData,     // data unusable for the requested operation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

const char *error_kind_name(ErrorKind kind);

using Rng = std::mt19937_64;

// Derives an independent seed for a named sub-stream from the top-level
// seed, so that every module draws from its own reproducible generator.
uint64_t derive_seed(uint64_t seed, std::string_view stream);

// Same, for indexed sub-streams (one per tree, per worker, ...).
uint64_t derive_seed(uint64_t seed, std::string_view stream, uint64_t index);

// 64-bit FNV-1a.
uint64_t fingerprint(std::string_view data);

// Whole-file helpers; failures raise Error(kInput).
std::string read_file(const std::string &path);
void write_file(const std::string &path, std::string_view content);

// Shortest decimal text that reads back to exactly the same double.
std::string format_double(double value);

}  // namespace skillminer

#endif  // SKILLMINER_COMMON_H_
