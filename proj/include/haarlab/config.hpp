#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace haarlab {

/// Raised when an argument lies outside the mathematical domain of an
/// operation (invalid tree index, point outside [0,1), level above the cap).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Raised when a documented precondition between arguments does not hold
/// (e.g. a fork transform applied at an index that is not admissible).
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kDefaultMaxLevel = 20;
// Quadrature allocates 2^level cells; positions are stored in 64 bits.
inline constexpr int kHardMaxLevel = 30;

namespace detail {

inline int read_level_cap() {
  const char* raw = std::getenv("HAARLAB_MAX_LEVEL");
  if (raw == nullptr || *raw == '\0') return kDefaultMaxLevel;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || value < 1 || value > kHardMaxLevel) {
    throw DomainError("HAARLAB_MAX_LEVEL must be an integer in [1, " +
                      std::to_string(kHardMaxLevel) + "], got '" + raw + "'");
  }
  return static_cast<int>(value);
}

}  // namespace detail

/// Largest tree level / dyadic resolution accepted anywhere in the library.
/// Read once from HAARLAB_MAX_LEVEL, otherwise kDefaultMaxLevel.
inline int max_level() {
  static const int cap = detail::read_level_cap();
  return cap;
}

inline void require_level(int level, const char* what) {
  if (level < 0 || level > max_level()) {
    throw DomainError(std::string(what) + ": level " + std::to_string(level) +
                      " exceeds the level cap " + std::to_string(max_level()));
  }
}

}  // namespace haarlab
