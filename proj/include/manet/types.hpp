#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace manet {

using NodeId = std::uint32_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MANET_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

// reputation
MANET_DEFINE_ERROR(CounterViolation);
MANET_DEFINE_ERROR(NoPunishmentPending);
MANET_DEFINE_ERROR(EmptySamples);
MANET_DEFINE_ERROR(DuplicateNode);
// routing
MANET_DEFINE_ERROR(BrokenReversePath);
MANET_DEFINE_ERROR(NotOnRoute);
MANET_DEFINE_ERROR(InvalidRoute);
// engine / groups
MANET_DEFINE_ERROR(NotASquare);
MANET_DEFINE_ERROR(UnsupportedK);
MANET_DEFINE_ERROR(InvalidConfig);
// metrics / cli
MANET_DEFINE_ERROR(CountInversion);
MANET_DEFINE_ERROR(MissingColumns);

#undef MANET_DEFINE_ERROR

/// Config file errors carry the offending line (1-based, 0 when not tied to a line).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  int line_;
};

class UnknownKey : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class MalformedValue : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace manet
