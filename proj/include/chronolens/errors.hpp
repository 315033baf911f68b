#pragma once

#include <stdexcept>
#include <string>

namespace chronolens {

/// Base of every error raised by the library. `code()` is the stable,
/// machine-readable name that also appears in API error bodies.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

#define CHRONOLENS_ERROR(Name)                                                 \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& message) : Error(#Name, message) {}       \
  }

CHRONOLENS_ERROR(MalformedTimestamp);
CHRONOLENS_ERROR(MalformedInput);
CHRONOLENS_ERROR(EmptyTrainingSet);
CHRONOLENS_ERROR(EmptyQuery);
CHRONOLENS_ERROR(UnknownEntity);
CHRONOLENS_ERROR(InvalidSpan);
CHRONOLENS_ERROR(ConfigError);
CHRONOLENS_ERROR(SnapshotError);

#undef CHRONOLENS_ERROR

} // namespace chronolens
