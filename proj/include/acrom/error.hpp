#pragma once

#include <stdexcept>
#include <string>

namespace acrom {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error { using Error::Error; };
class ResolutionError : public Error { using Error::Error; };
class TopologyError : public Error { using Error::Error; };
class InvariantError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class RankError : public Error { using Error::Error; };

/// Linear solver breakdown; `time` is the last simulation time that completed.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_good_time = 0.0)
      : Error(what), last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

class IoError : public Error { using Error::Error; };
class FormatError : public IoError { using IoError::IoError; };
class VersionError : public FormatError { using FormatError::FormatError; };
class HashMismatchError : public FormatError { using FormatError::FormatError; };
class ConfigError : public Error { using Error::Error; };

/// Raised by CLI stages when an upstream artifact is absent.
class MissingArtifactError : public Error { using Error::Error; };

}  // namespace acrom
