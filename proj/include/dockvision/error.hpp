#pragma once

#include <stdexcept>
#include <string>

namespace dockvision {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration / sweep documents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Image decode/encode failures; the message names the file.
class ImageIoError : public Error {
 public:
  using Error::Error;
};

/// The pose solver could not produce a usable pose.
class PoseError : public Error {
 public:
  enum class Kind { kConditioning, kNoPose };

  PoseError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace dockvision
