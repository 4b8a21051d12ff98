#pragma once

#include <stdexcept>
#include <string>

namespace toxel {

/// Base class for every error raised by the library. Each subclass maps to a
/// distinct process exit code in the command-line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class BoundsError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class DtypeError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class ShapeError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class ParameterError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class FormatError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class PlacementError : public Error {
 public:
  PlacementError(const std::string& what, long attempts)
      : Error(what), attempts_(attempts) {}
  long attempts() const noexcept { return attempts_; }
  int exit_code() const noexcept override { return 5; }

 private:
  long attempts_;
};

class CapacityError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 6; }
};

class LabelError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 7; }
};

}  // namespace toxel
