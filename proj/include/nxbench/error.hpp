#pragma once

#include <stdexcept>
#include <string>

namespace nxbench {

/// Base class of every error raised by the workbench. The CLI maps
/// UsageError to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FeedRejectedError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class DivergedError : public TrainingError {
 public:
  DivergedError(int epoch, const std::string& what)
      : TrainingError(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class TaskMismatchError : public LoadError {
 public:
  using LoadError::LoadError;
};

class BuildError : public Error {
 public:
  using Error::Error;
};

}  // namespace nxbench
