#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hfl {

enum class ErrorKind {
  InvalidArgument,
  GeometryInfeasible,
  IoError,
  SchemaMismatch,
  DegenerateImage,
  PgmFormatError,
  NonPositiveTarget,
  UnknownVariable,
  SingularDesign,
  ColumnMismatch,
  ConstantColumn,
  EmptyInput,
  NonPositiveBase,
  ShapeMismatch,
  DivergenceDetected,
  TooFewListings,
  CollinearSentiment,
  MisalignedPredictions,
  SubsetTooSmall,
  ConfigError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::GeometryInfeasible: return "GeometryInfeasible";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::DegenerateImage: return "DegenerateImage";
    case ErrorKind::PgmFormatError: return "PgmFormatError";
    case ErrorKind::NonPositiveTarget: return "NonPositiveTarget";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::SingularDesign: return "SingularDesign";
    case ErrorKind::ColumnMismatch: return "ColumnMismatch";
    case ErrorKind::ConstantColumn: return "ConstantColumn";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NonPositiveBase: return "NonPositiveBase";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DivergenceDetected: return "DivergenceDetected";
    case ErrorKind::TooFewListings: return "TooFewListings";
    case ErrorKind::CollinearSentiment: return "CollinearSentiment";
    case ErrorKind::MisalignedPredictions: return "MisalignedPredictions";
    case ErrorKind::SubsetTooSmall: return "SubsetTooSmall";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Base of every error raised by the library. The kind is the stable,
// machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class PgmFormatError : public Error {
 public:
  PgmFormatError(const std::string& message, std::size_t offset)
      : Error(ErrorKind::PgmFormatError, message + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class SingularDesignError : public Error {
 public:
  explicit SingularDesignError(std::vector<std::string> columns)
      : Error(ErrorKind::SingularDesign, "collinear columns: " + join(columns)),
        columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  static std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out += ", ";
      out += names[i];
    }
    return out;
  }

  std::vector<std::string> columns_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(int epoch)
      : Error(ErrorKind::DivergenceDetected,
              "loss became non-finite in epoch " + std::to_string(epoch)),
        epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace hfl
