#pragma once

#include <stdexcept>
#include <string>

namespace ftr {

enum class Errc {
  InvalidLength,
  InvalidScale,
  InvalidCoefficients,
  UnknownFamily,
  InvalidCount,
  EmptyEnsemble,
  IndexMismatch,
  DegenerateSample,
  InvalidFeatures,
  CalibrationFailed,
  SelectionFailed,
  DataError,
  FormatError,
  ParseError,
  InvalidProtocol,
  ConfigMismatch,
  ConfigError,
  IoError,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::InvalidLength: return "InvalidLength";
    case Errc::InvalidScale: return "InvalidScale";
    case Errc::InvalidCoefficients: return "InvalidCoefficients";
    case Errc::UnknownFamily: return "UnknownFamily";
    case Errc::InvalidCount: return "InvalidCount";
    case Errc::EmptyEnsemble: return "EmptyEnsemble";
    case Errc::IndexMismatch: return "IndexMismatch";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::InvalidFeatures: return "InvalidFeatures";
    case Errc::CalibrationFailed: return "CalibrationFailed";
    case Errc::SelectionFailed: return "SelectionFailed";
    case Errc::DataError: return "DataError";
    case Errc::FormatError: return "FormatError";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidProtocol: return "InvalidProtocol";
    case Errc::ConfigMismatch: return "ConfigMismatch";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ftr
