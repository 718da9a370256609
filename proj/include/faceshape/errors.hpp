#pragma once

#include <stdexcept>
#include <string>

namespace faceshape {

/// Base of every error the library throws. `category()` is the stable,
/// machine-greppable tag the CLI prints as `error: <category>: <detail>`.
class Error : public std::runtime_error {
public:
  Error(std::string category, const std::string& detail)
      : std::runtime_error(detail), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

private:
  std::string category_;
};

class ParseError : public Error {
public:
  explicit ParseError(const std::string& detail) : Error("parse", detail) {}
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& detail) : Error("validation", detail) {}
};

class InvalidInput : public Error {
public:
  explicit InvalidInput(const std::string& detail) : Error("invalid-input", detail) {}
};

class DegenerateLandmarks : public Error {
public:
  explicit DegenerateLandmarks(const std::string& detail)
      : Error("degenerate-landmarks", detail) {}
};

class NoHairlineFound : public Error {
public:
  explicit NoHairlineFound(const std::string& detail) : Error("no-hairline", detail) {}
};

class NumericalFailure : public Error {
public:
  explicit NumericalFailure(const std::string& detail) : Error("numerical", detail) {}
};

class ModelFormatError : public Error {
public:
  explicit ModelFormatError(const std::string& detail) : Error("model-format", detail) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& detail) : Error("io", detail) {}
};

class GenerationFailed : public Error {
public:
  explicit GenerationFailed(const std::string& detail) : Error("generation-failed", detail) {}
};

} // namespace faceshape
