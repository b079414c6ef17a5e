#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cognav {

// Base for all throwing failures. `path()` is a machine-readable locator
// (JSON pointer-ish for schema errors, entity id otherwise, may be empty).
class Error : public std::runtime_error {
 public:
  Error(std::string message, std::string path)
      : std::runtime_error(path.empty() ? message : message + " (at " + path + ")"),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Input documents that do not match the expected shape.
class SchemaError : public Error {
 public:
  using Error::Error;
  explicit SchemaError(std::string message) : Error(std::move(message), "") {}
};

// Structurally valid input with impossible geometry (inverted boxes, boxes
// outside the mapped extent, duplicate ids).
class GeometryError : public Error {
 public:
  using Error::Error;
  explicit GeometryError(std::string message) : Error(std::move(message), "") {}
};

// Occupancy grids that cannot support any navigation.
class GridError : public Error {
 public:
  using Error::Error;
  explicit GridError(std::string message) : Error(std::move(message), "") {}
};

// Invalid or contradictory configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
  explicit ConfigError(std::string message) : Error(std::move(message), "") {}
};

// Landmark selection found no candidates after exclusions.
class EmptySelectionError : public Error {
 public:
  explicit EmptySelectionError(std::string message) : Error(std::move(message), "") {}
};

// Bearing of a zero-length ground displacement is undefined.
class ZeroVectorError : public Error {
 public:
  explicit ZeroVectorError(std::string message) : Error(std::move(message), "") {}
};

// All pairwise distances vanish; no affinity scale exists.
class DegenerateGeometryError : public Error {
 public:
  explicit DegenerateGeometryError(std::string message) : Error(std::move(message), "") {}
};

// A point with zero total affinity makes the normalized Laplacian undefined.
class SingularDegreeError : public Error {
 public:
  using Error::Error;
  explicit SingularDegreeError(std::string message) : Error(std::move(message), "") {}
};

// A start or goal cell is blocked.
class BlockedEndpointError : public Error {
 public:
  using Error::Error;
  explicit BlockedEndpointError(std::string message) : Error(std::move(message), "") {}
};

// No navigable cell within the snap radius of a world point.
class SnapFailureError : public Error {
 public:
  using Error::Error;
  explicit SnapFailureError(std::string message) : Error(std::move(message), "") {}
};

// Rejection sampling gave up after the configured number of tries.
class ExhaustedSamplingError : public Error {
 public:
  explicit ExhaustedSamplingError(std::string message) : Error(std::move(message), "") {}
};

// A value fell outside its documented domain (e.g. path length vs strata).
class OutOfRangeError : public Error {
 public:
  using Error::Error;
  explicit OutOfRangeError(std::string message) : Error(std::move(message), "") {}
};

// A plan step names a landmark absent from the map.
class UnknownLandmarkError : public Error {
 public:
  using Error::Error;
  explicit UnknownLandmarkError(std::string message) : Error(std::move(message), "") {}
};

// A semantic reference matches more than one landmark.
class AmbiguousSemanticError : public Error {
 public:
  using Error::Error;
  explicit AmbiguousSemanticError(std::string message) : Error(std::move(message), "") {}
};

// Every step of a chain failed to decode.
class EmptyDecodedChainError : public Error {
 public:
  explicit EmptyDecodedChainError(std::string message) : Error(std::move(message), "") {}
};

// A log-prob record declares no critical spans.
class EmptySpansError : public Error {
 public:
  using Error::Error;
  explicit EmptySpansError(std::string message) : Error(std::move(message), "") {}
};

}  // namespace cognav
