#pragma once

#include <stdexcept>
#include <string>

namespace semscene {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad configuration value (schedule length, empty priors, unknown preset, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset problems: empty corpus, missing files, malformed records.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Array/grid dimension mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Out-of-bounds pixel or element access.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Category index outside the palette.
class CategoryError : public Error {
 public:
  using Error::Error;
};

/// Diffusion timestep outside [1, T].
class StepError : public Error {
 public:
  using Error::Error;
};

/// Probability vector is not a valid distribution.
class DistributionError : public Error {
 public:
  using Error::Error;
};

/// Instance mask empty or inconsistent with its map.
class InstanceError : public Error {
 public:
  using Error::Error;
};

/// Degenerate polygon, off-boundary span, missing floor pixels.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Asset retrieval failed (empty category).
class RetrievalError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint version/palette mismatch or condition kind not supported
/// by the checkpoint's training mode.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

/// File I/O failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace semscene
