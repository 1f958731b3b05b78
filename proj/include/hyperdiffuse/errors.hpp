#pragma once

#include <stdexcept>
#include <string>

namespace hyperdiffuse {

// Error hierarchy. Everything derives from Error so callers can catch the
// whole family; the concrete types exist so tests and the CLI can tell
// structural, data and numerical failures apart.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : Error { using Error::Error; };
struct EmptyHyperedge : Error { using Error::Error; };
struct WeightOutOfRange : Error { using Error::Error; };
struct DegenerateFeatures : Error { using Error::Error; };
struct VertexCountMismatch : Error { using Error::Error; };

struct NonFiniteRho : Error { using Error::Error; };

struct DimensionMismatch : Error { using Error::Error; };
struct SizeCapExceeded : Error { using Error::Error; };

struct ShapeMismatch : Error { using Error::Error; };
struct EmptyMask : Error { using Error::Error; };

struct KTooLarge : Error { using Error::Error; };
struct BoundViolation : Error { using Error::Error; };

struct ConfigError : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };
struct NumericalError : Error { using Error::Error; };

}  // namespace hyperdiffuse
