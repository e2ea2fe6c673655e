#pragma once

#include <stdexcept>
#include <string>

namespace interlab {

// Base class for all interlab errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapacityExceeded : Error { using Error::Error; };
struct LabelError : Error { using Error::Error; };
struct KindError : Error { using Error::Error; };
struct GeometryError : Error { using Error::Error; };
struct SpaceError : Error { using Error::Error; };
struct LocalityError : Error { using Error::Error; };
struct IncompleteTable : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct SuperselectionViolation : Error { using Error::Error; };
struct NotMaximal : Error { using Error::Error; };
struct FormViolation : Error { using Error::Error; };
struct UnsupportedSupport : Error { using Error::Error; };
struct ConstraintInfeasible : Error { using Error::Error; };
struct ZeroProbabilityCondition : Error { using Error::Error; };
struct MapError : Error { using Error::Error; };
struct UnknownLabel : Error { using Error::Error; };
struct AnnotationError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

} // namespace interlab
