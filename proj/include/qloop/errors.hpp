#pragma once
#include <stdexcept>
#include <string>

namespace qloop {

// Base of every library error; the CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define QLOOP_ERROR(Name)                         \
  struct Name : Error {                           \
    explicit Name(const std::string& what)        \
        : Error(std::string(#Name ": ") + what) {} \
  }

QLOOP_ERROR(DegenerateInput);
QLOOP_ERROR(ShapeMismatch);
QLOOP_ERROR(InconsistentParams);
QLOOP_ERROR(PositionOutOfRange);
QLOOP_ERROR(NonUniqueSolution);
QLOOP_ERROR(NoSolution);
QLOOP_ERROR(NonGenericFailure);
QLOOP_ERROR(ModelUnsupported);
QLOOP_ERROR(CapacityExceeded);
QLOOP_ERROR(BrokenPath);
QLOOP_ERROR(EdgeNotOnPath);
QLOOP_ERROR(MissingValue);
QLOOP_ERROR(TailObstruction);
QLOOP_ERROR(NonPositiveCoupling);

#undef QLOOP_ERROR

}  // namespace qloop
