#pragma once

#include <stdexcept>
#include <string>

namespace parasdc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PARASDC_DECLARE_ERROR(Name)              \
  class Name : public Error {                    \
   public:                                       \
    explicit Name(const std::string& what_arg)   \
        : Error(#Name ": " + what_arg) {}        \
  }

PARASDC_DECLARE_ERROR(InvalidArgument);
PARASDC_DECLARE_ERROR(DimensionMismatch);
PARASDC_DECLARE_ERROR(SingularMatrix);
PARASDC_DECLARE_ERROR(ZeroPivot);
PARASDC_DECLARE_ERROR(ConvergenceFailure);
PARASDC_DECLARE_ERROR(DefectiveMatrix);
PARASDC_DECLARE_ERROR(UnsupportedNodeCount);
PARASDC_DECLARE_ERROR(NonpositiveDiagonal);
PARASDC_DECLARE_ERROR(MinimizationFailed);
PARASDC_DECLARE_ERROR(NewtonDivergence);
PARASDC_DECLARE_ERROR(NotLinear);
PARASDC_DECLARE_ERROR(ExactSolutionUnavailable);
PARASDC_DECLARE_ERROR(ImaginaryResidue);

#undef PARASDC_DECLARE_ERROR

}  // namespace parasdc
