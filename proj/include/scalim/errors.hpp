#pragma once

#include <stdexcept>
#include <string>

namespace scalim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define SCALIM_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string &what) : Error(#Name ": " + what) {}      \
  }

SCALIM_DEFINE_ERROR(InvalidArgument);
SCALIM_DEFINE_ERROR(NonFiniteIntegral);
SCALIM_DEFINE_ERROR(ToleranceUnreachable);
SCALIM_DEFINE_ERROR(RouteMismatch);
SCALIM_DEFINE_ERROR(ContractionOverflow);
SCALIM_DEFINE_ERROR(CutoffDependence);
SCALIM_DEFINE_ERROR(PreconditionViolated);
SCALIM_DEFINE_ERROR(NotDecomposable);
SCALIM_DEFINE_ERROR(NotAState);
SCALIM_DEFINE_ERROR(NotConditionalExpectation);
SCALIM_DEFINE_ERROR(NotIsometric);
SCALIM_DEFINE_ERROR(ConfigError);

#undef SCALIM_DEFINE_ERROR

} // namespace scalim
