#pragma once

#include <stdexcept>
#include <string>

namespace trihelm
{

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

#define TRIHELM_DEFINE_ERROR(Name)                                             \
  class Name : public Error                                                    \
  {                                                                            \
  public:                                                                      \
    using Error::Error;                                                        \
  }

TRIHELM_DEFINE_ERROR(AlignmentError);
TRIHELM_DEFINE_ERROR(GeometryError);
TRIHELM_DEFINE_ERROR(DegenerateTriangle);
TRIHELM_DEFINE_ERROR(UnisolvencyError);
TRIHELM_DEFINE_ERROR(UnsupportedDegree);
TRIHELM_DEFINE_ERROR(DimensionMismatch);
TRIHELM_DEFINE_ERROR(NotConverged);
TRIHELM_DEFINE_ERROR(NotSPD);
TRIHELM_DEFINE_ERROR(LevelMismatch);
TRIHELM_DEFINE_ERROR(ConfigError);

#undef TRIHELM_DEFINE_ERROR

} // namespace trihelm
