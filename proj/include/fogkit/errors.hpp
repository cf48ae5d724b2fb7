#pragma once

#include <stdexcept>
#include <string>

namespace fogkit {

// Base class for every error the library raises on bad input or a violated
// precondition. The CLI maps these to exit code 1; anything else is internal.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FOGKIT_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  };

FOGKIT_DEFINE_ERROR(FormatError)
FOGKIT_DEFINE_ERROR(IntegrityError)
FOGKIT_DEFINE_ERROR(InsufficientData)
FOGKIT_DEFINE_ERROR(RangeError)
FOGKIT_DEFINE_ERROR(RateError)
FOGKIT_DEFINE_ERROR(AlignmentError)
FOGKIT_DEFINE_ERROR(NotFound)
FOGKIT_DEFINE_ERROR(ChannelError)
FOGKIT_DEFINE_ERROR(SpecError)
FOGKIT_DEFINE_ERROR(LengthError)
FOGKIT_DEFINE_ERROR(DomainError)
FOGKIT_DEFINE_ERROR(LabelError)
FOGKIT_DEFINE_ERROR(ClassError)
FOGKIT_DEFINE_ERROR(FoldError)

#undef FOGKIT_DEFINE_ERROR

}  // namespace fogkit
