#pragma once

#include <stdexcept>
#include <string>

namespace rwrc {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define RWRC_DECLARE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(what) {}        \
  }

RWRC_DECLARE_ERROR(NonAdjacent);
RWRC_DECLARE_ERROR(DomainError);
RWRC_DECLARE_ERROR(RangeExceeded);
RWRC_DECLARE_ERROR(ConfigError);
RWRC_DECLARE_ERROR(HorizonTooShort);
RWRC_DECLARE_ERROR(NoRegenerationFound);
RWRC_DECLARE_ERROR(NoJointLevelFound);
RWRC_DECLARE_ERROR(InsufficientRecords);
RWRC_DECLARE_ERROR(GridTooShort);
RWRC_DECLARE_ERROR(ConsistencyError);
RWRC_DECLARE_ERROR(EmptySample);
RWRC_DECLARE_ERROR(DegenerateSample);
RWRC_DECLARE_ERROR(NonPositiveValue);

#undef RWRC_DECLARE_ERROR

}  // namespace rwrc
