#pragma once

#include <stdexcept>
#include <string>

namespace kinetiq {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define KINETIQ_DEFINE_ERROR(Name)                                  \
    struct Name : Error {                                           \
        explicit Name(const std::string& what) : Error(what) {}     \
    }

KINETIQ_DEFINE_ERROR(NonPositiveDefinite);
KINETIQ_DEFINE_ERROR(MissingPair);
KINETIQ_DEFINE_ERROR(BranchNonPositive);
KINETIQ_DEFINE_ERROR(DegenerateSorting);
KINETIQ_DEFINE_ERROR(ZeroModeAmbiguous);
KINETIQ_DEFINE_ERROR(AsymmetricGround);
KINETIQ_DEFINE_ERROR(TruncationOverflow);
KINETIQ_DEFINE_ERROR(LabelingFailed);
KINETIQ_DEFINE_ERROR(SingularComponent);
KINETIQ_DEFINE_ERROR(NoOccupancy);
KINETIQ_DEFINE_ERROR(LengthMismatch);
KINETIQ_DEFINE_ERROR(InvalidStochasticMatrix);
KINETIQ_DEFINE_ERROR(DegenerateFit);
KINETIQ_DEFINE_ERROR(InvalidInput);

#undef KINETIQ_DEFINE_ERROR

} // namespace kinetiq
