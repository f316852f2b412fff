#pragma once

#include <stdexcept>
#include <string>

namespace specphen {

// Base class for every error the library raises on bad input or
// unsatisfiable preconditions. Internal logic faults use assert().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SPECPHEN_DEFINE_ERROR(Name) \
  struct Name : Error {             \
    using Error::Error;             \
  }

// panel ingest
SPECPHEN_DEFINE_ERROR(MissingColumn);
SPECPHEN_DEFINE_ERROR(NonNumericRate);
SPECPHEN_DEFINE_ERROR(InvalidRate);
SPECPHEN_DEFINE_ERROR(DuplicateYearForUnit);
SPECPHEN_DEFINE_ERROR(UnbalancedPanel);
SPECPHEN_DEFINE_ERROR(UnmatchedUnit);
SPECPHEN_DEFINE_ERROR(AmbiguousMatch);
SPECPHEN_DEFINE_ERROR(SeriesTooShort);

// spectral engine
SPECPHEN_DEFINE_ERROR(InvalidProportion);
SPECPHEN_DEFINE_ERROR(InvalidSpan);
SPECPHEN_DEFINE_ERROR(MismatchedUnitSets);

// bispectral engine
SPECPHEN_DEFINE_ERROR(EmptyDomain);

// clustering
SPECPHEN_DEFINE_ERROR(ZeroVarianceColumn);
SPECPHEN_DEFINE_ERROR(KExceedsUnits);
SPECPHEN_DEFINE_ERROR(EmptyClusterUnrecoverable);
SPECPHEN_DEFINE_ERROR(SingleCluster);

// breakpoints
SPECPHEN_DEFINE_ERROR(DegenerateInterval);
SPECPHEN_DEFINE_ERROR(SeriesTooShortForBreak);

// spatial statistics
SPECPHEN_DEFINE_ERROR(InvalidGeometry);
SPECPHEN_DEFINE_ERROR(ConstantValues);
SPECPHEN_DEFINE_ERROR(TooFewUnits);
SPECPHEN_DEFINE_ERROR(EmptyKeepSet);

// inference
SPECPHEN_DEFINE_ERROR(RankDeficientDesign);
SPECPHEN_DEFINE_ERROR(TooFewObservations);
SPECPHEN_DEFINE_ERROR(NotNested);
SPECPHEN_DEFINE_ERROR(LengthMismatch);
SPECPHEN_DEFINE_ERROR(ConstantInput);

// synthetic generators
SPECPHEN_DEFINE_ERROR(InvalidSpec);
SPECPHEN_DEFINE_ERROR(InvalidGrid);

// pipeline
SPECPHEN_DEFINE_ERROR(NoMatchingUnits);
SPECPHEN_DEFINE_ERROR(NonNumericProperty);
SPECPHEN_DEFINE_ERROR(ConfigError);

#undef SPECPHEN_DEFINE_ERROR

}  // namespace specphen
