#pragma once

#include <stdexcept>
#include <string>

namespace binseq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BINSEQ_DECLARE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// problem
BINSEQ_DECLARE_ERROR(OverlapError);
BINSEQ_DECLARE_ERROR(IndexError);
BINSEQ_DECLARE_ERROR(EmptyMessageError);
BINSEQ_DECLARE_ERROR(LengthMismatchError);
BINSEQ_DECLARE_ERROR(ConfigError);

// spectral / sdp
BINSEQ_DECLARE_ERROR(NonConvergenceError);
BINSEQ_DECLARE_ERROR(InfeasibleRelaxationError);

// rounding
BINSEQ_DECLARE_ERROR(RankZeroError);
BINSEQ_DECLARE_ERROR(EmptyInterfererError);
BINSEQ_DECLARE_ERROR(DegenerateObjectiveError);

// baselines
BINSEQ_DECLARE_ERROR(ZeroScaleError);
BINSEQ_DECLARE_ERROR(ZeroSpectrumError);
BINSEQ_DECLARE_ERROR(DivergenceError);

// oracle
BINSEQ_DECLARE_ERROR(SizeLimitError);
BINSEQ_DECLARE_ERROR(NoFeasibleError);

#undef BINSEQ_DECLARE_ERROR

}  // namespace binseq
