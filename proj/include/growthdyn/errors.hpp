#ifndef GROWTHDYN_ERRORS_HPP_
#define GROWTHDYN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace growthdyn {

// Base class for all domain errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define GROWTHDYN_DEFINE_ERROR(NAME)            \
    class NAME : public Error {                 \
    public:                                     \
        using Error::Error;                     \
    }

// Distribution fitting
GROWTHDYN_DEFINE_ERROR(InsufficientData);
GROWTHDYN_DEFINE_ERROR(NonFiniteInput);
GROWTHDYN_DEFINE_ERROR(DegenerateSample);

// Panel construction
GROWTHDYN_DEFINE_ERROR(UnbalancedPanel);
GROWTHDYN_DEFINE_ERROR(NonPositiveValue);
GROWTHDYN_DEFINE_ERROR(DuplicateRecord);
GROWTHDYN_DEFINE_ERROR(EmptyPeriod);

// Scaling and convergence estimation
GROWTHDYN_DEFINE_ERROR(TooFewObservations);
GROWTHDYN_DEFINE_ERROR(ZeroVolatilityBin);
GROWTHDYN_DEFINE_ERROR(NoConvergence);

// Moving windows
GROWTHDYN_DEFINE_ERROR(WindowTooLong);

// Synthetic generator
GROWTHDYN_DEFINE_ERROR(InvalidSpec);

// CSV ingestion and run configuration
GROWTHDYN_DEFINE_ERROR(SchemaError);
GROWTHDYN_DEFINE_ERROR(JoinError);
GROWTHDYN_DEFINE_ERROR(ParseError);
GROWTHDYN_DEFINE_ERROR(InvalidConfig);
GROWTHDYN_DEFINE_ERROR(IoError);

#undef GROWTHDYN_DEFINE_ERROR

}  // namespace growthdyn

#endif  // GROWTHDYN_ERRORS_HPP_
