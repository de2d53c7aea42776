#pragma once

#include <stdexcept>
#include <string>

namespace qmpemba {

// Every library failure derives from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

// Correlation matrix outside the fermionic range 0 <= C <= 1, or non-Hermitian.
class PhysicalityError : public Error {
public:
    using Error::Error;
};

// Biorthogonality defect of the eigensystem exceeded its threshold.
class DefectiveEigensystem : public Error {
public:
    using Error::Error;
};

class NoUniqueSteadyState : public Error {
public:
    using Error::Error;
};

// The imaginary-gauge propagator does not apply to this generator.
class GaugeUnavailable : public Error {
public:
    using Error::Error;
};

class StepSizeUnderflow : public Error {
public:
    using Error::Error;
};

class SizeLimitExceeded : public Error {
public:
    using Error::Error;
};

class NotTranslationInvariant : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace qmpemba
