#pragma once

#include <stdexcept>
#include <string>

namespace cbtau {

// Bad input: poles, resonances, degenerate weights, malformed parameters.
// The CLI maps these to exit code 2.
class ParamError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PoleError : public ParamError {
public:
    using ParamError::ParamError;
};

class DegenerateWeightError : public ParamError {
public:
    using ParamError::ParamError;
};

class ResonanceError : public ParamError {
public:
    using ParamError::ParamError;
};

// The 2x2 system of the two-charge fast scheme has a vanishing determinant.
class SingularSystemError : public ParamError {
public:
    using ParamError::ParamError;
};

// A series was asked for coefficients beyond the order it is trusted to.
class CutoffError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cbtau
