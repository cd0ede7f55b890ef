#pragma once

#include <stdexcept>
#include <string>

namespace ias {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Hypermodel parameters violate a domain requirement (r = 0, nonpositive
// scale, nonpositive power base, ...).
class InvalidModel : public Error {
public:
    using Error::Error;
};

// An iterative solver exhausted its budget without meeting its tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

// Step control of the IVP integrator underflowed.
class IntegrationFailure : public Error {
public:
    using Error::Error;
};

// A numeric argument is outside the callee's domain (nonpositive variance,
// mismatched sizes, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A forward-map column has zero norm; the component is unidentifiable and
// sensitivity scaling is undefined for it.
class ZeroColumn : public Error {
public:
    using Error::Error;
};

// Noise covariance failed the SPD factorization.
class NotSpd : public Error {
public:
    using Error::Error;
};

// Increment graph has no free nodes.
class DegenerateGrid : public Error {
public:
    using Error::Error;
};

// The increment map lost full column rank (detected during factorization).
class RankDeficient : public Error {
public:
    using Error::Error;
};

// Noiseless signal is identically zero, so a relative noise level is undefined.
class DegenerateSignal : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class MissingArtifact : public Error {
public:
    using Error::Error;
};

}  // namespace ias
