#pragma once

#include <stdexcept>
#include <string>

namespace lcg {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inputs outside the documented domain, or a parameter tuple that cannot be
// realised (e.g. a projection that cannot respect the preimage bound).
class ParameterError : public Error {
public:
    using Error::Error;
};

// A lemma hypothesis (niceness, truncation, structural conditions) does not
// hold for the supplied coefficients, so the requested check is undefined.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace lcg
