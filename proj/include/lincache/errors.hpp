#pragma once

#include <stdexcept>
#include <string>

namespace lincache {

// Base for every error the library raises. Callers that only care about
// "this input is unusable" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

// A requested linear combination does not exist (row-space containment failed).
class Infeasible : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace lincache
