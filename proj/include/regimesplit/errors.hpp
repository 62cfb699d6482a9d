#pragma once

#include <stdexcept>
#include <string>

namespace regimesplit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or arguments outside an operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A quadrature diverged, overflowed, or ran out of subdivisions.
class NonIntegrable : public Error {
public:
    using Error::Error;
};

/// A threshold puts (numerically) all of the mass on one side.
class DegenerateRegime : public Error {
public:
    using Error::Error;
};

class NotLogConcave : public Error {
public:
    using Error::Error;
};

class BracketFailure : public Error {
public:
    using Error::Error;
};

class EigenFailure : public Error {
public:
    using Error::Error;
};

class DegeneratePolygon : public Error {
public:
    using Error::Error;
};

/// A vertical cut leaves one side of a polygon with zero area.
class DegenerateCut : public Error {
public:
    using Error::Error;
};

}  // namespace regimesplit
