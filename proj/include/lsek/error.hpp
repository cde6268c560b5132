#pragma once

#include <stdexcept>
#include <string>

namespace lsek {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input-side failures. The CLI maps these to exit code 2.

/// A required input file or directory could not be opened.
class IngestError : public Error {
public:
    using Error::Error;
};

/// Input was readable but malformed.
class FormatError : public Error {
public:
    using Error::Error;
};

// Computation-side failures. The CLI maps these to exit code 1.

/// A numeric quantity left its domain (e.g. ln of a nonpositive edge integral).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A caller broke a documented precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Not enough members of some class to build stratified folds.
class StratificationError : public Error {
public:
    using Error::Error;
};

}  // namespace lsek
