#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace subriemann {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class TransversalityError : public Error {
public:
    using Error::Error;
};

class NotAdaptedError : public Error {
public:
    using Error::Error;
};

class DegenerateBundleError : public Error {
public:
    using Error::Error;
};

class EscapeError : public Error {
public:
    EscapeError(const std::string& what, std::vector<double> exit_point)
        : Error(what), exit(std::move(exit_point)) {}
    std::vector<double> exit;
};

class IntegrabilityError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class SignLogicError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class BoundaryMismatchError : public Error {
public:
    using Error::Error;
};

class ExtrapolationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace subriemann
