#pragma once

#include <stdexcept>
#include <string>

namespace limp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedLocation : public Error {
public:
    explicit UndefinedLocation(unsigned loc)
        : Error("undefined location l" + std::to_string(loc)), loc(loc) {}
    unsigned loc;
};

class OpenTerm : public Error {
public:
    using Error::Error;
};

class SortMismatch : public Error {
public:
    using Error::Error;
};

class WellFormedness : public Error {
public:
    using Error::Error;
};

class InputInvalid : public Error {
public:
    using Error::Error;
};

class NotAStep : public Error {
public:
    using Error::Error;
};

class DecompositionMismatch : public Error {
public:
    using Error::Error;
};

class EmptyGenerator : public Error {
public:
    using Error::Error;
};

}  // namespace limp
