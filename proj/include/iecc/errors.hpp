#pragma once

#include <stdexcept>
#include <string>

namespace iecc {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

/// The greedy search could not place enough words at the requested distance.
class ConstructionFailed : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// An adversary returned a mask that does not fit the message it was asked about.
class AdversaryProtocolError : public Error {
public:
    using Error::Error;
};

class UnknownWord : public Error {
public:
    using Error::Error;
};

class NonDeterministicMachine : public Error {
public:
    using Error::Error;
};

class SearchSpaceTooLarge : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace iecc
