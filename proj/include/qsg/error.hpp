#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsg {

// Base for every error raised by the library. The CLI maps subclasses onto
// exit codes (usage 2, resource cap 3, malformed input 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// popcount(d) != x, or x outside [0, N].
class CardinalityError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class ResourceCapError : public Error {
public:
    ResourceCapError(std::size_t required, std::size_t available, const std::string& what)
        : Error(what + ": requires " + std::to_string(required) + " qubits, cap is " +
                std::to_string(available)),
          required_(required),
          available_(available) {}

    std::size_t required() const { return required_; }
    std::size_t available() const { return available_; }

private:
    std::size_t required_;
    std::size_t available_;
};

class MalformedInput : public Error {
public:
    MalformedInput(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Postselection onto a pattern that carries no probability mass.
class EmptyBranch : public Error {
public:
    using Error::Error;
};

}  // namespace qsg
