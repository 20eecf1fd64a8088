#pragma once

#include <stdexcept>
#include <string>

namespace tcgp {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical method failed to converge or two independent routes disagreed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Configuration rejected by schema or range validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw DomainError(message);
}

}  // namespace detail

}  // namespace tcgp
