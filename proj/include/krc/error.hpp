#ifndef KRC_ERROR_HPP
#define KRC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace krc {

/// Malformed input: bad ranking, dimension mismatch, out-of-range label, ...
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inputs are well-formed but the requested configuration cannot be satisfied
/// (e.g. more clusters than distinct rankings, too few retained users).
class InfeasibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An enumeration oracle or generator hit its configured size/retry cap.
class CapExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace krc

#endif
