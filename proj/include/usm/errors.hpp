#pragma once

#include <stdexcept>
#include <string>

namespace usm {

// One error type for the whole library so the CLI can map failures to
// exit codes without unwinding a taxonomy of exception classes.
enum class ErrorCode {
    Parse,            // malformed input text
    UnknownFunction,  // identifier used as a function but not in the catalogue
    Pole,             // evaluation at a pole / log of zero
    NonReal,          // eval_real produced a value with a large imaginary part
    ExcludedPoint,    // asec(0), acsc(0), oracle too close to a limit point
    Unsupported,      // construct outside the supported fragment
    Domain,           // bad interval, branch mismatch, domain straddles components
    NoTemplate,       // no substitution template matched
    Conflicting,      // several templates matched with incompatible parameters
    Unmapped,         // a variable-dependent block survived substitution
    NotRational,      // expression is not a ratio of polynomials in the parameter
    TablePath,        // radical shape present: route to the standard-form table
    NotInTable,       // radical shape not covered by the table
    Unintegrable,     // remainder left at maximum chain depth
    Divergent,        // definite integral has a divergent limit
    Precondition,     // caller violated an operation precondition
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, long offset = -1)
        : std::runtime_error(std::move(message)), code_(code), offset_(offset) {}

    ErrorCode code() const { return code_; }
    // Byte offset into the source text for parse errors, -1 otherwise.
    long offset() const { return offset_; }

private:
    ErrorCode code_;
    long offset_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message, long offset = -1) {
    throw Error(code, message, offset);
}

} // namespace usm
