#pragma once

#include <stdexcept>
#include <string>

namespace gitta {

// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad caller input: empty corpus, ratio out of range, missing slot assignment.
class input_error : public error {
public:
    using error::error;
};

// Grammar text that is malformed or uses Tracery features we do not model.
class unsupported_grammar_error : public error {
public:
    using error::error;
};

// A broken internal invariant (non-derivable child, oscillating fixpoint).
class invariant_error : public error {
public:
    using error::error;
};

}  // namespace gitta
