#pragma once

#include <stdexcept>
#include <string>

namespace rank1lab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// stage data requested beyond explicit stages of a rule-less spec
struct MissingStage : Error {
    int stage;
    explicit MissingStage(int s)
        : Error("no stage " + std::to_string(s) + " and no generator rule"), stage(s) {}
};

struct UnknownPreset : Error {
    explicit UnknownPreset(const std::string& name) : Error("unknown preset: " + name) {}
};

// a query needs set data beyond the certified window
struct InsufficientTruncation : Error {
    using Error::Error;
};

// truncation bound failed to clear the window within the stage cap
struct NonTerminating : Error {
    using Error::Error;
};

struct DepthCapExceeded : Error {
    using Error::Error;
};

struct SearchExhausted : Error {
    using Error::Error;
};

struct ConditionViolated : Error {
    int stage;
    ConditionViolated(const std::string& what, int s) : Error(what), stage(s) {}
};

struct ParseError : Error {
    using Error::Error;
};

struct InvariantViolation : Error {
    using Error::Error;
};

}  // namespace rank1lab
