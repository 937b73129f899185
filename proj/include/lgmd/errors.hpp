#pragma once

#include <stdexcept>
#include <string>

namespace lgmd {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// events
struct ParseError : Error {
    int line;
    ParseError(int line_no, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};
struct UnsortedTimestamps : Error {
    using Error::Error;
};
struct OutOfBounds : Error {
    using Error::Error;
};
struct DegenerateStimulus : Error {
    using Error::Error;
};
struct InvalidProbability : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};

// neuron / network
struct IndexError : Error {
    using Error::Error;
};
struct NumericalBlowup : Error {
    std::size_t neuron_index;
    NumericalBlowup(std::size_t index, const std::string& what)
        : Error(what), neuron_index(index) {}
};
struct ConfigError : Error {
    using Error::Error;
};

// objective
struct EmptyConfusion : Error {
    using Error::Error;
};
struct EmptySample : Error {
    using Error::Error;
};

// optimize
struct PopulationTooSmall : Error {
    using Error::Error;
};
struct IllConditioned : Error {
    using Error::Error;
};

// cli
struct IoError : Error {
    using Error::Error;
};

}  // namespace lgmd
