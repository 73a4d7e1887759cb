#pragma once

#include <stdexcept>
#include <string>

namespace selfnorm {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameters, block geometries, flag values, malformed interval sets.
// The CLI maps these to exit code 1.
struct config_error : error {
    explicit config_error(const std::string& what) : error(what) {}
};

// Malformed input data: chain files that fail validation, unreadable series
// files. Also exit code 1 territory.
struct data_error : error {
    explicit data_error(const std::string& what) : error(what) {}
};

// A self-normalizing denominator came out exactly zero. Deliberately distinct
// from NaN propagation: the simulation engine catches this per sample and
// books the sample in the `degenerate` column instead of dropping it.
struct degenerate_error : error {
    explicit degenerate_error(const std::string& what) : error(what) {}
};

// An exact expansion ran out of digits before the requested length; callers
// must never pad.  Exit code 2.
struct precision_error : error {
    explicit precision_error(const std::string& what) : error(what) {}
};

} // namespace selfnorm
