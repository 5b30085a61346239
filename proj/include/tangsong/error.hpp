#pragma once

#include <stdexcept>
#include <string>

namespace tangsong {

/// Data-level failure (bad input file, broken invariant, unresolvable id).
/// The CLI maps these to exit status 2; usage problems are handled by the
/// argument parser and exit with status 1.
class Error : public std::runtime_error {
public:
    explicit Error(std::string message) : std::runtime_error(std::move(message)) {}
};

} // namespace tangsong
