#pragma once

#include <stdexcept>

namespace mtae {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };   // shape or rank mismatch
struct IndexError : Error { using Error::Error; };       // id/index out of range
struct ContractError : Error { using Error::Error; };    // API misuse (non-scalar loss, cross-tape mix, ...)
struct NumericError : Error { using Error::Error; };     // non-finite values where finite is required
struct VocabError : Error { using Error::Error; };       // symbol not present in a vocabulary
struct ParseError : Error { using Error::Error; };       // malformed file contents (carries line numbers)
struct FormatError : Error { using Error::Error; };      // header/schema mismatch
struct GrammarError : Error { using Error::Error; };     // word lists unusable for a template
struct DataError : Error { using Error::Error; };        // dataset-level problems
struct ConfigError : Error { using Error::Error; };      // invalid model or run configuration
struct CorruptionError : Error { using Error::Error; };  // checkpoint failed validation
struct InputError : Error { using Error::Error; };       // invalid arguments to an analysis routine

}  // namespace mtae
