#pragma once

#include <stdexcept>
#include <string>

namespace escan {

// All recoverable failures surface as one of these; the CLI maps them to
// exit code 2 (data error).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error {
    using Error::Error;
};

// Triple violates the relation domain/range table or the storage format.
struct TypingError : Error {
    using Error::Error;
};

struct DuplicateDocError : Error {
    using Error::Error;
};

struct UnknownDocError : Error {
    using Error::Error;
};

struct MissingIndexError : Error {
    using Error::Error;
};

// A measure description was too thin to bind every required template node.
struct MissingConceptError : Error {
    using Error::Error;
};

struct EmptyGoldError : Error {
    using Error::Error;
};

struct EmptyManualError : Error {
    using Error::Error;
};

// Neither token of a compared phrase has an embedding, so the distance
// fallback cannot run.
struct OutOfVocabularyError : Error {
    using Error::Error;
};

}  // namespace escan
