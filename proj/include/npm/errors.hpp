#pragma once

#include <stdexcept>
#include <string>

namespace npm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures
struct RankDeficient : Error {
    using Error::Error;
};
struct NotSymmetric : Error {
    using Error::Error;
};
struct NotOrthonormal : Error {
    using Error::Error;
};
struct NearSingular : Error {
    using Error::Error;
};
struct EigFailed : Error {
    using Error::Error;
};
struct CrossGramSingular : Error {
    using Error::Error;
};
struct ResolventSingular : Error {
    using Error::Error;
};
struct Uncontrollable : Error {
    using Error::Error;
};
struct Unobservable : Error {
    using Error::Error;
};

// File ingestion
struct ParseError : Error {
    using Error::Error;
};
struct ShapeError : Error {
    using Error::Error;
};

}  // namespace npm
