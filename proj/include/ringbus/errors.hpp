#pragma once

#include <stdexcept>
#include <string>

namespace ringbus {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// The two taps carry no transmission at this frequency.
class DecoupledPortsError : public Error {
public:
    explicit DecoupledPortsError(const std::string& what) : Error(what) {}
};

class NoRootInBracketError : public Error {
public:
    explicit NoRootInBracketError(const std::string& what) : Error(what) {}
};

class PoleInBracketError : public Error {
public:
    explicit PoleInBracketError(const std::string& what) : Error(what) {}
};

class UnachievableError : public Error {
public:
    explicit UnachievableError(const std::string& what) : Error(what) {}
};

class DimensionOverflowError : public Error {
public:
    explicit DimensionOverflowError(const std::string& what) : Error(what) {}
};

class AmbiguousLabelError : public Error {
public:
    explicit AmbiguousLabelError(const std::string& what) : Error(what) {}
};

class NonConvergenceError : public Error {
public:
    explicit NonConvergenceError(const std::string& what) : Error(what) {}
};

class UnderdeterminedSystemError : public Error {
public:
    explicit UnderdeterminedSystemError(const std::string& what) : Error(what) {}
};

class SinglePeakError : public Error {
public:
    explicit SinglePeakError(const std::string& what) : Error(what) {}
};

class FitDivergedError : public Error {
public:
    explicit FitDivergedError(const std::string& what) : Error(what) {}
};

class ResonantDenominatorError : public Error {
public:
    explicit ResonantDenominatorError(const std::string& what) : Error(what) {}
};

class UnresolvedCoefficientError : public Error {
public:
    explicit UnresolvedCoefficientError(const std::string& what) : Error(what) {}
};

class NoPathError : public Error {
public:
    explicit NoPathError(const std::string& what) : Error(what) {}
};

class MultiplePathsError : public Error {
public:
    explicit MultiplePathsError(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

} // namespace ringbus
