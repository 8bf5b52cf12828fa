#pragma once

#include <stdexcept>
#include <string>

namespace fracstab {

inline constexpr const char* version = "0.1.0";

// Base class for all toolkit failures. Every error carries a short machine
// readable kind tag so CLI layers can map failures onto exit codes without
// string matching on messages.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Invalid argument ranges (alpha outside (0,1], beta <= 0, t < 0, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error("DomainError", msg) {}
};

// A series or iteration failed to meet its tail bound within the term cap.
class NonConvergence : public Error {
public:
    explicit NonConvergence(const std::string& msg) : Error("NonConvergence", msg) {}
};

// |arg z| is within the configured angular tolerance of alpha*pi/2, where the
// asymptotic branch split is unreliable.
class SectorBoundary : public Error {
public:
    explicit SectorBoundary(const std::string& msg) : Error("SectorBoundary", msg) {}
};

// Eigenvector basis too ill-conditioned to apply a spectral formula.
class DefectiveMatrix : public Error {
public:
    explicit DefectiveMatrix(const std::string& msg) : Error("DefectiveMatrix", msg) {}
};

// Result magnitude left the representable range (or would poison a quadrature).
class Overflow : public Error {
public:
    explicit Overflow(const std::string& msg) : Error("Overflow", msg) {}
};

// Root bracketing failed: predicate has no sign change on the given interval.
class NoBracket : public Error {
public:
    explicit NoBracket(const std::string& msg) : Error("NoBracket", msg) {}
};

// Fit window contains too few trajectory nodes.
class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& msg) : Error("InsufficientData", msg) {}
};

// An adaptive quadrature could not reach its tolerance.
class QuadratureFailure : public Error {
public:
    explicit QuadratureFailure(const std::string& msg) : Error("QuadratureFailure", msg) {}
};

} // namespace fracstab
