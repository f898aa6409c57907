#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace hodge_transport {

// ---------------------------------------------------------------------------
// Error taxonomy. Every failure mode named by a module contract gets its own
// type so callers (and the CLI exit-code mapping) can tell them apart.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidInputError : public Error {
public:
    explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

class InvalidConfigError : public Error {
public:
    explicit InvalidConfigError(const std::string& msg) : Error(msg) {}
};

/// Kernel/nonzero separation could not be certified at the requested tolerance.
class GapFailureError : public Error {
public:
    GapFailureError(const std::string& msg, double below, double above)
        : Error(msg), eigenvalue_below(below), eigenvalue_above(above) {}
    double eigenvalue_below;  // largest eigenvalue classified as kernel
    double eigenvalue_above;  // smallest eigenvalue classified as nonzero
};

/// An eigenvalue sits too close to the resolvent contour.
class ContourViolationError : public Error {
public:
    ContourViolationError(const std::string& msg, double eigenvalue)
        : Error(msg), eigenvalue(eigenvalue) {}
    double eigenvalue;
};

/// Frame overlap nearly singular; polar transport is meaningless.
class TransportBreakdownError : public Error {
public:
    TransportBreakdownError(const std::string& msg, double sigma_min)
        : Error(msg), sigma_min(sigma_min) {}
    double sigma_min;
};

/// Fewer usable features/kernel directions than requested.
class RankDeficitError : public Error {
public:
    RankDeficitError(const std::string& msg, int requested, int available)
        : Error(msg), requested(requested), available(available) {}
    int requested;
    int available;
};

/// A selected representative cycle is (numerically) orthogonal to the kernel.
class DegenerateSelectionError : public Error {
public:
    DegenerateSelectionError(const std::string& msg, double residual_norm)
        : Error(msg), residual_norm(residual_norm) {}
    double residual_norm;
};

class ShortDiagramError : public Error {
public:
    ShortDiagramError(const std::string& msg, int time_index)
        : Error(msg), time_index(time_index) {}
    int time_index;
};

class UnsupportedRankError : public Error {
public:
    UnsupportedRankError(const std::string& msg, int rank)
        : Error(msg), rank(rank) {}
    int rank;
};

class InvalidFrameError : public Error {
public:
    InvalidFrameError(const std::string& msg, double defect)
        : Error(msg), defect(defect) {}
    double defect;
};

// ---------------------------------------------------------------------------
// Deterministic RNG. mt19937_64 drives everything, but the float mappings are
// spelled out here instead of using std::uniform_real_distribution /
// std::normal_distribution, whose outputs are implementation-defined. With
// these mappings, (config, seed) -> output is bit-stable.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (pair cached).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0,1] so the log is finite.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace hodge_transport
