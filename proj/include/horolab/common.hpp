#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace horolab {

// Absolute tolerance for geometric predicates.
inline constexpr double kGeomTol = 1e-9;
// Points closer to the sphere than this are rejected as boundary-degenerate.
inline constexpr double kBoundaryFloor = 1e-14;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic splitmix64-based generator, identical output on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1).
    double next_double() { return double(next_u64() >> 11) * (1.0 / 9007199254740992.0); }

    // Uniform in [a,b).
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    // Uniform integer in [0,n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

} // namespace horolab
