#pragma once

#include "pirep/numerics.hpp"

#include <cstdint>
#include <random>

namespace pirep {

/// Deterministic stream keyed by (master seed, stream index). Values depend
/// only on the key, never on scheduling, so trials can run in any order.
class Rng {
public:
    explicit Rng(std::uint64_t master, std::uint64_t stream = 0);

    std::uint64_t bits() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform on {lo, ..., hi}.
    Index integer(Index lo, Index hi);
    bool coin() { return (bits() >> 63) != 0; }
    double normal();
    cplx complex_normal();

    /// Entries are independent standard complex Gaussians.
    CMatrix gaussian(Index rows, Index cols);
    /// Haar-distributed unitary from the QR of a Gaussian matrix.
    CMatrix unitary(Index n);
    /// rows x cols with the given singular values (padded with zeros).
    CMatrix with_singular_values(Index rows, Index cols, const RVector& values);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace pirep
