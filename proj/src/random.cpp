#include "pirep/random.hpp"

#include "pirep/errors.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>

namespace pirep {

Rng::Rng(std::uint64_t master, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double Rng::uniform()
{
    return static_cast<double>(bits() >> 11) * 0x1.0p-53;
}

Index Rng::integer(Index lo, Index hi)
{
    if (hi < lo)
        fail(ErrorKind::usage, "empty integer range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Rejection keeps the draw unbiased and platform independent.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = bits();
    while (x >= limit)
        x = bits();
    return lo + static_cast<Index>(x % span);
}

// Box-Muller rather than std::normal_distribution, whose output differs between
// standard library implementations.
double Rng::normal()
{
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u = uniform();
    while (u <= 0.0)
        u = uniform();
    const double v = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * std::numbers::pi * v;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

cplx Rng::complex_normal()
{
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

CMatrix Rng::gaussian(Index rows, Index cols)
{
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = complex_normal();
    return m;
}

CMatrix Rng::unitary(Index n)
{
    if (n == 0)
        return CMatrix(0, 0);
    const CMatrix g = gaussian(n, n);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0.0)
            q.col(j) *= r(j, j) / a;
    }
    return q;
}

CMatrix Rng::with_singular_values(Index rows, Index cols, const RVector& values)
{
    const Index k = std::min(rows, cols);
    if (values.size() > k)
        fail(ErrorKind::dimension, "more singular values than the shape allows");
    const CMatrix u = unitary(rows);
    const CMatrix v = unitary(cols);
    CMatrix s = CMatrix::Zero(rows, cols);
    for (Index i = 0; i < values.size(); ++i)
        s(i, i) = values(i);
    return u * s * v.adjoint();
}

} // namespace pirep
