#include "pirep/subspace.hpp"

#include "pirep/errors.hpp"

#include <string>

namespace pirep {

namespace {

void require_same_ambient(const Subspace& a, const Subspace& b, const char* op)
{
    if (a.ambient_dim() != b.ambient_dim())
        fail(ErrorKind::dimension, std::string(op) + ": ambient dimensions " + std::to_string(a.ambient_dim())
                                       + " and " + std::to_string(b.ambient_dim()) + " differ");
}

} // namespace

Subspace Subspace::from_frame(CMatrix frame, const Tolerance& tol)
{
    require_finite(frame, "subspace frame");
    if (frame.cols() > frame.rows())
        fail(ErrorKind::dimension, "subspace frame has more columns than rows");
    if (frame.cols() > 0) {
        const CMatrix gap = frame.adjoint() * frame - CMatrix::Identity(frame.cols(), frame.cols());
        // The Frobenius norm bounds the operator norm, so the SVD is rarely needed.
        if (gap.norm() > tol.eq_rel && op_norm(gap) > tol.eq_rel)
            fail(ErrorKind::domain, "subspace frame is not orthonormal");
    }
    return Subspace(std::move(frame));
}

Subspace Subspace::span_of(const CMatrix& columns, const Tolerance& tol)
{
    return Subspace(range_frame(columns, tol));
}

Subspace Subspace::whole(Index ambient)
{
    return Subspace(CMatrix::Identity(ambient, ambient));
}

Subspace Subspace::zero(Index ambient)
{
    return Subspace(CMatrix(ambient, 0));
}

Subspace join(const Subspace& a, const Subspace& b, const Tolerance& tol)
{
    require_same_ambient(a, b, "join");
    CMatrix cols(a.ambient_dim(), a.dim() + b.dim());
    cols << a.frame(), b.frame();
    return Subspace::span_of(cols, tol);
}

Subspace intersect(const Subspace& a, const Subspace& b, const Tolerance& tol)
{
    require_same_ambient(a, b, "intersect");
    const Index n = a.ambient_dim();
    if (a.empty() || b.empty())
        return Subspace::zero(n);
    const CMatrix id = CMatrix::Identity(n, n);
    CMatrix stacked(2 * n, n);
    stacked << id - a.projector(), id - b.projector();
    return Subspace::from_frame(kernel_frame(stacked, tol), tol);
}

Subspace ortho_complement(const Subspace& s)
{
    return Subspace::from_frame(orthonormal_complement(s.frame()), Tolerance{});
}

Subspace ominus(const Subspace& a, const Subspace& b, const Tolerance& tol)
{
    require_same_ambient(a, b, "ominus");
    if (!is_subset(b, a, tol))
        fail(ErrorKind::domain, "ominus: second subspace is not contained in the first");
    return Subspace::span_of(a.projector() - b.projector(), tol);
}

double inclusion_residual(const Subspace& a, const Subspace& b)
{
    require_same_ambient(a, b, "inclusion");
    if (a.empty())
        return 0.0;
    const CMatrix& fa = a.frame();
    const CMatrix& fb = b.frame();
    return op_norm(fa - fb * (fb.adjoint() * fa));
}

bool is_subset(const Subspace& a, const Subspace& b, const Tolerance& tol)
{
    return inclusion_residual(a, b) <= tol.incl_abs;
}

double overlap(const Subspace& a, const Subspace& b)
{
    require_same_ambient(a, b, "overlap");
    if (a.empty() || b.empty())
        return 0.0;
    return op_norm(a.frame().adjoint() * b.frame());
}

Subspace image(const CMatrix& m, const Subspace& s, const Tolerance& tol)
{
    if (m.cols() != s.ambient_dim())
        fail(ErrorKind::dimension, "image: operator has " + std::to_string(m.cols())
                                       + " columns but subspace lives in dimension " + std::to_string(s.ambient_dim()));
    if (s.empty())
        return Subspace::zero(m.rows());
    return Subspace::span_of(m * s.frame(), tol);
}

Subspace range_of(const CMatrix& m, const Tolerance& tol)
{
    return Subspace::span_of(m, tol);
}

Subspace kernel_of(const CMatrix& m, const Tolerance& tol)
{
    return Subspace::from_frame(kernel_frame(m, tol), tol);
}

double invariance_residual(const CMatrix& a, const Subspace& source, const Subspace& target)
{
    if (a.cols() != source.ambient_dim() || a.rows() != target.ambient_dim())
        fail(ErrorKind::dimension, "operator does not map the source space into the target space");
    if (source.empty())
        return 0.0;
    const CMatrix moved = a * source.frame();
    if (target.empty())
        return op_norm(moved);
    const CMatrix& t = target.frame();
    return op_norm(moved - t * (t.adjoint() * moved));
}

} // namespace pirep
