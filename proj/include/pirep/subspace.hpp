#pragma once

#include "pirep/numerics.hpp"

namespace pirep {

/// A subspace of C^n stored as an orthonormal column frame. The empty
/// subspace has a frame with zero columns.
class Subspace {
public:
    Subspace() = default;

    /// Takes ownership of a frame that must already be orthonormal.
    static Subspace from_frame(CMatrix frame, const Tolerance& tol);
    /// Column span of arbitrary vectors, rank-truncated.
    static Subspace span_of(const CMatrix& columns, const Tolerance& tol);
    static Subspace whole(Index ambient);
    static Subspace zero(Index ambient);

    Index ambient_dim() const { return frame_.rows(); }
    Index dim() const { return frame_.cols(); }
    bool empty() const { return frame_.cols() == 0; }
    const CMatrix& frame() const { return frame_; }
    CMatrix projector() const { return frame_ * frame_.adjoint(); }

private:
    explicit Subspace(CMatrix frame) : frame_(std::move(frame)) {}

    CMatrix frame_ = CMatrix(0, 0);
};

/// Smallest subspace containing both.
Subspace join(const Subspace& a, const Subspace& b, const Tolerance& tol);

/// a ∩ b, read off the kernel of the stacked complements [(I - Pa); (I - Pb)].
Subspace intersect(const Subspace& a, const Subspace& b, const Tolerance& tol);

Subspace ortho_complement(const Subspace& s);

/// a ⊖ b for b ⊆ a.
Subspace ominus(const Subspace& a, const Subspace& b, const Tolerance& tol);

/// ||(I - P_b) F_a||.
double inclusion_residual(const Subspace& a, const Subspace& b);

bool is_subset(const Subspace& a, const Subspace& b, const Tolerance& tol);

/// ||P_a P_b||; zero exactly when the subspaces are orthogonal.
double overlap(const Subspace& a, const Subspace& b);

/// ||(I - P_target) a F_source||; a(source) ⊆ target iff this is ~0.
double invariance_residual(const CMatrix& a, const Subspace& source, const Subspace& target);

/// R(m F_s).
Subspace image(const CMatrix& m, const Subspace& s, const Tolerance& tol);

Subspace range_of(const CMatrix& m, const Tolerance& tol);
Subspace kernel_of(const CMatrix& m, const Tolerance& tol);

} // namespace pirep
