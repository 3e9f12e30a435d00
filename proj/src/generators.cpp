#include "pirep/generators.hpp"

#include "pirep/errors.hpp"

#include <algorithm>

namespace pirep {

namespace {

size_t at(Index i)
{
    return static_cast<size_t>(i);
}

Index module_dim(const BlockShape& shape)
{
    Index n = 0;
    for (Index i = 0; i < shape.algebra.block_count(); ++i)
        for (Index j = 0; j < shape.algebra.block_count(); ++j)
            n += shape.mu[at(i)][at(j)] * shape.algebra.block_size(i) * shape.algebra.block_size(j);
    return n;
}

MultiplicityMatrix draw_mu(Rng& rng, const FdCStarAlgebra& alg, const ShapeLimits& limits)
{
    const Index r = alg.block_count();
    for (int attempt = 0; attempt < 200; ++attempt) {
        MultiplicityMatrix mu(at(r), std::vector<Index>(at(r), 0));
        Index n = 0;
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < r; ++j) {
                mu[at(i)][at(j)] = rng.integer(0, 2);
                n += mu[at(i)][at(j)] * alg.block_size(i) * alg.block_size(j);
            }
        if (n >= 1 && n <= limits.max_module_dim)
            return mu;
    }
    // Fallback: one copy of the smallest diagonal unit.
    MultiplicityMatrix mu(at(r), std::vector<Index>(at(r), 0));
    Index best = 0;
    for (Index i = 1; i < r; ++i)
        if (alg.block_size(i) < alg.block_size(best))
            best = i;
    mu[at(best)][at(best)] = 1;
    return mu;
}

} // namespace

CMatrix random_partial_isometry(Rng& rng, Index rows, Index cols, Index rank)
{
    const Index full = std::min(rows, cols);
    if (rank < 0)
        rank = rng.integer(0, full);
    rank = std::min(rank, full);
    RVector s = RVector::Zero(full);
    s.head(rank).setOnes();
    return rng.with_singular_values(rows, cols, s);
}

CMatrix project_to_partial_isometry(const CMatrix& m, const Tolerance& tol)
{
    const SvdResult svd = thin_svd(m, tol);
    CMatrix out = CMatrix::Zero(m.rows(), m.cols());
    if (svd.rank == 0)
        return out;
    const double top = svd.s(0);
    for (Index k = 0; k < svd.rank; ++k)
        if (svd.s(k) >= 0.5 * top)
            out += svd.u.col(k) * svd.v.col(k).adjoint();
    return out;
}

CMatrix polar_part(const CMatrix& m, const Tolerance& tol)
{
    const SvdResult svd = thin_svd(m, tol);
    return svd.u.leftCols(svd.rank) * svd.v.leftCols(svd.rank).adjoint();
}

BlockShape scalar_shape(Index d, Index n)
{
    return BlockShape{FdCStarAlgebra::scalars(), MultiplicityMatrix{{n}}, {d}};
}

BlockShape random_block_shape(Rng& rng, const ShapeLimits& limits)
{
    if (limits.scalar_only || limits.max_blocks < 2 || rng.coin())
        return scalar_shape(rng.integer(1, limits.max_hilbert_dim), rng.integer(1, limits.max_module_dim));
    for (int attempt = 0; attempt < 200; ++attempt) {
        const Index r = rng.integer(2, limits.max_blocks);
        std::vector<Index> sizes;
        std::vector<Index> mult;
        Index dim = 0;
        for (Index i = 0; i < r; ++i) {
            sizes.push_back(rng.integer(1, limits.max_block_size));
            mult.push_back(rng.integer(1, limits.max_multiplicity));
            dim += sizes.back() * mult.back();
        }
        if (dim > limits.max_hilbert_dim)
            continue;
        FdCStarAlgebra alg(sizes);
        MultiplicityMatrix mu = draw_mu(rng, alg, limits);
        return BlockShape{std::move(alg), std::move(mu), std::move(mult)};
    }
    return scalar_shape(rng.integer(1, limits.max_hilbert_dim), rng.integer(1, limits.max_module_dim));
}

BlockShape redraw_module(Rng& rng, const BlockShape& shape, const ShapeLimits& limits)
{
    BlockShape out = shape;
    if (shape.algebra.block_count() == 1 && shape.algebra.block_size(0) == 1)
        out.mu = MultiplicityMatrix{{rng.integer(1, limits.max_module_dim)}};
    else
        out.mu = draw_mu(rng, shape.algebra, limits);
    return out;
}

CovariantRep random_pi_rep(Rng& rng, const BlockShape& shape, const Tolerance& tol, Index tensor_cap, Index rank)
{
    if (module_dim(shape) < 1)
        fail(ErrorKind::usage, "shape has an empty module");
    std::vector<CMatrix> blocks;
    for (Index i = 0; i < shape.algebra.block_count(); ++i) {
        const Index rows = shape.row_count(i);
        const Index cols = shape.column_count(i);
        if (rank >= 0)
            blocks.push_back(random_partial_isometry(rng, rows, cols, rank));
        else
            blocks.push_back(project_to_partial_isometry(rng.gaussian(rows, cols), tol));
    }
    return rep_from_row_blocks(shape, blocks, tol, tensor_cap);
}

CovariantRep random_contractive_rep(Rng& rng, const BlockShape& shape, const Tolerance& tol, Index tensor_cap)
{
    std::vector<CMatrix> blocks;
    for (Index i = 0; i < shape.algebra.block_count(); ++i) {
        const Index rows = shape.row_count(i);
        const Index cols = shape.column_count(i);
        RVector s(std::min(rows, cols));
        for (Index k = 0; k < s.size(); ++k)
            s(k) = rng.uniform();
        blocks.push_back(rng.with_singular_values(rows, cols, s));
    }
    return rep_from_row_blocks(shape, blocks, tol, tensor_cap);
}

CovariantRep random_commuting_first_factor(Rng& rng, const BlockShape& shape, const CovariantRep& second)
{
    const Tolerance& tol = second.tolerance();
    const CovariantRep seed = random_pi_rep(rng, shape, tol, second.tensor_cap());
    if (!(seed.sigma() == second.sigma()))
        fail(ErrorKind::composition, "shape does not match the second factor's σ");
    // I ⊗ Ṽ'Ṽ'* commutes with the left action, so X F and X (I - F) are
    // intertwiners and so are their polar parts.
    const CMatrix q = second.tilde() * second.tilde().adjoint();
    const CMatrix f = seed.amplify(1, q, 0, 0);
    const Index n = f.rows();
    const CMatrix x = rng.coin() ? CMatrix(seed.tilde() * f) : CMatrix(seed.tilde() * (CMatrix::Identity(n, n) - f));
    return CovariantRep::from_tilde(seed.correspondence_ptr(), seed.sigma(), polar_part(x, tol), tol,
                                    second.tensor_cap());
}

std::pair<CovariantRep, CovariantRep> random_pi_pair(Rng& rng, const ShapeLimits& limits, const Tolerance& tol,
                                                     Index tensor_cap)
{
    const BlockShape s1 = random_block_shape(rng, limits);
    const BlockShape s2 = redraw_module(rng, s1, limits);
    CovariantRep second = random_pi_rep(rng, s2, tol, tensor_cap);
    if (rng.integer(0, 2) == 0)
        return {random_commuting_first_factor(rng, s1, second), second};
    return {random_pi_rep(rng, s1, tol, tensor_cap), second};
}

CMatrix project_to_intertwiners(const TensorSpace& dom, const TensorSpace& cod, const CMatrix& z)
{
    const FdCStarAlgebra& alg = dom.sigma().algebra();
    CMatrix out = CMatrix::Zero(z.rows(), z.cols());
    for (Index i = 0; i < alg.block_count(); ++i) {
        const Index k = alg.block_size(i);
        for (Index p = 0; p < k; ++p)
            for (Index q = 0; q < k; ++q)
                out += cod.left_action(alg.unit_index(i, p, q)) * z * dom.left_action(alg.unit_index(i, q, p))
                       / static_cast<double>(k);
    }
    return out;
}

CMatrix random_generalized_inverse(Rng& rng, const CovariantRep& rep)
{
    const TensorSpace& h = rep.space(0);
    const TensorSpace& eh = rep.space(1);
    const CMatrix& v = rep.tilde();
    const CMatrix& pinv = rep.pinv();
    const CMatrix x = project_to_intertwiners(h, eh, rng.gaussian(eh.dim(), h.dim()));
    const CMatrix y = project_to_intertwiners(h, eh, rng.gaussian(eh.dim(), h.dim()));
    const CMatrix pn = CMatrix::Identity(eh.dim(), eh.dim()) - pinv * v;
    const CMatrix pr = CMatrix::Identity(h.dim(), h.dim()) - v * pinv;
    return (pinv + pn * y) * v * (pinv + x * pr);
}

CovariantRep truncated_shift(Index d, const Tolerance& tol)
{
    CMatrix v = CMatrix::Zero(d, d);
    for (Index k = 1; k < d; ++k)
        v(k - 1, k) = 1.0;
    return rep_from_row_blocks(scalar_shape(d, 1), {v}, tol);
}

CovariantRep scalar_unitary(Rng& rng, Index d, const Tolerance& tol)
{
    return rep_from_row_blocks(scalar_shape(d, 1), {rng.unitary(d)}, tol);
}

namespace {

RVector spectrum(Rng& rng, Index n, double lo, double hi)
{
    RVector s(n);
    for (Index k = 0; k < n; ++k)
        s(k) = rng.uniform(lo, hi);
    return s;
}

} // namespace

CovariantRep random_regular_rep(Rng& rng, const ShapeLimits& limits, bool partial_isometric, const Tolerance& tol)
{
    return random_regular_fixture(rng, limits, partial_isometric, tol).rep;
}

RegularFixture random_regular_fixture(Rng& rng, const ShapeLimits& limits, bool partial_isometric,
                                      const Tolerance& tol)
{
    for (int attempt = 0; attempt < 100; ++attempt) {
        const Index chain = rng.integer(0, 3);
        Index loops = rng.integer(0, 2);
        if (chain <= 1 && loops == 0)
            loops = 1;
        const Index r = chain + loops;
        std::vector<Index> mult;
        Index m = rng.integer(1, 2);
        for (Index i = 0; i < chain; ++i) {
            mult.push_back(m);
            m += rng.integer(0, 1);
        }
        for (Index u = 0; u < loops; ++u)
            mult.push_back(rng.integer(1, 2));
        Index dim = 0;
        for (Index x : mult)
            dim += x;
        if (dim > limits.max_hilbert_dim)
            continue;

        MultiplicityMatrix mu(static_cast<size_t>(r), std::vector<Index>(static_cast<size_t>(r), 0));
        for (Index i = 0; i + 1 < chain; ++i)
            mu[at(i + 1)][at(i)] = 1;
        for (Index u = chain; u < r; ++u)
            mu[at(u)][at(u)] = rng.integer(1, 2);
        BlockShape shape{FdCStarAlgebra(std::vector<Index>(static_cast<size_t>(r), 1)), mu, mult};

        std::vector<CMatrix> blocks;
        for (Index i = 0; i < r; ++i) {
            const Index rows = shape.row_count(i);
            const Index cols = shape.column_count(i);
            // Chain edges are injective (cols <= rows), loops surjective (rows <= cols).
            const Index full = std::min(rows, cols);
            if (partial_isometric)
                blocks.push_back(random_partial_isometry(rng, rows, cols, full));
            else
                blocks.push_back(rng.with_singular_values(rows, cols, spectrum(rng, full, 0.3, 0.9)));
        }
        Index chain_dim = 0;
        for (Index i = 0; i < chain; ++i)
            chain_dim += mult[at(i)];
        return {rep_from_row_blocks(shape, blocks, tol), chain_dim};
    }
    return {scalar_unitary(rng, 1, tol), 0};
}

CovariantRep random_root_fixture(Rng& rng, const ShapeLimits& limits, bool pi_block, const Tolerance& tol)
{
    for (int attempt = 0; attempt < 200; ++attempt) {
        BlockShape shape = random_block_shape(rng, limits);
        const FdCStarAlgebra& alg = shape.algebra;
        const Index r = alg.block_count();
        bool full = true;
        bool rows_busy = true;
        for (Index j = 0; j < r; ++j) {
            Index col = 0;
            Index row = 0;
            for (Index i = 0; i < r; ++i) {
                col += shape.mu[at(i)][at(j)];
                row += shape.mu[at(j)][at(i)];
            }
            full = full && col > 0;
            rows_busy = rows_busy && row > 0;
        }
        if (!full)
            continue;

        // Levels of each multiplicity space: target a, source b, co-isometric c.
        const bool with_coiso = rows_busy && rng.coin();
        std::vector<Index> a;
        std::vector<Index> b;
        std::vector<Index> c;
        Index dim = 0;
        for (Index i = 0; i < r; ++i) {
            a.push_back(rng.integer(0, 2));
            b.push_back(rng.integer(0, 2));
            c.push_back(with_coiso ? 1 : 0);
            if (a.back() + b.back() + c.back() == 0)
                a.back() = 1;
            dim += alg.block_size(i) * (a.back() + b.back() + c.back());
        }
        if (dim > limits.max_hilbert_dim)
            continue;
        for (Index i = 0; i < r; ++i)
            shape.multiplicities[at(i)] = a[at(i)] + b[at(i)] + c[at(i)];

        std::vector<CMatrix> blocks;
        for (Index i = 0; i < r; ++i) {
            CMatrix block = CMatrix::Zero(shape.row_count(i), shape.column_count(i));
            std::vector<Index> source_cols;
            std::vector<Index> coiso_cols;
            Index offset = 0;
            for (Index j = 0; j < r; ++j)
                for (Index t = 0; t < shape.mu[at(i)][at(j)]; ++t) {
                    for (Index x = 0; x < b[at(j)]; ++x)
                        source_cols.push_back(offset + a[at(j)] + x);
                    for (Index x = 0; x < c[at(j)]; ++x)
                        coiso_cols.push_back(offset + a[at(j)] + b[at(j)] + x);
                    offset += shape.multiplicities[at(j)];
                }
            const Index ns = static_cast<Index>(source_cols.size());
            const Index full_rank = std::min(a[at(i)], ns);
            const CMatrix nil = pi_block ? random_partial_isometry(rng, a[at(i)], ns)
                                         : rng.with_singular_values(a[at(i)], ns, spectrum(rng, full_rank, 0.2, 0.8));
            for (Index x = 0; x < ns; ++x)
                block.block(0, source_cols[at(x)], a[at(i)], 1) = nil.col(x);
            const Index nc = static_cast<Index>(coiso_cols.size());
            const CMatrix co = random_partial_isometry(rng, c[at(i)], nc, c[at(i)]);
            for (Index x = 0; x < nc; ++x)
                block.block(a[at(i)] + b[at(i)], coiso_cols[at(x)], c[at(i)], 1) = co.col(x);
            blocks.push_back(std::move(block));
        }
        return rep_from_row_blocks(shape, blocks, tol);
    }
    fail(ErrorKind::numeric_failure, "could not draw a root fixture within the shape limits");
}

CovariantRep random_aligned_kernel_rep(Rng& rng, Index d, const Tolerance& tol)
{
    const Index rank = rng.integer(0, d);
    CMatrix core = CMatrix::Zero(d, d);
    if (rank > 0)
        core.topLeftCorner(rank, rank) = rng.unitary(rank);
    const CMatrix w = rng.unitary(d);
    return rep_from_row_blocks(scalar_shape(d, 1), {w * core * w.adjoint()}, tol);
}

} // namespace pirep
