#ifndef BIVECT_TESTS_SUPPORT_HPP
#define BIVECT_TESTS_SUPPORT_HPP

// Hand-rolled generators and independent oracles shared by the unit tests and
// the acceptance runner. Oracles avoid the library's own folds: determinants
// by plain elimination, Leibniz sums written out, associators by sorting
// basis labels, products by Eigen's Kronecker module.

#include "bivect/fixtures.hpp"
#include "bivect/oriented.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>

namespace bivect::testing {

using fixtures::Rng;
using XMat = Matrix<ExactComplex>;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Perm random_perm(Rng& rng, int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 0);
    std::shuffle(v.begin(), v.end(), rng);
    return Perm(v);
}

/// Small nonzero Gaussian rational.
inline ExactComplex random_unit(Rng& rng) {
    for (;;) {
        ExactComplex z(Rational(uniform(rng, -4, 4), uniform(rng, 1, 3)), Rational(uniform(rng, -2, 2), uniform(rng, 1, 2)));
        if (!z.is_zero()) return z;
    }
}

/// Integer power by repeated multiplication.
inline ExactComplex ipow(const ExactComplex& a, long long k) {
    ExactComplex r(1);
    const ExactComplex b = k < 0 ? ExactComplex(1) / a : a;
    for (long long i = 0; i < (k < 0 ? -k : k); ++i) r *= b;
    return r;
}

/// Determinant by textbook elimination with first-nonzero pivoting.
inline ExactComplex det_oracle(XMat m) {
    const auto n = m.rows();
    ExactComplex d(1);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = c;
        while (p < n && m(p, c).is_zero()) ++p;
        if (p == n) return ExactComplex(0);
        if (p != c) {
            m.row(p).swap(m.row(c));
            d = -d;
        }
        d *= m(c, c);
        for (Eigen::Index r = c + 1; r < n; ++r) {
            if (m(r, c).is_zero()) continue;
            const ExactComplex f = m(r, c) / m(c, c);
            for (Eigen::Index k = c; k < n; ++k) m(r, k) -= f * m(c, k);
        }
    }
    return d;
}

inline XMat random_invertible(Rng& rng, int n) {
    for (;;) {
        XMat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = ExactComplex(Rational(uniform(rng, -2, 2)), Rational(uniform(rng, -1, 1)));
        if (n == 0 || !det_oracle(m).is_zero()) return m;
    }
}

/// Leibniz sum over LV written out: degree det(D), scale the product of
/// tensor scales of even terms over that of odd terms, where the tensor scale
/// of (d_1, a_1) x ... x (d_n, a_n) is prod_i a_i^(prod_{j != i} d_j).
inline LvMor<ExactComplex> lv_det_oracle(const DimMatrix& dims, const std::vector<ExactComplex>& scales) {
    const int n = static_cast<int>(dims.rows());
    std::vector<int> s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 0);
    long long degree = 0;
    ExactComplex scale(1);
    do {
        long long term = 1;
        for (int i = 0; i < n; ++i) term *= dims(i, s[static_cast<std::size_t>(i)]);
        ExactComplex value(1);
        for (int i = 0; i < n; ++i) {
            long long others = 1;
            for (int j = 0; j < n; ++j)
                if (j != i) others *= dims(j, s[static_cast<std::size_t>(j)]);
            value *= ipow(scales[static_cast<std::size_t>(i * n + s[static_cast<std::size_t>(i)])], others);
        }
        const bool odd = Perm(s).sign() < 0;
        degree += odd ? -term : term;
        scale *= odd ? ExactComplex(1) / value : value;
    } while (std::next_permutation(s.begin(), s.end()));
    return {degree, scale};
}

inline LvMor<ExactComplex> lv_det_oracle(const LvMatrix<ExactComplex>& f) {
    std::vector<ExactComplex> scales;
    for (const auto& e : f.entries()) scales.push_back(e.scale);
    return lv_det_oracle(f.dims(), scales);
}

/// Det of a V morphism matrix through the oracle determinants.
inline LvMor<ExactComplex> big_det_oracle(const VMatrix<ExactComplex>& f) {
    std::vector<ExactComplex> scales;
    for (const auto& e : f.entries())
        scales.push_back(e.dim() == 0 ? ExactComplex(1) : det_oracle(e.matrix()));
    return lv_det_oracle(f.dims(), scales);
}

/// (E.F)_ik assembled densely: block diagonal over j of kron(E_ij, F_jk).
template <class Scalar>
Matrix<Scalar> product_entry_oracle(const VMatrix<Scalar>& e, const VMatrix<Scalar>& f, int i, int k) {
    long long size = 0;
    for (int j = 0; j < e.n(); ++j) size += e.dims()(i, j) * f.dims()(j, k);
    Matrix<Scalar> out = Matrix<Scalar>::Zero(size, size);
    long long at = 0;
    for (int j = 0; j < e.n(); ++j) {
        const Matrix<Scalar> block = Eigen::kroneckerProduct(e(i, j).matrix(), f(j, k).matrix()).eval();
        out.block(at, at, block.rows(), block.cols()) = block;
        at += block.rows();
    }
    return out;
}

/// Associator (A.B).C -> A.(B.C) at entry (i, l) as a permutation of basis
/// labels (j, k, a, b, c): source order lexicographic in (k, j, a, b, c),
/// target order in (j, a, k, b, c). Returns the image of each source rank.
inline std::vector<int> associator_oracle(const DimMatrix& A, const DimMatrix& B, const DimMatrix& C,
                                          int i, int l) {
    using Label = std::array<long long, 5>;  // j, k, a, b, c
    std::vector<Label> labels;
    const int n = static_cast<int>(A.rows());
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (long long a = 0; a < A(i, j); ++a)
                for (long long b = 0; b < B(j, k); ++b)
                    for (long long c = 0; c < C(k, l); ++c) labels.push_back({j, k, a, b, c});
    auto source_key = [](const Label& x) { return std::tie(x[1], x[0], x[2], x[3], x[4]); };
    auto target_key = [](const Label& x) { return std::tie(x[0], x[2], x[1], x[3], x[4]); };
    std::vector<Label> src = labels, tgt = labels;
    std::sort(src.begin(), src.end(), [&](const Label& x, const Label& y) { return source_key(x) < source_key(y); });
    std::sort(tgt.begin(), tgt.end(), [&](const Label& x, const Label& y) { return target_key(x) < target_key(y); });
    std::vector<int> image(src.size());
    for (std::size_t r = 0; r < src.size(); ++r)
        image[r] = static_cast<int>(std::find(tgt.begin(), tgt.end(), src[r]) - tgt.begin());
    return image;
}

/// Random automorphism of `dims` with exact entries.
inline VMatrix<ExactComplex> random_vmatrix(Rng& rng, const DimMatrix& dims) {
    std::vector<VMor<ExactComplex>> entries;
    for (Eigen::Index i = 0; i < dims.rows(); ++i)
        for (Eigen::Index j = 0; j < dims.cols(); ++j)
            entries.emplace_back(random_invertible(rng, static_cast<int>(dims(i, j))));
    return VMatrix<ExactComplex>(dims, std::move(entries));
}

inline LvMatrix<ExactComplex> random_lvmatrix(Rng& rng, const DimMatrix& dims) {
    std::vector<LvMor<ExactComplex>> entries;
    for (Eigen::Index i = 0; i < dims.rows(); ++i)
        for (Eigen::Index j = 0; j < dims.cols(); ++j) entries.emplace_back(dims(i, j), random_unit(rng));
    return LvMatrix<ExactComplex>(dims, std::move(entries));
}

/// Weakly invertible dims with n in 1..max_n and entries <= max_entry.
inline DimMatrix random_wi(Rng& rng, int max_n, long long max_entry) {
    return fixtures::random_weakly_invertible(rng, uniform(rng, 1, max_n), max_entry);
}

/// Counts the LV bipermutative axioms failing for degrees |n|, |m|, |k| <= bound
/// with random scales: twist involutions, both hexagons, both distributivity
/// laws at value level and twist naturality.
inline int lv_axiom_failures(Rng& rng, int bound, int* checked = nullptr) {
    using L = LvMor<ExactComplex>;
    auto id = [](long long d) { return lv_identity<ExactComplex>(d); };
    int failures = 0, count = 0;
    auto expect = [&](bool ok) {
        ++count;
        if (!ok) ++failures;
    };
    for (int n = -bound; n <= bound; ++n)
        for (int m = -bound; m <= bound; ++m) {
            const L ts = lv_twist_sum<ExactComplex>(n, m), ts_back = lv_twist_sum<ExactComplex>(m, n);
            const L tt = lv_twist_tensor<ExactComplex>(n, m), tt_back = lv_twist_tensor<ExactComplex>(m, n);
            expect(lv_compose(ts_back, ts) == id(n + m));
            expect(lv_compose(tt_back, tt) == id(static_cast<long long>(n) * m));
            const L f{n, random_unit(rng)}, g{m, random_unit(rng)};
            expect(lv_compose(ts, lv_sum(f, g)) == lv_compose(lv_sum(g, f), ts));
            expect(lv_compose(tt, lv_tensor(f, g)) == lv_compose(lv_tensor(g, f), tt));
            for (int k = -bound; k <= bound; ++k) {
                // n past m + k in one step, or past m then past k.
                expect(lv_twist_sum<ExactComplex>(n, m + k) ==
                       lv_compose(lv_sum(id(m), lv_twist_sum<ExactComplex>(n, k)),
                                  lv_sum(lv_twist_sum<ExactComplex>(n, m), id(k))));
                expect(lv_twist_tensor<ExactComplex>(n, static_cast<long long>(m) * k) ==
                       lv_compose(lv_tensor(id(m), lv_twist_tensor<ExactComplex>(n, k)),
                                  lv_tensor(lv_twist_tensor<ExactComplex>(n, m), id(k))));
                const L h{k, random_unit(rng)};
                expect(lv_tensor(f, lv_sum(g, h)) == lv_sum(lv_tensor(f, g), lv_tensor(f, h)));
                expect(lv_tensor(lv_sum(f, g), h) == lv_sum(lv_tensor(f, h), lv_tensor(g, h)));
            }
        }
    if (checked) *checked = count;
    return failures;
}

/// All 2-cochains on the cover's triples, by brute force: is `cocycle` a
/// coboundary?
inline bool coboundary_by_enumeration(const OrderedCover& cover, const SignCochain& cocycle) {
    const auto triples = cover.simplices_of_size(3);
    for (unsigned long mask = 0; mask < (1UL << triples.size()); ++mask) {
        SignCochain c{2, {}};
        for (std::size_t t = 0; t < triples.size(); ++t) c.values[triples[t]] = (mask >> t & 1UL) ? -1 : 1;
        bool match = true;
        for (const auto& q : cover.simplices_of_size(4)) {
            const int d = c.values.at({q[1], q[2], q[3]}) * c.values.at({q[0], q[2], q[3]}) *
                          c.values.at({q[0], q[1], q[3]}) * c.values.at({q[0], q[1], q[2]});
            if (d != cocycle.values.at(q)) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

/// 1D base with `charts` random intervals and psi tables quantized to k/64,
/// so that products of a handful of weights are exact in double precision.
inline SampledBase quantized_base(Rng& rng, int charts, int size = 33) {
    SampledBase base{Lattice{1, 0.0, 1.0 / (size - 1), size}, {}, {}, {}};
    for (int a = 0; a < charts; ++a) {
        const int l = uniform(rng, 0, size - 6);
        const int r = uniform(rng, l + 4, size - 1);
        auto& psi = base.psi[a];
        psi.assign(static_cast<std::size_t>(size), 0.0);
        for (int p = l; p <= r; ++p) {
            base.membership[a].push_back(p);
            const bool inner = p > l && p < r;
            if (inner) base.shrunk[a].push_back(p);
            psi[static_cast<std::size_t>(p)] = inner ? 1.0 : uniform(rng, 0, 64) / 64.0;
        }
    }
    return base;
}

}  // namespace bivect::testing

#endif  // BIVECT_TESTS_SUPPORT_HPP
