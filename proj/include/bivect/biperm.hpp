#ifndef BIVECT_BIPERM_HPP
#define BIVECT_BIPERM_HPP

// The bipermutative categories Sigma (permutations), V (complex matrices) and
// LV (degree + nonzero scalar), their sums, products and twists, and the
// functors S: Sigma -> V, sgn: Sigma -> LV, Lambda: V -> LV, the weakly strict
// inverse i on LV and the projection p: LV* -> LV_1.

#include "bivect/scalars.hpp"

#include <Eigen/Core>

#include <vector>

namespace bivect {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// ---------------------------------------------------------------------------
// Sigma

/// A permutation of {0, ..., n-1}. Composition is (p * q)(i) = p(q(i)).
class Perm {
public:
    Perm() = default;
    /// Throws DomainError unless `images` is a bijection of 0..n-1.
    explicit Perm(std::vector<int> images);

    static Perm identity(int n);
    static Perm from_one_based(const std::vector<int>& images);

    int size() const { return static_cast<int>(images_.size()); }
    int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& images() const { return images_; }
    std::vector<int> one_based() const;

    long long inversions() const;
    int sign() const { return inversions() % 2 == 0 ? 1 : -1; }
    Perm inverse() const;

    friend Perm operator*(const Perm& p, const Perm& q);
    friend bool operator==(const Perm& a, const Perm& b) { return a.images_ == b.images_; }
    friend bool operator!=(const Perm& a, const Perm& b) { return !(a == b); }

private:
    std::vector<int> images_;
};

/// Block action: p on the first |p| points, q shifted on the rest.
Perm perm_sum(const Perm& p, const Perm& q);
/// (i, j) -> (p(i), q(j)) with (i, j) at lexicographic rank i * |q| + j.
Perm perm_tensor(const Perm& p, const Perm& q);
/// n + m -> m + n, moving the first block behind the second.
Perm sigma_twist_sum(int n, int m);
/// n x m -> m x n, (i, j) -> (j, i) under lexicographic ranks.
Perm sigma_twist_tensor(int n, int m);

// ---------------------------------------------------------------------------
// V

/// An automorphism of C^dim.
template <class Scalar>
class VMor {
public:
    /// Checks squareness and invertibility (|det| > tol in approx mode).
    explicit VMor(Matrix<Scalar> m, double tol = 0.0);

    static VMor identity(int dim);
    /// Wraps a matrix known to be invertible (sums, products, composites of
    /// automorphisms). Only squareness is checked.
    static VMor trusted(Matrix<Scalar> m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix<Scalar>& matrix() const { return m_; }

private:
    VMor() = default;
    Matrix<Scalar> m_;
};

/// Determinant by Gaussian elimination (exact pivots for ExactComplex,
/// partial pivoting for ApproxComplex).
template <class Scalar>
Scalar determinant(const Matrix<Scalar>& m);

template <class Scalar>
VMor<Scalar> v_sum(const VMor<Scalar>& f, const VMor<Scalar>& g);
/// Kronecker product, left factor outer.
template <class Scalar>
VMor<Scalar> v_tensor(const VMor<Scalar>& f, const VMor<Scalar>& g);
/// f after g.
template <class Scalar>
VMor<Scalar> v_compose(const VMor<Scalar>& f, const VMor<Scalar>& g);
template <class Scalar>
VMor<Scalar> v_inverse(const VMor<Scalar>& f);

/// Permutation matrix with column i equal to e_{p(i)}.
template <class Scalar>
VMor<Scalar> s_functor(const Perm& p);

// ---------------------------------------------------------------------------
// LV, LV*, LV_1

/// Morphism (degree, scale) of LV; scale is never zero.
template <class Scalar>
struct LvMor {
    long long degree = 0;
    Scalar scale{1};

    LvMor() = default;
    LvMor(long long d, Scalar s);

    friend bool operator==(const LvMor& a, const LvMor& b) {
        return a.degree == b.degree && a.scale == b.scale;
    }
    friend bool operator!=(const LvMor& a, const LvMor& b) { return !(a == b); }
};

template <class Scalar>
LvMor<Scalar> lv_identity(long long degree) {
    return {degree, Scalar(1)};
}
/// (n, a) + (m, b) = (n + m, ab)
template <class Scalar>
LvMor<Scalar> lv_sum(const LvMor<Scalar>& x, const LvMor<Scalar>& y);
/// (n, a) x (m, b) = (nm, a^m b^n)
template <class Scalar>
LvMor<Scalar> lv_tensor(const LvMor<Scalar>& x, const LvMor<Scalar>& y);
/// Degrees must agree.
template <class Scalar>
LvMor<Scalar> lv_compose(const LvMor<Scalar>& x, const LvMor<Scalar>& y);
/// i(n, a) = (-n, 1/a)
template <class Scalar>
LvMor<Scalar> i_inverse(const LvMor<Scalar>& x);

/// (-1)^{nm}
int lv_twist_sum_sign(long long n, long long m);
/// (-1)^{n(n-1)m(m-1)/4}
int lv_twist_tensor_sign(long long n, long long m);

template <class Scalar>
LvMor<Scalar> lv_twist_sum(long long n, long long m) {
    return {n + m, Scalar(lv_twist_sum_sign(n, m))};
}
template <class Scalar>
LvMor<Scalar> lv_twist_tensor(long long n, long long m) {
    return {n * m, Scalar(lv_twist_tensor_sign(n, m))};
}

/// Lambda: (dim f, det f). Singular input is a DomainError.
template <class Scalar>
LvMor<Scalar> lambda(const VMor<Scalar>& f);

template <class Scalar>
LvMor<Scalar> sgn_functor(const Perm& p) {
    return {p.size(), Scalar(p.sign())};
}

/// Morphism of the tensor-invertible part: degree +-1.
template <class Scalar>
struct LvStarMor {
    int degree = 1;
    Scalar scale{1};

    LvStarMor() = default;
    LvStarMor(int d, Scalar s);

    LvMor<Scalar> as_lv() const { return {degree, scale}; }
    friend bool operator==(const LvStarMor& a, const LvStarMor& b) {
        return a.degree == b.degree && a.scale == b.scale;
    }
};

/// Automorphism of the single object 1.
template <class Scalar>
struct Lv1Mor {
    Scalar scale{1};

    Lv1Mor() = default;
    explicit Lv1Mor(Scalar s);

    friend bool operator==(const Lv1Mor& a, const Lv1Mor& b) { return a.scale == b.scale; }
};

/// Restricts an LvMor of degree +-1; anything else is a DomainError.
template <class Scalar>
LvStarMor<Scalar> to_lv_star(const LvMor<Scalar>& x);

template <class Scalar>
LvStarMor<Scalar> lv_star_tensor(const LvStarMor<Scalar>& x, const LvStarMor<Scalar>& y) {
    auto t = lv_tensor(x.as_lv(), y.as_lv());
    return {static_cast<int>(t.degree), t.scale};
}

/// p(d, a) = (1, a^d)
template <class Scalar>
Lv1Mor<Scalar> p_projection(const LvStarMor<Scalar>& x);

/// Inclusion LV_1 -> LV*, a -> (1, a).
template <class Scalar>
LvStarMor<Scalar> lv1_include(const Lv1Mor<Scalar>& a) {
    return {1, a.scale};
}

}  // namespace bivect

#endif  // BIVECT_BIPERM_HPP
