#include "bivect/biperm.hpp"

#include <numeric>
#include <string>

namespace bivect {

// ---------------------------------------------------------------------------
// Sigma

Perm::Perm(std::vector<int> images) : images_(std::move(images)) {
    std::vector<char> seen(images_.size(), 0);
    for (int v : images_) {
        if (v < 0 || v >= size() || seen[static_cast<std::size_t>(v)])
            throw DomainError("Perm: images are not a bijection of 0..n-1");
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

Perm Perm::identity(int n) {
    std::vector<int> img(static_cast<std::size_t>(n));
    std::iota(img.begin(), img.end(), 0);
    return Perm(std::move(img));
}

Perm Perm::from_one_based(const std::vector<int>& images) {
    std::vector<int> img(images);
    for (int& v : img) --v;
    return Perm(std::move(img));
}

std::vector<int> Perm::one_based() const {
    std::vector<int> img(images_);
    for (int& v : img) ++v;
    return img;
}

long long Perm::inversions() const {
    long long count = 0;
    for (std::size_t i = 0; i < images_.size(); ++i)
        for (std::size_t j = i + 1; j < images_.size(); ++j)
            if (images_[i] > images_[j]) ++count;
    return count;
}

Perm Perm::inverse() const {
    std::vector<int> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i)
        inv[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
    return Perm(std::move(inv));
}

Perm operator*(const Perm& p, const Perm& q) {
    if (p.size() != q.size()) throw DomainError("Perm composition: size mismatch");
    std::vector<int> img(q.images_.size());
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = p(q.images_[i]);
    return Perm(std::move(img));
}

Perm perm_sum(const Perm& p, const Perm& q) {
    std::vector<int> img(p.images());
    for (int v : q.images()) img.push_back(v + p.size());
    return Perm(std::move(img));
}

Perm perm_tensor(const Perm& p, const Perm& q) {
    const int m = q.size();
    std::vector<int> img(static_cast<std::size_t>(p.size() * m));
    for (int i = 0; i < p.size(); ++i)
        for (int j = 0; j < m; ++j) img[static_cast<std::size_t>(i * m + j)] = p(i) * m + q(j);
    return Perm(std::move(img));
}

Perm sigma_twist_sum(int n, int m) {
    std::vector<int> img(static_cast<std::size_t>(n + m));
    for (int i = 0; i < n; ++i) img[static_cast<std::size_t>(i)] = m + i;
    for (int j = 0; j < m; ++j) img[static_cast<std::size_t>(n + j)] = j;
    return Perm(std::move(img));
}

Perm sigma_twist_tensor(int n, int m) {
    std::vector<int> img(static_cast<std::size_t>(n * m));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) img[static_cast<std::size_t>(i * m + j)] = j * n + i;
    return Perm(std::move(img));
}

// ---------------------------------------------------------------------------
// determinants

namespace {

template <class Scalar>
Eigen::Index choose_pivot(const Matrix<Scalar>& a, Eigen::Index col) {
    if constexpr (scalar_traits<Scalar>::exact) {
        for (Eigen::Index r = col; r < a.rows(); ++r)
            if (!a(r, col).is_zero()) return r;
        return -1;
    } else {
        Eigen::Index best = -1;
        double best_mag = 0.0;
        for (Eigen::Index r = col; r < a.rows(); ++r) {
            double mag = std::abs(a(r, col));
            if (mag > best_mag) {
                best_mag = mag;
                best = r;
            }
        }
        return best;
    }
}

}  // namespace

template <class Scalar>
Scalar determinant(const Matrix<Scalar>& m) {
    if (m.rows() != m.cols()) throw DomainError("determinant of a non-square matrix");
    Matrix<Scalar> a = m;
    const Eigen::Index n = a.rows();
    Scalar det(1);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = choose_pivot(a, c);
        if (p < 0) return Scalar(0);
        if (p != c) {
            a.row(p).swap(a.row(c));
            det = -det;
        }
        const Scalar pivot = a(c, c);
        det *= pivot;
        for (Eigen::Index r = c + 1; r < n; ++r) {
            if (scalar_traits<Scalar>::is_zero(a(r, c))) continue;
            const Scalar factor = a(r, c) / pivot;
            for (Eigen::Index k = c + 1; k < n; ++k)
                if (!scalar_traits<Scalar>::is_zero(a(c, k))) a(r, k) -= factor * a(c, k);
        }
    }
    return det;
}

// ---------------------------------------------------------------------------
// V

template <class Scalar>
VMor<Scalar>::VMor(Matrix<Scalar> m, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DomainError("VMor: matrix is not square");
    const Scalar d = determinant(m_);
    if (scalar_traits<Scalar>::exact ? scalar_traits<Scalar>::is_zero(d)
                                     : !(scalar_traits<Scalar>::magnitude(d) > tol))
        throw DomainError("VMor: matrix is singular");
}

template <class Scalar>
VMor<Scalar> VMor<Scalar>::identity(int dim) {
    return trusted(Matrix<Scalar>::Identity(dim, dim));
}

template <class Scalar>
VMor<Scalar> VMor<Scalar>::trusted(Matrix<Scalar> m) {
    if (m.rows() != m.cols()) throw DomainError("VMor: matrix is not square");
    VMor f;
    f.m_ = std::move(m);
    return f;
}

template <class Scalar>
VMor<Scalar> v_sum(const VMor<Scalar>& f, const VMor<Scalar>& g) {
    const int n = f.dim(), m = g.dim();
    Matrix<Scalar> out = Matrix<Scalar>::Zero(n + m, n + m);
    out.topLeftCorner(n, n) = f.matrix();
    out.bottomRightCorner(m, m) = g.matrix();
    return VMor<Scalar>::trusted(std::move(out));
}

template <class Scalar>
VMor<Scalar> v_tensor(const VMor<Scalar>& f, const VMor<Scalar>& g) {
    const int n = f.dim(), m = g.dim();
    Matrix<Scalar> out = Matrix<Scalar>::Zero(n * m, n * m);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Scalar& fik = f.matrix()(i, k);
            if (scalar_traits<Scalar>::is_zero(fik)) continue;
            out.block(i * m, k * m, m, m) = g.matrix() * fik;
        }
    return VMor<Scalar>::trusted(std::move(out));
}

template <class Scalar>
VMor<Scalar> v_compose(const VMor<Scalar>& f, const VMor<Scalar>& g) {
    if (f.dim() != g.dim()) throw DomainError("v_compose: dimension mismatch");
    if constexpr (!scalar_traits<Scalar>::exact) {
        return VMor<Scalar>::trusted(f.matrix() * g.matrix());
    } else {
        // Rational arithmetic is expensive and our matrices are mostly
        // permutation-like, so skip zero terms.
        const int n = f.dim();
        Matrix<Scalar> out = Matrix<Scalar>::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const Scalar& fik = f.matrix()(i, k);
                if (fik.is_zero()) continue;
                for (int j = 0; j < n; ++j) {
                    const Scalar& gkj = g.matrix()(k, j);
                    if (!gkj.is_zero()) out(i, j) += fik * gkj;
                }
            }
        return VMor<Scalar>::trusted(std::move(out));
    }
}

template <class Scalar>
VMor<Scalar> v_inverse(const VMor<Scalar>& f) {
    const int n = f.dim();
    // Gauss-Jordan on [f | I].
    Matrix<Scalar> a = f.matrix();
    Matrix<Scalar> inv = Matrix<Scalar>::Identity(n, n);
    for (int c = 0; c < n; ++c) {
        Eigen::Index p = choose_pivot(a, c);
        if (p < 0) throw DomainError("v_inverse: singular matrix");
        a.row(p).swap(a.row(c));
        inv.row(p).swap(inv.row(c));
        const Scalar pivot = a(c, c);
        a.row(c) /= pivot;
        inv.row(c) /= pivot;
        for (int r = 0; r < n; ++r) {
            if (r == c || scalar_traits<Scalar>::is_zero(a(r, c))) continue;
            const Scalar factor = a(r, c);
            for (int k = 0; k < n; ++k) {
                if (!scalar_traits<Scalar>::is_zero(a(c, k))) a(r, k) -= factor * a(c, k);
                if (!scalar_traits<Scalar>::is_zero(inv(c, k))) inv(r, k) -= factor * inv(c, k);
            }
        }
    }
    return VMor<Scalar>::trusted(std::move(inv));
}

template <class Scalar>
VMor<Scalar> s_functor(const Perm& p) {
    Matrix<Scalar> m = Matrix<Scalar>::Zero(p.size(), p.size());
    for (int i = 0; i < p.size(); ++i) m(p(i), i) = Scalar(1);
    return VMor<Scalar>::trusted(std::move(m));
}

// ---------------------------------------------------------------------------
// LV

template <class Scalar>
LvMor<Scalar>::LvMor(long long d, Scalar s) : degree(d), scale(std::move(s)) {
    if (scalar_traits<Scalar>::is_zero(scale)) throw DomainError("LvMor: zero scale");
}

template <class Scalar>
LvMor<Scalar> lv_sum(const LvMor<Scalar>& x, const LvMor<Scalar>& y) {
    return {x.degree + y.degree, x.scale * y.scale};
}

template <class Scalar>
LvMor<Scalar> lv_tensor(const LvMor<Scalar>& x, const LvMor<Scalar>& y) {
    return {x.degree * y.degree, cpow(x.scale, y.degree) * cpow(y.scale, x.degree)};
}

template <class Scalar>
LvMor<Scalar> lv_compose(const LvMor<Scalar>& x, const LvMor<Scalar>& y) {
    if (x.degree != y.degree)
        throw DomainError("lv_compose: degree mismatch (" + std::to_string(x.degree) + " vs " +
                          std::to_string(y.degree) + ")");
    return {x.degree, x.scale * y.scale};
}

template <class Scalar>
LvMor<Scalar> i_inverse(const LvMor<Scalar>& x) {
    return {-x.degree, cpow(x.scale, -1)};
}

int lv_twist_sum_sign(long long n, long long m) {
    const __int128 e = static_cast<__int128>(n) * m;
    return e % 2 == 0 ? 1 : -1;
}

int lv_twist_tensor_sign(long long n, long long m) {
    // n(n-1) and m(m-1) are even, so the exponent is (n(n-1)/2) (m(m-1)/2).
    const __int128 a = static_cast<__int128>(n) * (n - 1) / 2;
    const __int128 b = static_cast<__int128>(m) * (m - 1) / 2;
    return (a % 2 != 0 && b % 2 != 0) ? -1 : 1;
}

template <class Scalar>
LvMor<Scalar> lambda(const VMor<Scalar>& f) {
    Scalar d = determinant(f.matrix());
    if (scalar_traits<Scalar>::is_zero(d)) throw DomainError("lambda: singular matrix");
    return {f.dim(), std::move(d)};
}

template <class Scalar>
LvStarMor<Scalar>::LvStarMor(int d, Scalar s) : degree(d), scale(std::move(s)) {
    if (d != 1 && d != -1) throw DomainError("LvStarMor: degree must be +1 or -1");
    if (scalar_traits<Scalar>::is_zero(scale)) throw DomainError("LvStarMor: zero scale");
}

template <class Scalar>
Lv1Mor<Scalar>::Lv1Mor(Scalar s) : scale(std::move(s)) {
    if (scalar_traits<Scalar>::is_zero(scale)) throw DomainError("Lv1Mor: zero scale");
}

template <class Scalar>
LvStarMor<Scalar> to_lv_star(const LvMor<Scalar>& x) {
    if (x.degree != 1 && x.degree != -1)
        throw DomainError("degree " + std::to_string(x.degree) + " is not a tensor unit");
    return {static_cast<int>(x.degree), x.scale};
}

template <class Scalar>
Lv1Mor<Scalar> p_projection(const LvStarMor<Scalar>& x) {
    return Lv1Mor<Scalar>(cpow(x.scale, x.degree));
}

#define BIVECT_INSTANTIATE_BIPERM(S)                                              \
    template S determinant<S>(const Matrix<S>&);                                  \
    template class VMor<S>;                                                       \
    template VMor<S> v_sum<S>(const VMor<S>&, const VMor<S>&);                    \
    template VMor<S> v_tensor<S>(const VMor<S>&, const VMor<S>&);                 \
    template VMor<S> v_compose<S>(const VMor<S>&, const VMor<S>&);                \
    template VMor<S> v_inverse<S>(const VMor<S>&);                                \
    template VMor<S> s_functor<S>(const Perm&);                                   \
    template struct LvMor<S>;                                                     \
    template LvMor<S> lv_sum<S>(const LvMor<S>&, const LvMor<S>&);                \
    template LvMor<S> lv_tensor<S>(const LvMor<S>&, const LvMor<S>&);             \
    template LvMor<S> lv_compose<S>(const LvMor<S>&, const LvMor<S>&);            \
    template LvMor<S> i_inverse<S>(const LvMor<S>&);                              \
    template LvMor<S> lambda<S>(const VMor<S>&);                                  \
    template struct LvStarMor<S>;                                                 \
    template struct Lv1Mor<S>;                                                    \
    template LvStarMor<S> to_lv_star<S>(const LvMor<S>&);                         \
    template Lv1Mor<S> p_projection<S>(const LvStarMor<S>&);

BIVECT_INSTANTIATE_BIPERM(ExactComplex)
BIVECT_INSTANTIATE_BIPERM(ApproxComplex)

}  // namespace bivect
