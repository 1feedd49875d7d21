#include "bivect/matrix_cat.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace bivect {

// ---------------------------------------------------------------------------
// objects

DimMatrix dim_identity(int n) { return DimMatrix::Identity(n, n); }

DimMatrix dim_from_rows(const std::vector<std::vector<long long>>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    DimMatrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
            throw DomainError("dimension matrix must be square");
        for (Eigen::Index j = 0; j < n; ++j)
            d(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return d;
}

DimMatrix obj_product(const DimMatrix& a, const DimMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw DomainError("obj_product: size mismatch");
    return a * b;
}

DimMatrix block_sum(const DimMatrix& a, const DimMatrix& b) {
    DimMatrix out = DimMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

long long int_det(const DimMatrix& a) {
    if (a.rows() != a.cols()) throw DomainError("int_det: non-square matrix");
    const Eigen::Index n = a.rows();
    if (n == 0) return 1;
    // Bareiss: every intermediate is a minor, so the divisions are exact.
    std::vector<__int128> m(static_cast<std::size_t>(n * n));
    auto at = [&](Eigen::Index i, Eigen::Index j) -> __int128& {
        return m[static_cast<std::size_t>(i * n + j)];
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) at(i, j) = a(i, j);
    int sign = 1;
    __int128 prev = 1;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (at(k, k) == 0) {
            Eigen::Index p = k + 1;
            while (p < n && at(p, k) == 0) ++p;
            if (p == n) return 0;
            for (Eigen::Index j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i)
            for (Eigen::Index j = k + 1; j < n; ++j)
                at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
        prev = at(k, k);
    }
    const __int128 d = sign * at(n - 1, n - 1);
    if (d > std::numeric_limits<long long>::max() || d < std::numeric_limits<long long>::min())
        throw DomainError("int_det: determinant overflows 64 bits");
    return static_cast<long long>(d);
}

WeakInvCert certify(const DimMatrix& dims) { return {dims, int_det(dims)}; }

bool is_weakly_invertible(const DimMatrix& dims) { return certify(dims).weakly_invertible(); }

std::string format_dims(const DimMatrix& d) {
    std::ostringstream os;
    os << "[";
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        os << (i ? ",[" : "[");
        for (Eigen::Index j = 0; j < d.cols(); ++j) os << (j ? "," : "") << d(i, j);
        os << "]";
    }
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------
// morphism matrices

template <class Entry>
MorMatrix<Entry>::MorMatrix(DimMatrix dims, std::vector<Entry> entries)
    : dims_(std::move(dims)), entries_(std::move(entries)) {
    if (dims_.rows() != dims_.cols()) throw DomainError("MorMatrix: dims must be square");
    if (entries_.size() != static_cast<std::size_t>(dims_.size()))
        throw DomainError("MorMatrix: wrong number of entries");
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j)
            if (entry_traits<Entry>::dim((*this)(i, j)) != dims_(i, j))
                throw DomainError("MorMatrix: entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") does not match its dimension");
}

template <class Entry>
MorMatrix<Entry> MorMatrix<Entry>::identity(const DimMatrix& dims) {
    std::vector<Entry> e;
    e.reserve(static_cast<std::size_t>(dims.size()));
    for (Eigen::Index i = 0; i < dims.rows(); ++i)
        for (Eigen::Index j = 0; j < dims.cols(); ++j) {
            if (dims(i, j) < 0 && !entry_traits<Entry>::is_lv)
                throw DomainError("negative dimension in an M_n(V) object");
            e.push_back(entry_traits<Entry>::identity(dims(i, j)));
        }
    return MorMatrix(dims, std::move(e));
}

template <class Entry>
MorMatrix<Entry> mor_product(const MorMatrix<Entry>& f, const MorMatrix<Entry>& g) {
    using T = entry_traits<Entry>;
    if (f.n() != g.n()) throw DomainError("mor_product: size mismatch");
    const int n = f.n();
    std::vector<Entry> out;
    out.reserve(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            Entry acc = T::identity(0);
            for (int j = 0; j < n; ++j) acc = T::sum(acc, T::tensor(f(i, j), g(j, k)));
            out.push_back(std::move(acc));
        }
    return MorMatrix<Entry>(obj_product(f.dims(), g.dims()), std::move(out));
}

template <class Entry>
MorMatrix<Entry> mor_compose(const MorMatrix<Entry>& f, const MorMatrix<Entry>& g) {
    if (f.dims() != g.dims()) throw DomainError("mor_compose: objects differ");
    std::vector<Entry> out;
    out.reserve(f.entries().size());
    for (std::size_t t = 0; t < f.entries().size(); ++t)
        out.push_back(entry_traits<Entry>::compose(f.entries()[t], g.entries()[t]));
    return MorMatrix<Entry>(f.dims(), std::move(out));
}

template <class Entry>
MorMatrix<Entry> mor_inverse(const MorMatrix<Entry>& f) {
    std::vector<Entry> out;
    out.reserve(f.entries().size());
    for (const auto& e : f.entries()) out.push_back(entry_traits<Entry>::inverse(e));
    return MorMatrix<Entry>(f.dims(), std::move(out));
}

template <class Entry>
MorMatrix<Entry> block_sum(const MorMatrix<Entry>& f, const MorMatrix<Entry>& g) {
    const int n = f.n(), m = g.n();
    std::vector<Entry> out;
    out.reserve(static_cast<std::size_t>((n + m) * (n + m)));
    for (int i = 0; i < n + m; ++i)
        for (int j = 0; j < n + m; ++j) {
            if (i < n && j < n)
                out.push_back(f(i, j));
            else if (i >= n && j >= n)
                out.push_back(g(i - n, j - n));
            else
                out.push_back(entry_traits<Entry>::identity(0));
        }
    return MorMatrix<Entry>(block_sum(f.dims(), g.dims()), std::move(out));
}

template <class Scalar>
LvMatrix<Scalar> entrywise_lambda(const VMatrix<Scalar>& f) {
    std::vector<LvMor<Scalar>> out;
    out.reserve(f.entries().size());
    for (const auto& e : f.entries()) out.push_back(lambda(e));
    return LvMatrix<Scalar>(f.dims(), std::move(out));
}

template <class Scalar>
double mor_residual(const VMatrix<Scalar>& f, const VMatrix<Scalar>& g) {
    if (f.dims() != g.dims()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t t = 0; t < f.entries().size(); ++t) {
        const auto& a = f.entries()[t].matrix();
        const auto& b = g.entries()[t].matrix();
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                const Scalar diff = a(i, j) - b(i, j);
                if (scalar_traits<Scalar>::is_zero(diff)) continue;
                worst = std::max({worst, scalar_traits<Scalar>::magnitude(diff),
                                  std::numeric_limits<double>::denorm_min()});
            }
    }
    return worst;
}

template <class Scalar>
double mor_residual(const LvMatrix<Scalar>& f, const LvMatrix<Scalar>& g) {
    if (f.dims() != g.dims()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t t = 0; t < f.entries().size(); ++t) {
        const Scalar diff = f.entries()[t].scale - g.entries()[t].scale;
        if (scalar_traits<Scalar>::is_zero(diff)) continue;
        worst = std::max({worst, scalar_traits<Scalar>::magnitude(diff),
                          std::numeric_limits<double>::denorm_min()});
    }
    return worst;
}

// ---------------------------------------------------------------------------
// bracketings and canonical maps

Bracketing Bracketing::leaf(int factor) {
    Bracketing b;
    b.first_ = b.last_ = factor;
    return b;
}

Bracketing Bracketing::join(Bracketing left, Bracketing right) {
    if (left.last_ + 1 != right.first_)
        throw DomainError("Bracketing::join: factors are not adjacent");
    Bracketing b;
    b.first_ = left.first_;
    b.last_ = right.last_;
    b.left_ = std::make_shared<const Bracketing>(std::move(left));
    b.right_ = std::make_shared<const Bracketing>(std::move(right));
    return b;
}

Bracketing Bracketing::left_nested(int first, int last) {
    Bracketing b = leaf(first);
    for (int t = first + 1; t <= last; ++t) b = join(std::move(b), leaf(t));
    return b;
}

Bracketing Bracketing::right_nested(int first, int last) {
    Bracketing b = leaf(last);
    for (int t = last - 1; t >= first; --t) b = join(leaf(t), std::move(b));
    return b;
}

namespace {

// A basis vector of an entry of a product of r factors: junction indices
// j_0 .. j_r (j_0 = row, j_r = column) and a basis index alpha_t in each factor.
struct MultiIndex {
    std::vector<int> junction;
    std::vector<long long> alpha;
};

void append_key(const Bracketing& b, const MultiIndex& x, std::vector<long long>& key) {
    if (b.is_leaf()) {
        key.push_back(x.alpha[static_cast<std::size_t>(b.first())]);
        return;
    }
    key.push_back(x.junction[static_cast<std::size_t>(b.right().first())]);
    append_key(b.left(), x, key);
    append_key(b.right(), x, key);
}

void enumerate(std::span<const DimMatrix> factors, std::size_t t, MultiIndex& cur, int column,
               std::vector<MultiIndex>& out) {
    const std::size_t r = factors.size();
    const int n = static_cast<int>(factors[0].rows());
    const int row = cur.junction[t];
    const int lo = (t + 1 == r) ? column : 0;
    const int hi = (t + 1 == r) ? column + 1 : n;
    for (int next = lo; next < hi; ++next) {
        const long long count = factors[t](row, next);
        cur.junction[t + 1] = next;
        for (long long a = 0; a < count; ++a) {
            cur.alpha[t] = a;
            if (t + 1 == r)
                out.push_back(cur);
            else
                enumerate(factors, t + 1, cur, column, out);
        }
    }
}

std::vector<int> ranks_by(const std::vector<std::vector<long long>>& keys) {
    std::vector<int> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return keys[static_cast<std::size_t>(x)] < keys[static_cast<std::size_t>(y)]; });
    std::vector<int> rank(keys.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        rank[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos);
    return rank;
}

}  // namespace

std::vector<Perm> canonical_map_perms(std::span<const DimMatrix> factors, const Bracketing& source,
                                      const Bracketing& target) {
    if (factors.empty()) throw DomainError("canonical_map: no factors");
    const int last = static_cast<int>(factors.size()) - 1;
    if (source.first() != 0 || source.last() != last || target.first() != 0 ||
        target.last() != last)
        throw DomainError("canonical_map: bracketing does not cover the factors");
    const int n = static_cast<int>(factors[0].rows());
    for (const auto& f : factors)
        if (f.rows() != n || f.cols() != n) throw DomainError("canonical_map: size mismatch");

    std::vector<Perm> perms;
    perms.reserve(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            std::vector<MultiIndex> basis;
            MultiIndex cur{std::vector<int>(factors.size() + 1, 0),
                           std::vector<long long>(factors.size(), 0)};
            cur.junction[0] = i;
            enumerate(factors, 0, cur, k, basis);
            std::vector<std::vector<long long>> src_keys, tgt_keys;
            src_keys.reserve(basis.size());
            tgt_keys.reserve(basis.size());
            for (const auto& x : basis) {
                src_keys.emplace_back();
                append_key(source, x, src_keys.back());
                tgt_keys.emplace_back();
                append_key(target, x, tgt_keys.back());
            }
            const auto src_rank = ranks_by(src_keys);
            const auto tgt_rank = ranks_by(tgt_keys);
            std::vector<int> img(basis.size());
            for (std::size_t x = 0; x < basis.size(); ++x)
                img[static_cast<std::size_t>(src_rank[x])] = tgt_rank[x];
            perms.emplace_back(std::move(img));
        }
    return perms;
}

template <class Entry>
MorMatrix<Entry> canonical_map(std::span<const DimMatrix> factors, const Bracketing& source,
                               const Bracketing& target) {
    auto perms = canonical_map_perms(factors, source, target);
    DimMatrix dims = factors[0];
    for (std::size_t t = 1; t < factors.size(); ++t) dims = obj_product(dims, factors[t]);
    std::vector<Entry> entries;
    entries.reserve(perms.size());
    for (const auto& p : perms) entries.push_back(entry_traits<Entry>::from_perm(p));
    return MorMatrix<Entry>(std::move(dims), std::move(entries));
}

std::vector<Perm> associator_perms(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c) {
    const std::array<DimMatrix, 3> factors{a, b, c};
    return canonical_map_perms(factors, Bracketing::left_nested(0, 2),
                               Bracketing::right_nested(0, 2));
}

template <class Entry>
MorMatrix<Entry> associator(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c) {
    const std::array<DimMatrix, 3> factors{a, b, c};
    return canonical_map<Entry>(factors, Bracketing::left_nested(0, 2),
                                Bracketing::right_nested(0, 2));
}

template <class Entry>
MorMatrix<Entry> associator_inverse(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c) {
    const std::array<DimMatrix, 3> factors{a, b, c};
    return canonical_map<Entry>(factors, Bracketing::right_nested(0, 2),
                                Bracketing::left_nested(0, 2));
}

// ---------------------------------------------------------------------------
// determinants

namespace {

long long checked_mul(long long x, long long y) {
    long long r;
    if (__builtin_mul_overflow(x, y, &r)) throw DomainError("lv_det: exponent overflow");
    return r;
}

}  // namespace

template <class Scalar>
LvMor<Scalar> lv_det(const LvMatrix<Scalar>& f) {
    const int n = f.n();
    if (n > max_det_rank) throw DomainError("lv_det: rank above " + std::to_string(max_det_rank));
    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    LvMor<Scalar> total = lv_identity<Scalar>(0);
    do {
        const Perm p(sigma);
        long long degree = 1;
        for (int k = 0; k < n; ++k) degree = checked_mul(degree, f(k, p(k)).degree);
        Scalar scale(1);
        for (int k = 0; k < n; ++k) {
            long long exponent = 1;
            for (int other = 0; other < n; ++other)
                if (other != k) exponent = checked_mul(exponent, f(other, p(other)).degree);
            if (exponent != 0) scale *= cpow(f(k, p(k)).scale, exponent);
        }
        LvMor<Scalar> term(degree, std::move(scale));
        total = lv_sum(total, p.sign() > 0 ? term : i_inverse(term));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

template <class Scalar>
LvMor<Scalar> big_det(const VMatrix<Scalar>& f) {
    return lv_det(entrywise_lambda(f));
}

namespace {

void require_weakly_invertible(const DimMatrix& d, const char* what) {
    if (!is_weakly_invertible(d))
        throw DomainError(std::string("assoc_sign: ") + what + " " + format_dims(d) +
                          " is not weakly invertible");
}

int sign_of_scale(const LvMor<ExactComplex>& det) {
    if (det.scale == ExactComplex(1)) return 1;
    if (det.scale == ExactComplex(-1)) return -1;
    throw DomainError("associator determinant is not a sign");
}

}  // namespace

int assoc_sign(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c) {
    require_weakly_invertible(a, "A =");
    require_weakly_invertible(b, "B =");
    require_weakly_invertible(c, "C =");
    return sign_of_scale(lv_det(associator<LvMor<ExactComplex>>(a, b, c)));
}

StabilityReport sgn_stability(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c,
                              const DimMatrix& d) {
    require_weakly_invertible(d, "D =");
    using E = LvMor<ExactComplex>;
    StabilityReport r;
    r.base_sign = assoc_sign(a, b, c);
    const auto ua = associator<E>(a, b, c);
    const auto id = LvMatrix<ExactComplex>::identity(d);
    r.right_sign = sign_of_scale(lv_det(mor_product(ua, id)));
    r.left_sign = sign_of_scale(lv_det(mor_product(id, ua)));
    r.stable = r.right_sign == r.base_sign && r.left_sign == r.base_sign;
    return r;
}

StabilitySweep sgn_stability_sweep(std::span<const std::array<DimMatrix, 4>> instances) {
    StabilitySweep sweep;
    for (const auto& inst : instances) {
        ++sweep.checked;
        if (!sgn_stability(inst[0], inst[1], inst[2], inst[3]).stable) {
            sweep.passed = false;
            sweep.counterexample = inst;
            break;
        }
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// instantiations

#define BIVECT_INSTANTIATE_ENTRY(E)                                                              \
    template class MorMatrix<E>;                                                                 \
    template MorMatrix<E> mor_product<E>(const MorMatrix<E>&, const MorMatrix<E>&);              \
    template MorMatrix<E> mor_compose<E>(const MorMatrix<E>&, const MorMatrix<E>&);              \
    template MorMatrix<E> mor_inverse<E>(const MorMatrix<E>&);                                   \
    template MorMatrix<E> block_sum<E>(const MorMatrix<E>&, const MorMatrix<E>&);                \
    template MorMatrix<E> canonical_map<E>(std::span<const DimMatrix>, const Bracketing&,        \
                                           const Bracketing&);                                   \
    template MorMatrix<E> associator<E>(const DimMatrix&, const DimMatrix&, const DimMatrix&);   \
    template MorMatrix<E> associator_inverse<E>(const DimMatrix&, const DimMatrix&,              \
                                                const DimMatrix&);

#define BIVECT_INSTANTIATE_MATRIX_CAT(S)                                     \
    BIVECT_INSTANTIATE_ENTRY(VMor<S>)                                        \
    BIVECT_INSTANTIATE_ENTRY(LvMor<S>)                                       \
    template LvMatrix<S> entrywise_lambda<S>(const VMatrix<S>&);             \
    template double mor_residual<S>(const VMatrix<S>&, const VMatrix<S>&);   \
    template double mor_residual<S>(const LvMatrix<S>&, const LvMatrix<S>&); \
    template LvMor<S> lv_det<S>(const LvMatrix<S>&);                         \
    template LvMor<S> big_det<S>(const VMatrix<S>&);

BIVECT_INSTANTIATE_MATRIX_CAT(ExactComplex)
BIVECT_INSTANTIATE_MATRIX_CAT(ApproxComplex)

}  // namespace bivect
