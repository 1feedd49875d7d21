#ifndef BIVECT_MATRIX_CAT_HPP
#define BIVECT_MATRIX_CAT_HPP

// Matrix categories M_n(V) and M_n(LV): objects are integer dimension
// matrices, morphisms are matrices of entry morphisms, the product is
// (E.F)_ik = sum_j E_ij (x) F_jk with j ascending.

#include "bivect/biperm.hpp"

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bivect {

using DimMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

DimMatrix dim_identity(int n);
DimMatrix dim_from_rows(const std::vector<std::vector<long long>>& rows);
/// Integer matrix product; the object part of the monoidal product.
DimMatrix obj_product(const DimMatrix& a, const DimMatrix& b);
DimMatrix block_sum(const DimMatrix& a, const DimMatrix& b);
/// Exact integer determinant (fraction-free elimination).
long long int_det(const DimMatrix& a);

struct WeakInvCert {
    DimMatrix dims;
    long long detdim = 0;
    bool weakly_invertible() const { return detdim == 1 || detdim == -1; }
};

WeakInvCert certify(const DimMatrix& dims);
bool is_weakly_invertible(const DimMatrix& dims);

// ---------------------------------------------------------------------------
// entry morphisms

template <class Entry>
struct entry_traits;

template <class Scalar>
struct entry_traits<VMor<Scalar>> {
    using scalar_type = Scalar;
    static constexpr bool is_lv = false;
    static long long dim(const VMor<Scalar>& f) { return f.dim(); }
    static VMor<Scalar> identity(long long d) { return VMor<Scalar>::identity(static_cast<int>(d)); }
    static VMor<Scalar> from_perm(const Perm& p) { return s_functor<Scalar>(p); }
    static VMor<Scalar> sum(const VMor<Scalar>& f, const VMor<Scalar>& g) { return v_sum(f, g); }
    static VMor<Scalar> tensor(const VMor<Scalar>& f, const VMor<Scalar>& g) {
        return v_tensor(f, g);
    }
    static VMor<Scalar> compose(const VMor<Scalar>& f, const VMor<Scalar>& g) {
        return v_compose(f, g);
    }
    static VMor<Scalar> inverse(const VMor<Scalar>& f) { return v_inverse(f); }
};

template <class Scalar>
struct entry_traits<LvMor<Scalar>> {
    using scalar_type = Scalar;
    static constexpr bool is_lv = true;
    static long long dim(const LvMor<Scalar>& x) { return x.degree; }
    static LvMor<Scalar> identity(long long d) { return lv_identity<Scalar>(d); }
    static LvMor<Scalar> from_perm(const Perm& p) { return sgn_functor<Scalar>(p); }
    static LvMor<Scalar> sum(const LvMor<Scalar>& x, const LvMor<Scalar>& y) { return lv_sum(x, y); }
    static LvMor<Scalar> tensor(const LvMor<Scalar>& x, const LvMor<Scalar>& y) {
        return lv_tensor(x, y);
    }
    static LvMor<Scalar> compose(const LvMor<Scalar>& x, const LvMor<Scalar>& y) {
        return lv_compose(x, y);
    }
    static LvMor<Scalar> inverse(const LvMor<Scalar>& x) {
        return {x.degree, cpow(x.scale, -1)};
    }
};

/// An automorphism of the object `dims`: entry (i, j) has dimension (or LV
/// degree) dims(i, j).
template <class Entry>
class MorMatrix {
public:
    using entry_type = Entry;

    /// Row-major entries; throws DomainError on a size or dimension mismatch.
    MorMatrix(DimMatrix dims, std::vector<Entry> entries);

    static MorMatrix identity(const DimMatrix& dims);

    int n() const { return static_cast<int>(dims_.rows()); }
    const DimMatrix& dims() const { return dims_; }
    const Entry& operator()(int i, int j) const { return entries_[index(i, j)]; }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n()) +
               static_cast<std::size_t>(j);
    }
    DimMatrix dims_;
    std::vector<Entry> entries_;
};

template <class Scalar>
using VMatrix = MorMatrix<VMor<Scalar>>;
template <class Scalar>
using LvMatrix = MorMatrix<LvMor<Scalar>>;

/// (F.G)_ik = F_i1 (x) G_1k + ... + F_in (x) G_nk.
template <class Entry>
MorMatrix<Entry> mor_product(const MorMatrix<Entry>& f, const MorMatrix<Entry>& g);
/// Entrywise f after g; both must live on the same object.
template <class Entry>
MorMatrix<Entry> mor_compose(const MorMatrix<Entry>& f, const MorMatrix<Entry>& g);
template <class Entry>
MorMatrix<Entry> mor_inverse(const MorMatrix<Entry>& f);
/// Block diagonal; off-diagonal blocks are the 0-object with its identity.
template <class Entry>
MorMatrix<Entry> block_sum(const MorMatrix<Entry>& f, const MorMatrix<Entry>& g);

template <class Scalar>
LvMatrix<Scalar> entrywise_lambda(const VMatrix<Scalar>& f);

/// Largest entrywise deviation between two morphism matrices on the same
/// object; exactly 0 iff they are equal (exact scalars).
template <class Scalar>
double mor_residual(const VMatrix<Scalar>& f, const VMatrix<Scalar>& g);
template <class Scalar>
double mor_residual(const LvMatrix<Scalar>& f, const LvMatrix<Scalar>& g);

// ---------------------------------------------------------------------------
// canonical maps between bracketings

/// A full bracketing of factors first..last (inclusive).
class Bracketing {
public:
    static Bracketing leaf(int factor);
    static Bracketing join(Bracketing left, Bracketing right);
    /// ((f0 f1) f2) ...
    static Bracketing left_nested(int first, int last);
    /// f0 (f1 (f2 ...))
    static Bracketing right_nested(int first, int last);

    int first() const { return first_; }
    int last() const { return last_; }
    bool is_leaf() const { return !left_; }
    const Bracketing& left() const { return *left_; }
    const Bracketing& right() const { return *right_; }

private:
    Bracketing() = default;
    int first_ = 0;
    int last_ = 0;
    std::shared_ptr<const Bracketing> left_;
    std::shared_ptr<const Bracketing> right_;
};

/// Per entry (row-major) the permutation taking the basis of the product of
/// `factors` bracketed as `source` to the same basis vectors ordered as in
/// `target`. Both brackets must cover all factors.
std::vector<Perm> canonical_map_perms(std::span<const DimMatrix> factors, const Bracketing& source,
                                      const Bracketing& target);

template <class Entry>
MorMatrix<Entry> canonical_map(std::span<const DimMatrix> factors, const Bracketing& source,
                               const Bracketing& target);

/// Associator (A.B).C -> A.(B.C), entry by entry the rank map from the
/// lexicographic order (l, p, a, b, c) to (p, a, l, b, c).
std::vector<Perm> associator_perms(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c);

template <class Entry>
MorMatrix<Entry> associator(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c);
/// A.(B.C) -> (A.B).C
template <class Entry>
MorMatrix<Entry> associator_inverse(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c);

// ---------------------------------------------------------------------------
// determinants

inline constexpr int max_det_rank = 8;

/// Leibniz determinant with coefficients in LV; odd permutations enter through
/// the weakly strict inverse i.
template <class Scalar>
LvMor<Scalar> lv_det(const LvMatrix<Scalar>& f);

/// Det = det o M_n(Lambda).
template <class Scalar>
LvMor<Scalar> big_det(const VMatrix<Scalar>& f);

/// The sign s with det(associator(A, B, C)) = (+-1, s). All three and their
/// products must be weakly invertible.
int assoc_sign(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c);

struct StabilityReport {
    bool stable = true;
    int base_sign = 1;
    int right_sign = 1;  // sign of (associator . id_D)
    int left_sign = 1;   // sign of (id_D . associator)
};

/// Compares sgn(ua_{A,B,C}) with the signs after multiplying by id_D on either
/// side. D must be weakly invertible.
StabilityReport sgn_stability(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c,
                              const DimMatrix& d);

struct StabilitySweep {
    bool passed = true;
    int checked = 0;
    std::optional<std::array<DimMatrix, 4>> counterexample;
};

StabilitySweep sgn_stability_sweep(std::span<const std::array<DimMatrix, 4>> instances);

std::string format_dims(const DimMatrix& d);

}  // namespace bivect

#endif  // BIVECT_MATRIX_CAT_HPP
