#ifndef BIVECT_ORIENTED_HPP
#define BIVECT_ORIENTED_HPP

// Oriented categories oGL_n(V) and oGL_n(LV): morphisms carry an extra sign,
// associators are lifted to (ua, sgn(ua)) so that oDet and DGer = p o oDet
// become strict monoidal.

#include "bivect/matrix_cat.hpp"

namespace bivect {

/// (f, s) with f an automorphism of a weakly invertible object.
template <class Entry>
class OrientedMor {
public:
    /// Throws DomainError unless |det dims| = 1 and sign is +-1.
    OrientedMor(MorMatrix<Entry> base, int sign);

    static OrientedMor identity(const DimMatrix& dims) {
        return OrientedMor(MorMatrix<Entry>::identity(dims), 1);
    }

    const MorMatrix<Entry>& base() const { return base_; }
    const DimMatrix& dims() const { return base_.dims(); }
    int sign() const { return sign_; }
    int n() const { return base_.n(); }

private:
    MorMatrix<Entry> base_;
    int sign_;
};

template <class Scalar>
using OrientedV = OrientedMor<VMor<Scalar>>;
template <class Scalar>
using OrientedLv = OrientedMor<LvMor<Scalar>>;

template <class Entry>
OrientedMor<Entry> o_compose(const OrientedMor<Entry>& x, const OrientedMor<Entry>& y);
template <class Entry>
OrientedMor<Entry> o_product(const OrientedMor<Entry>& x, const OrientedMor<Entry>& y);
/// (ua_{A,B,C}, sgn(ua_{A,B,C})).
template <class Entry>
OrientedMor<Entry> o_associator(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c);
/// Block sum of the bases, product of the signs.
template <class Entry>
OrientedMor<Entry> o_block_sum(const OrientedMor<Entry>& x, const OrientedMor<Entry>& y);

/// Forgetful functor P.
template <class Entry>
const MorMatrix<Entry>& forget_sign(const OrientedMor<Entry>& x) {
    return x.base();
}

/// oM_n(Lambda): entrywise determinant, sign kept.
template <class Scalar>
OrientedLv<Scalar> o_lambda(const OrientedV<Scalar>& x);

/// odet(f, s) = det(f) (x) (1, s) = (d, a s^d).
template <class Scalar>
LvStarMor<Scalar> o_det(const OrientedLv<Scalar>& x);
/// oDet(g, s) = Det(g) (x) (1, s).
template <class Scalar>
LvStarMor<Scalar> o_big_det(const OrientedV<Scalar>& x);

/// DGer = p o oDet, in the closed form a^d s.
template <class Scalar>
Lv1Mor<Scalar> dger(const OrientedV<Scalar>& x);
template <class Scalar>
Lv1Mor<Scalar> dger(const OrientedLv<Scalar>& x);

/// Rank-n image of a gerbe scalar: a in entry (0, 0) of the identity matrix
/// object, identities elsewhere, sign +1.
template <class Entry>
OrientedMor<Entry> gerbe_include(const Lv1Mor<typename entry_traits<Entry>::scalar_type>& a,
                                 int n);

}  // namespace bivect

#endif  // BIVECT_ORIENTED_HPP
