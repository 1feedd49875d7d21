#include "bivect/oriented.hpp"

namespace bivect {

template <class Entry>
OrientedMor<Entry>::OrientedMor(MorMatrix<Entry> base, int sign)
    : base_(std::move(base)), sign_(sign) {
    if (sign_ != 1 && sign_ != -1) throw DomainError("OrientedMor: sign must be +1 or -1");
    if (!is_weakly_invertible(base_.dims()))
        throw DomainError("OrientedMor: object " + format_dims(base_.dims()) +
                          " is not weakly invertible");
}

template <class Entry>
OrientedMor<Entry> o_compose(const OrientedMor<Entry>& x, const OrientedMor<Entry>& y) {
    return {mor_compose(x.base(), y.base()), x.sign() * y.sign()};
}

template <class Entry>
OrientedMor<Entry> o_product(const OrientedMor<Entry>& x, const OrientedMor<Entry>& y) {
    return {mor_product(x.base(), y.base()), x.sign() * y.sign()};
}

template <class Entry>
OrientedMor<Entry> o_associator(const DimMatrix& a, const DimMatrix& b, const DimMatrix& c) {
    return {associator<Entry>(a, b, c), assoc_sign(a, b, c)};
}

template <class Entry>
OrientedMor<Entry> o_block_sum(const OrientedMor<Entry>& x, const OrientedMor<Entry>& y) {
    return {block_sum(x.base(), y.base()), x.sign() * y.sign()};
}

template <class Scalar>
OrientedLv<Scalar> o_lambda(const OrientedV<Scalar>& x) {
    return {entrywise_lambda(x.base()), x.sign()};
}

namespace {

template <class Scalar>
LvStarMor<Scalar> twist_by_sign(const LvMor<Scalar>& det, int sign) {
    const auto unit = to_lv_star(det);
    return lv_star_tensor(unit, LvStarMor<Scalar>(1, Scalar(sign)));
}

}  // namespace

template <class Scalar>
LvStarMor<Scalar> o_det(const OrientedLv<Scalar>& x) {
    return twist_by_sign(lv_det(x.base()), x.sign());
}

template <class Scalar>
LvStarMor<Scalar> o_big_det(const OrientedV<Scalar>& x) {
    return twist_by_sign(big_det(x.base()), x.sign());
}

namespace {

template <class Scalar>
Lv1Mor<Scalar> closed_form_dger(const LvMor<Scalar>& det, int sign) {
    const auto unit = to_lv_star(det);
    return Lv1Mor<Scalar>(cpow(unit.scale, unit.degree) * Scalar(sign));
}

}  // namespace

template <class Scalar>
Lv1Mor<Scalar> dger(const OrientedV<Scalar>& x) {
    return closed_form_dger(big_det(x.base()), x.sign());
}

template <class Scalar>
Lv1Mor<Scalar> dger(const OrientedLv<Scalar>& x) {
    return closed_form_dger(lv_det(x.base()), x.sign());
}

template <class Entry>
OrientedMor<Entry> gerbe_include(const Lv1Mor<typename entry_traits<Entry>::scalar_type>& a,
                                 int n) {
    using Scalar = typename entry_traits<Entry>::scalar_type;
    if (n < 1) throw DomainError("gerbe_include: rank must be positive");
    const DimMatrix dims = dim_identity(n);
    std::vector<Entry> entries = MorMatrix<Entry>::identity(dims).entries();
    if constexpr (entry_traits<Entry>::is_lv) {
        entries[0] = LvMor<Scalar>(1, a.scale);
    } else {
        Matrix<Scalar> m(1, 1);
        m(0, 0) = a.scale;
        entries[0] = VMor<Scalar>::trusted(std::move(m));
    }
    return {MorMatrix<Entry>(dims, std::move(entries)), 1};
}

#define BIVECT_INSTANTIATE_ORIENTED_ENTRY(E)                                                    \
    template class OrientedMor<E>;                                                              \
    template OrientedMor<E> o_compose<E>(const OrientedMor<E>&, const OrientedMor<E>&);         \
    template OrientedMor<E> o_product<E>(const OrientedMor<E>&, const OrientedMor<E>&);         \
    template OrientedMor<E> o_associator<E>(const DimMatrix&, const DimMatrix&,                 \
                                            const DimMatrix&);                                  \
    template OrientedMor<E> o_block_sum<E>(const OrientedMor<E>&, const OrientedMor<E>&);       \
    template OrientedMor<E> gerbe_include<E>(const Lv1Mor<entry_traits<E>::scalar_type>&, int);

#define BIVECT_INSTANTIATE_ORIENTED(S)                           \
    BIVECT_INSTANTIATE_ORIENTED_ENTRY(VMor<S>)                   \
    BIVECT_INSTANTIATE_ORIENTED_ENTRY(LvMor<S>)                  \
    template OrientedLv<S> o_lambda<S>(const OrientedV<S>&);     \
    template LvStarMor<S> o_det<S>(const OrientedLv<S>&);        \
    template LvStarMor<S> o_big_det<S>(const OrientedV<S>&);     \
    template Lv1Mor<S> dger<S>(const OrientedV<S>&);             \
    template Lv1Mor<S> dger<S>(const OrientedLv<S>&);

BIVECT_INSTANTIATE_ORIENTED(ExactComplex)
BIVECT_INSTANTIATE_ORIENTED(ApproxComplex)

}  // namespace bivect
