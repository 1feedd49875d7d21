#ifndef BIVECT_FIXTURES_HPP
#define BIVECT_FIXTURES_HPP

// Generators for valid test bundles, covers and sampled bases. Used by the
// tests, the acceptance suite and the golden-fixture tool.

#include "bivect/connective.hpp"

#include <cstdint>
#include <random>

namespace bivect::fixtures {

using Rng = std::mt19937_64;

/// Nonnegative integer matrix with det +-1, built from random elementary row
/// operations; entries stay <= max_entry.
DimMatrix random_weakly_invertible(Rng& rng, int n, long long max_entry = 3);

template <class Scalar>
Scalar random_scalar(Rng& rng);

/// Random invertible entries of the given sizes.
template <class Scalar>
VMatrix<Scalar> random_automorphism(Rng& rng, const DimMatrix& dims);

/// Nerve of the full simplex on `vertices` charts (simplices up to
/// quintuples), or of its boundary when `boundary` is set. Every simplex gets
/// the given sample points.
OrderedCover simplex_cover(int vertices, bool boundary, const std::vector<int>& points = {0});

/// Bundle with E^{ab} = D_a ... D_{b-1} for consecutive edge dims D and phi the
/// canonical rebracketing (D_a..D_{b-1})(D_b..D_{c-1}) -> D_a..D_{c-1}, left
/// nested throughout. Edges are indexed by position in the cover's index list.
template <class Scalar>
ChartedBundle<Scalar> canonical_bundle(const OrderedCover& cover, int rank,
                                       const std::vector<DimMatrix>& edges);

/// phi'^{abc} = g^{ac} o phi^{abc} o (g^{ab} . g^{bc})^{-1} with g given per
/// pair and point; validity is preserved.
template <class Scalar>
ChartedBundle<Scalar> gauge_bundle(const ChartedBundle<Scalar>& bundle,
                                   const std::map<Simplex, std::map<int, VMatrix<Scalar>>>& gauges);

/// gauge_bundle with random g^{ab}, either one per pair or one per pair and
/// point.
template <class Scalar>
ChartedBundle<Scalar> random_gauge(const ChartedBundle<Scalar>& bundle, Rng& rng,
                                   bool per_point);

/// [[1,1],[0,1]], [[0,1],[1,1]], [[1,0],[1,1]]
std::array<DimMatrix, 3> nonmoi_triple();

/// Four charts on the full simplex whose edge dims are the triple above, so
/// that the associator sign at (0,1,2,3) is -1. Randomly gauged.
template <class Scalar>
ChartedBundle<Scalar> nonmoi_bundle(std::uint64_t seed, const std::vector<int>& points = {0});

/// -1 on the first quadruple, +1 elsewhere. On the boundary of the 4-simplex
/// this represents the generator of the top cohomology.
SignCochain fundamental_class(const OrderedCover& cover);

/// Random 2-cochain on the triples of the cover.
SignCochain random_cochain(const OrderedCover& cover, Rng& rng);

/// Charts U_a = I_a^m on [0,1]^m with I_a = (0.1a, 0.7 + 0.1a), U'_a shrunk by
/// 0.1 on every side and psi_a a smooth product bump.
SampledBase interval_base(int dimension, double h, int charts = 4);

struct ConnectiveFixture {
    SampledBase base;
    ChartedBundle<ApproxComplex> bundle;
    std::map<Simplex, ConnectionField> seeds;
};

/// Bundle, base and smooth seed connections with coefficients drawn from
/// `seed`, so the same data can be sampled at different spacings h. With
/// `smooth_gauge` the coherency maps vary smoothly in space, otherwise they
/// are constant.
ConnectiveFixture connective_fixture(int dimension, double h, int rank, bool smooth_gauge,
                                     std::uint64_t seed);

/// Lattice point nearest to the given coordinates.
int nearest_point(const Lattice& lattice, double x, double y = 0.0);

}  // namespace bivect::fixtures

#endif  // BIVECT_FIXTURES_HPP
