#ifndef BIVECT_CHARTED_HPP
#define BIVECT_CHARTED_HPP

// Charted 2-vector bundles over finite ordered covers: cocycle validation,
// the associator-sign 3-cocycle, orientation lifting over GF(2), and the
// determinant gerbe.

#include "bivect/oriented.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bivect {

/// Strictly increasing tuple of cover indices.
using Simplex = std::vector<int>;

std::string format_simplex(const Simplex& s);

/// Raised when a computed invariant breaks an identity that holds by theory
/// (signals a bug, not bad input).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Finite totally ordered cover, its nerve (pairs through quintuples) and the
/// sample points of each intersection. A simplex with no points is "marked
/// empty": it carries combinatorics but no sampled data.
class OrderedCover {
public:
    /// Validates ordering, face closure and point containment.
    OrderedCover(std::vector<int> indices, std::map<Simplex, std::vector<int>> simplices);

    /// Every nonempty intersection of the given point sets, pairs through
    /// quintuples.
    static OrderedCover from_membership(const std::map<int, std::vector<int>>& membership);

    const std::vector<int>& indices() const { return indices_; }
    const std::map<Simplex, std::vector<int>>& simplices() const { return simplices_; }
    bool contains(const Simplex& s) const { return simplices_.count(s) != 0; }
    const std::vector<int>& points(const Simplex& s) const;
    /// Simplices with `size` indices, in lexicographic order.
    std::vector<Simplex> simplices_of_size(std::size_t size) const;

    /// Keeps only the given sample points; the nerve itself is unchanged.
    OrderedCover restrict_points(const std::set<int>& keep) const;

private:
    std::vector<int> indices_;
    std::map<Simplex, std::vector<int>> simplices_;
};

/// Faces of a simplex, the i-th face omitting vertex i.
std::vector<Simplex> faces(const Simplex& s);

template <class Scalar>
struct ChartedBundle {
    OrderedCover cover;
    int rank = 1;
    /// E^{ab} per pair.
    std::map<Simplex, DimMatrix> dims;
    /// phi^{abc}(x): E^{ab}.E^{bc} -> E^{ac} per triple and sample point.
    std::map<Simplex, std::map<int, VMatrix<Scalar>>> phis;

    const DimMatrix& dim(int a, int b) const;
    const VMatrix<Scalar>& phi(const Simplex& triple, int point) const;
};

struct Violation {
    enum class Kind {
        structure,
        not_weakly_invertible,
        object_condition,
        dimension_mismatch,
        missing_sample,
        cocycle,
        orientation,
        gerbe_cocycle
    };
    Kind kind;
    Simplex simplex;
    std::optional<int> point;
    double residual = 0.0;
    std::string message;
};

std::string to_string(Violation::Kind k);

struct BundleReport {
    bool valid = true;
    double max_residual = 0.0;
    int checked_quadruples = 0;
    int checked_points = 0;
    std::vector<Violation> violations;

    void add(Violation v);
};

/// Checks the object condition, weak invertibility, and at each sample point
/// of each quadruple a<b<c<d
///   phi^{abd} o (id . phi^{bcd}) = phi^{acd} o (phi^{abc} . id) o ua^{-1},
/// ua^{-1}: E^{ab}.(E^{bc}.E^{cd}) -> (E^{ab}.E^{bc}).E^{cd}. Exact scalars
/// compare exactly; approximate scalars within `tolerance`.
template <class Scalar>
BundleReport validate_bundle(const ChartedBundle<Scalar>& bundle, double tolerance = 1e-9);

class InvalidBundleError : public DomainError {
public:
    explicit InvalidBundleError(BundleReport r);
    const BundleReport& report() const { return report_; }

private:
    BundleReport report_;
};

/// Cech cochain with values in {+1, -1}.
struct SignCochain {
    int degree = 3;
    std::map<Simplex, int> values;

    int operator()(const Simplex& s) const;
    bool is_trivial() const;
};

/// sgn(ua^{abcd}) = assoc_sign(E^{ab}, E^{bc}, E^{cd}) on every quadruple. The
/// five-term identity is re-checked on every quintuple of the nerve.
template <class Scalar>
SignCochain sign_cocycle(const ChartedBundle<Scalar>& bundle);

/// (dc)(abcd) = c(bcd) c(acd) c(abd) c(abc) on every quadruple of the cover.
SignCochain cech_coboundary(const OrderedCover& cover, const SignCochain& c);

/// Checks the five-term identity on every quintuple; returns the offending
/// quintuples.
std::vector<Simplex> cocycle_defects(const OrderedCover& cover, const SignCochain& c);

/// A set of quadruple equations whose left-hand sides cancel over GF(2) while
/// the product of their signs is -1.
struct ObstructionWitness {
    std::vector<Simplex> quadruples;
};

/// Solves dc = cocycle for a 2-cochain c, or certifies that no such c exists
/// on this nerve.
std::variant<SignCochain, ObstructionWitness> solve_orientation(const OrderedCover& cover,
                                                                const SignCochain& cocycle);

bool verify_witness(const OrderedCover& cover, const SignCochain& cocycle,
                    const ObstructionWitness& witness);

template <class Scalar>
struct OrientedChartedBundle {
    ChartedBundle<Scalar> base;
    /// Sign on every triple.
    SignCochain lift{2, {}};
};

/// Base validation plus, per quadruple,
///   lift(acd) lift(abc) sgn(ua^{abcd}) = lift(abd) lift(bcd).
template <class Scalar>
BundleReport validate_oriented(const OrientedChartedBundle<Scalar>& bundle,
                               double tolerance = 1e-9);

/// Lifts the coherency maps to the oriented category when the sign class
/// vanishes on this nerve. Throws InvalidBundleError for an invalid bundle.
template <class Scalar>
std::variant<OrientedChartedBundle<Scalar>, ObstructionWitness> orient_lift(
    const ChartedBundle<Scalar>& bundle, double tolerance = 1e-9);

/// Multiplicative Cech 2-cochain with values in C*, sampled per point.
template <class Scalar>
struct ChartedGerbe {
    OrderedCover cover;
    std::map<Simplex, std::map<int, Scalar>> values;

    const Scalar& operator()(const Simplex& triple, int point) const;
};

/// Residual of c(bcd) c(abd) = c(acd) c(abc) at every quadruple sample point.
template <class Scalar>
BundleReport validate_gerbe(const ChartedGerbe<Scalar>& gerbe, double tolerance = 1e-9);

/// c(abc)(x) = DGer(phi^{abc}(x), lift(abc)). Throws InvalidBundleError if the
/// result fails the gerbe cocycle identity.
template <class Scalar>
ChartedGerbe<Scalar> det_gerbe(const OrientedChartedBundle<Scalar>& bundle,
                               double tolerance = 1e-9);

/// The rank-n charted bundle obtained by including a gerbe: identity dims and
/// phi = gerbe_include(c(x), n), oriented by the trivial lift.
template <class Scalar>
OrientedChartedBundle<Scalar> bundle_from_gerbe(const ChartedGerbe<Scalar>& gerbe, int rank);

/// Restricts all sampled data to the given points.
template <class Scalar>
ChartedBundle<Scalar> restrict_points(const ChartedBundle<Scalar>& bundle,
                                      const std::set<int>& keep);

}  // namespace bivect

#endif  // BIVECT_CHARTED_HPP
