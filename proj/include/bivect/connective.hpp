#ifndef BIVECT_CONNECTIVE_HPP
#define BIVECT_CONNECTIVE_HPP

// Connective structures on sampled charted 2-vector bundles. Connections are
// matrix-valued 1-forms on a regular lattice, acting as d + A; only
// approximate scalars are supported.

#include "bivect/charted.hpp"

#include <array>
#include <optional>

namespace bivect {

/// Regular lattice [lo, lo + (size-1) h]^dimension; point ids are row-major
/// with the first coordinate fastest.
struct Lattice {
    int dimension = 1;
    double lo = 0.0;
    double h = 0.05;
    int size = 21;

    int num_points() const;
    std::array<int, 2> index(int point) const;
    int point(std::array<int, 2> index) const;
    double coordinate(int point, int axis) const;
    /// The point `steps` lattice steps along `axis`, if it is in the box.
    std::optional<int> neighbor(int point, int axis, int steps) const;
};

/// Sampled cover data: U_a and the shrunk U'_a as point sets, and bump
/// functions psi_a on the whole lattice.
struct SampledBase {
    Lattice lattice;
    std::map<int, std::vector<int>> membership;
    std::map<int, std::vector<int>> shrunk;
    std::map<int, std::vector<double>> psi;

    std::vector<int> indices() const;
    bool in(int alpha, int point) const;
    bool in_shrunk(int alpha, int point) const;
    /// {a : x in U_a}
    std::vector<int> active(int point) const;
    /// Points of U'_{a0...ak}.
    std::vector<int> shrunk_points(const Simplex& s) const;
};

/// Violated base invariants (psi range, psi = 1 on U', psi = 0 off U, U' in U,
/// lattice neighbours of U' inside U); empty when consistent.
std::vector<std::string> check_base(const SampledBase& base);

using Block = Eigen::MatrixXcd;

/// n x n matrix of square blocks, block (i, j) of size dims(i, j).
class BlockMatrix {
public:
    BlockMatrix() = default;
    /// Throws DomainError when a block has the wrong size.
    BlockMatrix(DimMatrix dims, std::vector<Block> blocks);
    static BlockMatrix zero(const DimMatrix& dims);

    int n() const { return static_cast<int>(dims_.rows()); }
    const DimMatrix& dims() const { return dims_; }
    const Block& operator()(int i, int j) const { return blocks_[index(i, j)]; }
    Block& operator()(int i, int j) { return blocks_[index(i, j)]; }
    const std::vector<Block>& blocks() const { return blocks_; }

    BlockMatrix& operator+=(const BlockMatrix& o);
    BlockMatrix& operator*=(double s);
    friend BlockMatrix operator+(BlockMatrix a, const BlockMatrix& b) { return a += b; }
    friend BlockMatrix operator*(double s, BlockMatrix a) { return a *= s; }

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n()) +
               static_cast<std::size_t>(j);
    }
    DimMatrix dims_;
    std::vector<Block> blocks_;
};

/// Largest entry modulus of a - b.
double max_abs_diff(const BlockMatrix& a, const BlockMatrix& b);

/// Value of a connection at one point: one BlockMatrix per lattice direction.
using FormValue = std::vector<BlockMatrix>;

double max_abs_diff(const FormValue& a, const FormValue& b);

/// A connection matrix on U_{ab} x E^{ab}, sampled on lattice points.
struct ConnectionField {
    Simplex pair;
    DimMatrix dims;
    int directions = 1;
    std::map<int, FormValue> values;

    bool defined_at(int point) const { return values.count(point) != 0; }
    const FormValue& at(int point) const;
    void set(int point, FormValue v);
};

struct ConnectiveStructure {
    std::map<Simplex, ConnectionField> fields;

    const ConnectionField& operator()(int a, int b) const;
};

/// Sampled coherency maps of one triple.
using PhiSamples = std::map<int, VMatrix<ApproxComplex>>;

/// Per entry (i, k): block diagonal over j of A_ij (x) I + I (x) B_jk.
BlockMatrix block_product(const BlockMatrix& a, const BlockMatrix& b);
FormValue form_product(const FormValue& a, const FormValue& b);

/// The induced connection on E^{ab}.E^{bc}, on the common points.
ConnectionField conn_product(const ConnectionField& a, const ConnectionField& b);

/// A -> phi A phi^{-1} + phi d(phi^{-1}) at one point; d is the central
/// difference, or the second-order one-sided stencil at the edge of the
/// sampled region of phi.
FormValue gauge_at(const FormValue& a, const PhiSamples& phi, const Lattice& lattice, int point);
ConnectionField gauge_transform(const ConnectionField& f, const PhiSamples& phi,
                                const Lattice& lattice);

/// A o B = ((phi^{abc})^{-1})^* (A.B) at the points where A, B and phi are
/// all sampled.
ConnectionField circ_product(const ConnectionField& a, const ConnectionField& b,
                             const PhiSamples& phi, const Lattice& lattice);

/// Pointwise sum of w_i(x) F_i(x) over the common points; weights must sum to
/// 1 within 1e-12 there.
ConnectionField convex_combine(const std::vector<ConnectionField>& fields,
                               const std::vector<std::map<int, double>>& weights);

/// Increasing sequences from a to b through the indices.
std::vector<Simplex> chains(const std::vector<int>& indices, int a, int b);

/// psi_chain = prod_i psi_{a_i} psi_{a_{i+1}} prod_{a_i < g < a_{i+1}} (1 - psi_g)
/// at every lattice point.
std::vector<double> chain_weights(const SampledBase& base, const Simplex& chain);

/// Partition-of-unity construction: on U'_{ab} the psi-weighted average over
/// chains of the left-to-right o-fold of the seeds.
ConnectiveStructure build_connective(const ChartedBundle<ApproxComplex>& bundle,
                                     const SampledBase& base,
                                     const std::map<Simplex, ConnectionField>& seeds);

struct CocycleResidual {
    Simplex triple;
    int point = 0;
    double residual = 0.0;
};

struct ConnectiveReport {
    double max_residual = 0.0;
    int checked_points = 0;
    std::map<Simplex, double> per_triple;
    std::optional<CocycleResidual> worst;
};

/// |A^{ab} o A^{bc} - A^{ac}| at every U'_{abc} point.
ConnectiveReport connective_residuals(const ChartedBundle<ApproxComplex>& bundle,
                                      const SampledBase& base, const ConnectiveStructure& s);

/// t S1 + (1 - t) S2, re-validated; throws DomainError above `tolerance`.
ConnectiveStructure contractibility_check(const ChartedBundle<ApproxComplex>& bundle,
                                          const SampledBase& base, const ConnectiveStructure& s1,
                                          const ConnectiveStructure& s2, double t,
                                          double tolerance = 1e-9);

/// A lattice path with `refine` midpoint steps per segment. The simplex names
/// the intersection the path must stay in.
struct PathSpec {
    Simplex simplex;
    std::vector<int> points;
    int refine = 1;
};

/// Splits straight segments at intermediate lattice points; throws unless
/// consecutive points are distinct.
std::vector<int> expand_path(const Lattice& lattice, const std::vector<int>& points);

/// Solves dP/dt = -A(x') P blockwise by the explicit midpoint rule with A
/// linear along each segment. Throws DomainError if the path leaves the
/// field's domain.
VMatrix<ApproxComplex> parallel_transport(const ConnectionField& field, const Lattice& lattice,
                                          const std::vector<int>& points, int refine);

struct TransportReport {
    Simplex triple;
    /// |P^{ac} o phi(start) - phi(end) o (P^{ab}.P^{bc})|
    double square_residual = 0.0;
    /// The same square after DGer.
    double dger_residual = 0.0;
    double residual() const { return std::max(square_residual, dger_residual); }
};

/// Transport along a path through U'_{abc} for the three pairs of the triple.
TransportReport gerbe_transport_check(const OrientedChartedBundle<ApproxComplex>& bundle,
                                      const ConnectiveStructure& s, const Lattice& lattice,
                                      const PathSpec& path);

/// Keeps the lattice points with all indices even; returns the coarse lattice
/// and the map from fine to coarse point ids.
std::pair<Lattice, std::map<int, int>> coarsen(const Lattice& lattice);

}  // namespace bivect

#endif  // BIVECT_CONNECTIVE_HPP
