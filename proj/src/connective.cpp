#include "bivect/connective.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bivect {

// ---------------------------------------------------------------------------
// lattice and base

int Lattice::num_points() const { return dimension == 1 ? size : size * size; }

std::array<int, 2> Lattice::index(int p) const {
    if (p < 0 || p >= num_points()) throw DomainError("lattice point " + std::to_string(p) + " out of range");
    return dimension == 1 ? std::array<int, 2>{p, 0} : std::array<int, 2>{p % size, p / size};
}

int Lattice::point(std::array<int, 2> idx) const {
    return dimension == 1 ? idx[0] : idx[0] + size * idx[1];
}

double Lattice::coordinate(int p, int axis) const {
    return lo + h * index(p)[static_cast<std::size_t>(axis)];
}

std::optional<int> Lattice::neighbor(int p, int axis, int steps) const {
    if (axis < 0 || axis >= dimension) return std::nullopt;
    auto idx = index(p);
    const int moved = idx[static_cast<std::size_t>(axis)] + steps;
    if (moved < 0 || moved >= size) return std::nullopt;
    idx[static_cast<std::size_t>(axis)] = moved;
    return point(idx);
}

std::vector<int> SampledBase::indices() const {
    std::vector<int> out;
    for (const auto& [a, pts] : membership) out.push_back(a);
    return out;
}

namespace {

bool contains_sorted(const std::map<int, std::vector<int>>& sets, int alpha, int point) {
    auto it = sets.find(alpha);
    return it != sets.end() && std::binary_search(it->second.begin(), it->second.end(), point);
}

}  // namespace

bool SampledBase::in(int alpha, int point) const { return contains_sorted(membership, alpha, point); }

bool SampledBase::in_shrunk(int alpha, int point) const {
    return contains_sorted(shrunk, alpha, point);
}

std::vector<int> SampledBase::active(int point) const {
    std::vector<int> out;
    for (const auto& [a, pts] : membership)
        if (in(a, point)) out.push_back(a);
    return out;
}

std::vector<int> SampledBase::shrunk_points(const Simplex& s) const {
    std::vector<int> out;
    for (int x = 0; x < lattice.num_points(); ++x)
        if (std::all_of(s.begin(), s.end(), [&](int a) { return in_shrunk(a, x); }))
            out.push_back(x);
    return out;
}

std::vector<std::string> check_base(const SampledBase& base) {
    std::vector<std::string> issues;
    const auto& lat = base.lattice;
    if ((lat.dimension != 1 && lat.dimension != 2) || !(lat.h > 0) || lat.size < 1) {
        issues.push_back("lattice must have dimension 1 or 2, h > 0 and size >= 1");
        return issues;
    }
    const int npts = lat.num_points();
    for (const auto& [a, pts] : base.membership) {
        const std::string tag = "chart " + std::to_string(a) + ": ";
        if (!std::is_sorted(pts.begin(), pts.end()) ||
            std::adjacent_find(pts.begin(), pts.end()) != pts.end())
            issues.push_back(tag + "membership not strictly increasing");
        if (!pts.empty() && (pts.front() < 0 || pts.back() >= npts))
            issues.push_back(tag + "membership point out of range");
        auto sit = base.shrunk.find(a);
        auto pit = base.psi.find(a);
        if (sit == base.shrunk.end()) issues.push_back(tag + "no shrunk set");
        if (pit == base.psi.end() || static_cast<int>(pit->second.size()) != npts) {
            issues.push_back(tag + "psi table missing or of wrong length");
            continue;
        }
        const auto& psi = pit->second;
        for (int x = 0; x < npts; ++x) {
            const double v = psi[static_cast<std::size_t>(x)];
            if (!(v >= 0.0 && v <= 1.0))
                issues.push_back(tag + "psi outside [0,1] at point " + std::to_string(x));
            else if (v != 0.0 && !base.in(a, x))
                issues.push_back(tag + "psi nonzero off U at point " + std::to_string(x));
        }
        if (sit == base.shrunk.end()) continue;
        const auto& sh = sit->second;
        if (!std::is_sorted(sh.begin(), sh.end()) ||
            std::adjacent_find(sh.begin(), sh.end()) != sh.end())
            issues.push_back(tag + "shrunk set not strictly increasing");
        for (int x : sh) {
            if (x < 0 || x >= npts) {
                issues.push_back(tag + "shrunk point out of range");
                continue;
            }
            if (!base.in(a, x)) issues.push_back(tag + "U' not inside U at point " + std::to_string(x));
            if (psi[static_cast<std::size_t>(x)] != 1.0)
                issues.push_back(tag + "psi != 1 on U' at point " + std::to_string(x));
            for (int axis = 0; axis < lat.dimension; ++axis)
                for (int step : {-1, 1}) {
                    auto nb = lat.neighbor(x, axis, step);
                    if (nb && !base.in(a, *nb))
                        issues.push_back(tag + "neighbour of U' point " + std::to_string(x) +
                                         " leaves U");
                }
        }
    }
    for (const auto& [a, sh] : base.shrunk)
        if (!base.membership.count(a))
            issues.push_back("shrunk set for unknown chart " + std::to_string(a));
    return issues;
}

// ---------------------------------------------------------------------------
// block matrices

BlockMatrix::BlockMatrix(DimMatrix dims, std::vector<Block> blocks)
    : dims_(std::move(dims)), blocks_(std::move(blocks)) {
    if (dims_.rows() != dims_.cols() ||
        blocks_.size() != static_cast<std::size_t>(dims_.rows() * dims_.cols()))
        throw DomainError("block matrix: wrong number of blocks");
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j) {
            const auto& b = (*this)(i, j);
            if (b.rows() != dims_(i, j) || b.cols() != dims_(i, j))
                throw DomainError("block matrix: block (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") has the wrong size");
        }
}

BlockMatrix BlockMatrix::zero(const DimMatrix& dims) {
    std::vector<Block> blocks;
    for (int i = 0; i < dims.rows(); ++i)
        for (int j = 0; j < dims.cols(); ++j) blocks.push_back(Block::Zero(dims(i, j), dims(i, j)));
    return BlockMatrix(dims, std::move(blocks));
}

BlockMatrix& BlockMatrix::operator+=(const BlockMatrix& o) {
    if (dims_ != o.dims_) throw DomainError("block matrix: dims mismatch");
    for (std::size_t e = 0; e < blocks_.size(); ++e) blocks_[e] += o.blocks_[e];
    return *this;
}

BlockMatrix& BlockMatrix::operator*=(double s) {
    for (auto& b : blocks_) b *= s;
    return *this;
}

double max_abs_diff(const BlockMatrix& a, const BlockMatrix& b) {
    if (a.dims() != b.dims()) throw DomainError("block matrix: dims mismatch");
    double r = 0.0;
    for (std::size_t e = 0; e < a.blocks().size(); ++e)
        if (a.blocks()[e].size() > 0)
            r = std::max(r, (a.blocks()[e] - b.blocks()[e]).cwiseAbs().maxCoeff());
    return r;
}

double max_abs_diff(const FormValue& a, const FormValue& b) {
    if (a.size() != b.size()) throw DomainError("form value: direction count mismatch");
    double r = 0.0;
    for (std::size_t mu = 0; mu < a.size(); ++mu) r = std::max(r, max_abs_diff(a[mu], b[mu]));
    return r;
}

const FormValue& ConnectionField::at(int point) const {
    auto it = values.find(point);
    if (it == values.end())
        throw DomainError("connection on " + format_simplex(pair) + " not sampled at point " +
                          std::to_string(point));
    return it->second;
}

void ConnectionField::set(int point, FormValue v) {
    if (static_cast<int>(v.size()) != directions)
        throw DomainError("connection value has the wrong number of directions");
    for (const auto& b : v)
        if (b.dims() != dims) throw DomainError("connection value has the wrong block sizes");
    values.insert_or_assign(point, std::move(v));
}

const ConnectionField& ConnectiveStructure::operator()(int a, int b) const {
    auto it = fields.find(Simplex{a, b});
    if (it == fields.end())
        throw DomainError("no connection on " + format_simplex(Simplex{a, b}));
    return it->second;
}

// ---------------------------------------------------------------------------
// products and gauge transforms

namespace {

Block kron(const Block& x, const Block& y) {
    Block out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

}  // namespace

BlockMatrix block_product(const BlockMatrix& a, const BlockMatrix& b) {
    if (a.n() != b.n()) throw DomainError("block_product: rank mismatch");
    const int n = a.n();
    const DimMatrix dims = obj_product(a.dims(), b.dims());
    std::vector<Block> blocks;
    blocks.reserve(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            Block out = Block::Zero(dims(i, k), dims(i, k));
            Eigen::Index offset = 0;
            for (int j = 0; j < n; ++j) {
                const auto da = a.dims()(i, j), db = b.dims()(j, k);
                const Eigen::Index sz = da * db;
                if (sz == 0) continue;
                out.block(offset, offset, sz, sz) = kron(a(i, j), Block::Identity(db, db)) +
                                                    kron(Block::Identity(da, da), b(j, k));
                offset += sz;
            }
            blocks.push_back(std::move(out));
        }
    return BlockMatrix(dims, std::move(blocks));
}

FormValue form_product(const FormValue& a, const FormValue& b) {
    if (a.size() != b.size()) throw DomainError("form_product: direction count mismatch");
    FormValue out;
    out.reserve(a.size());
    for (std::size_t mu = 0; mu < a.size(); ++mu) out.push_back(block_product(a[mu], b[mu]));
    return out;
}

ConnectionField conn_product(const ConnectionField& a, const ConnectionField& b) {
    if (a.pair.size() != 2 || b.pair.size() != 2 || a.pair[1] != b.pair[0])
        throw DomainError("conn_product: pairs " + format_simplex(a.pair) + " and " +
                          format_simplex(b.pair) + " do not compose");
    if (a.directions != b.directions) throw DomainError("conn_product: direction count mismatch");
    ConnectionField out{{a.pair[0], b.pair[1]}, obj_product(a.dims, b.dims), a.directions, {}};
    for (const auto& [x, va] : a.values) {
        auto it = b.values.find(x);
        if (it != b.values.end()) out.values.emplace(x, form_product(va, it->second));
    }
    return out;
}

namespace {

const VMatrix<ApproxComplex>* lookup(const PhiSamples& phi, std::optional<int> p) {
    if (!p) return nullptr;
    auto it = phi.find(*p);
    return it == phi.end() ? nullptr : &it->second;
}

Block inverse_entry(const VMatrix<ApproxComplex>& f, std::size_t e) {
    const auto& m = f.entries()[e].matrix();
    return m.size() == 0 ? Block(0, 0) : Block(m.inverse());
}

}  // namespace

FormValue gauge_at(const FormValue& a, const PhiSamples& phi, const Lattice& lattice, int point) {
    const auto* here = lookup(phi, point);
    if (!here) throw DomainError("gauge transform: no coherency map at point " + std::to_string(point));
    if (static_cast<int>(a.size()) != lattice.dimension)
        throw DomainError("gauge transform: direction count does not match the lattice");
    const std::size_t entries = here->entries().size();
    FormValue out;
    out.reserve(a.size());
    for (int mu = 0; mu < lattice.dimension; ++mu) {
        const auto* fwd = lookup(phi, lattice.neighbor(point, mu, 1));
        const auto* bwd = lookup(phi, lattice.neighbor(point, mu, -1));
        const VMatrix<ApproxComplex>* fwd2 = nullptr;
        const VMatrix<ApproxComplex>* bwd2 = nullptr;
        if (!(fwd && bwd)) {
            fwd2 = fwd ? lookup(phi, lattice.neighbor(point, mu, 2)) : nullptr;
            bwd2 = bwd ? lookup(phi, lattice.neighbor(point, mu, -2)) : nullptr;
            if (!(fwd && fwd2) && !(bwd && bwd2))
                throw DomainError("gauge transform: point " + std::to_string(point) +
                                  " lacks difference neighbours along axis " + std::to_string(mu));
        }
        const auto& src = a[static_cast<std::size_t>(mu)];
        if (src.dims() != here->dims())
            throw DomainError("gauge transform: connection and coherency map dims differ");
        std::vector<Block> blocks;
        blocks.reserve(entries);
        const double h2 = 2.0 * lattice.h;
        for (std::size_t e = 0; e < entries; ++e) {
            const Block& f = here->entries()[e].matrix();
            if (f.size() == 0) {
                blocks.emplace_back(0, 0);
                continue;
            }
            const Block finv = f.inverse();
            Block d;
            if (fwd && bwd)
                d = (inverse_entry(*fwd, e) - inverse_entry(*bwd, e)) / h2;
            else if (fwd && fwd2)
                d = (-3.0 * finv + 4.0 * inverse_entry(*fwd, e) - inverse_entry(*fwd2, e)) / h2;
            else
                d = (3.0 * finv - 4.0 * inverse_entry(*bwd, e) + inverse_entry(*bwd2, e)) / h2;
            blocks.push_back(f * src.blocks()[e] * finv + f * d);
        }
        out.emplace_back(here->dims(), std::move(blocks));
    }
    return out;
}

ConnectionField gauge_transform(const ConnectionField& f, const PhiSamples& phi,
                                const Lattice& lattice) {
    ConnectionField out{f.pair, f.dims, f.directions, {}};
    for (const auto& [x, v] : f.values) {
        auto it = phi.find(x);
        if (it == phi.end()) continue;
        out.dims = it->second.dims();
        out.values.emplace(x, gauge_at(v, phi, lattice, x));
    }
    if (out.values.empty() && !phi.empty()) out.dims = phi.begin()->second.dims();
    return out;
}

ConnectionField circ_product(const ConnectionField& a, const ConnectionField& b,
                             const PhiSamples& phi, const Lattice& lattice) {
    return gauge_transform(conn_product(a, b), phi, lattice);
}

ConnectionField convex_combine(const std::vector<ConnectionField>& fields,
                               const std::vector<std::map<int, double>>& weights) {
    if (fields.empty() || fields.size() != weights.size())
        throw DomainError("convex_combine: need one weight table per field");
    const auto& first = fields.front();
    for (const auto& f : fields)
        if (f.pair != first.pair || f.dims != first.dims || f.directions != first.directions)
            throw DomainError("convex_combine: fields live on different bundles");
    ConnectionField out{first.pair, first.dims, first.directions, {}};
    for (const auto& [x, v0] : first.values) {
        if (!std::all_of(fields.begin(), fields.end(), [&](const auto& f) { return f.defined_at(x); }))
            continue;
        double total = 0.0;
        FormValue acc(static_cast<std::size_t>(first.directions), BlockMatrix::zero(first.dims));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            auto wt = weights[i].find(x);
            if (wt == weights[i].end())
                throw DomainError("convex_combine: no weight at point " + std::to_string(x));
            const double w = wt->second;
            if (w < 0.0) throw DomainError("convex_combine: negative weight");
            total += w;
            const auto& v = fields[i].at(x);
            for (std::size_t mu = 0; mu < acc.size(); ++mu) acc[mu] += w * v[mu];
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw DomainError("convex_combine: weights sum to " + std::to_string(total) +
                              " at point " + std::to_string(x));
        out.values.emplace(x, std::move(acc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// partition of unity construction

std::vector<Simplex> chains(const std::vector<int>& indices, int a, int b) {
    std::vector<int> between;
    for (int g : indices)
        if (a < g && g < b) between.push_back(g);
    if (between.size() > 20) throw DomainError("chains: too many indices");
    std::vector<Simplex> out;
    for (unsigned long mask = 0; mask < (1UL << between.size()); ++mask) {
        Simplex c{a};
        for (std::size_t i = 0; i < between.size(); ++i)
            if (mask >> i & 1UL) c.push_back(between[i]);
        c.push_back(b);
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> chain_weights(const SampledBase& base, const Simplex& chain) {
    if (chain.size() < 2) throw DomainError("chain_weights: chain needs at least two indices");
    const auto idx = base.indices();
    auto psi = [&](int a) -> const std::vector<double>& {
        auto it = base.psi.find(a);
        if (it == base.psi.end()) throw DomainError("chain_weights: no psi for chart " + std::to_string(a));
        return it->second;
    };
    const auto npts = static_cast<std::size_t>(base.lattice.num_points());
    std::vector<double> w(npts, 1.0);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const int lo = chain[i], hi = chain[i + 1];
        if (lo >= hi) throw DomainError("chain_weights: chain is not increasing");
        const auto& plo = psi(lo);
        const auto& phi = psi(hi);
        for (std::size_t x = 0; x < npts; ++x) {
            double link = plo[x] * phi[x];
            for (int g : idx)
                if (lo < g && g < hi) link *= 1.0 - psi(g)[x];
            w[x] *= link;
        }
    }
    return w;
}

namespace {

const PhiSamples& phi_samples(const ChartedBundle<ApproxComplex>& e, const Simplex& t) {
    auto it = e.phis.find(t);
    if (it == e.phis.end()) throw DomainError("no coherency maps on " + format_simplex(t));
    return it->second;
}

void check_compatible(const ChartedBundle<ApproxComplex>& e, const SampledBase& base) {
    const auto issues = check_base(base);
    if (!issues.empty()) throw DomainError("inconsistent base: " + issues.front());
    if (OrderedCover::from_membership(base.membership).simplices() != e.cover.simplices())
        throw DomainError("base membership does not reproduce the bundle's cover");
}

}  // namespace

ConnectiveStructure build_connective(const ChartedBundle<ApproxComplex>& bundle,
                                     const SampledBase& base,
                                     const std::map<Simplex, ConnectionField>& seeds) {
    check_compatible(bundle, base);
    const auto report = validate_bundle(bundle);
    if (!report.valid) throw InvalidBundleError(report);
    const int dirs = base.lattice.dimension;
    const auto pairs = bundle.cover.simplices_of_size(2);
    for (const auto& p : pairs) {
        auto it = seeds.find(p);
        if (it == seeds.end()) throw DomainError("no seed connection on " + format_simplex(p));
        if (it->second.dims != bundle.dims.at(p) || it->second.directions != dirs)
            throw DomainError("seed connection on " + format_simplex(p) + " has the wrong shape");
    }
    const auto idx = base.indices();
    std::map<Simplex, std::vector<double>> weight_cache;
    auto weights = [&](const Simplex& c) -> const std::vector<double>& {
        auto it = weight_cache.find(c);
        if (it == weight_cache.end()) it = weight_cache.emplace(c, chain_weights(base, c)).first;
        return it->second;
    };

    ConnectiveStructure out;
    for (const auto& p : pairs) {
        ConnectionField field{p, bundle.dims.at(p), dirs, {}};
        const auto cs = chains(idx, p[0], p[1]);
        for (int x : base.shrunk_points(p)) {
            FormValue num(static_cast<std::size_t>(dirs), BlockMatrix::zero(field.dims));
            double den = 0.0;
            for (const auto& c : cs) {
                const double w = weights(c)[static_cast<std::size_t>(x)];
                if (w == 0.0) continue;
                FormValue fold = seeds.at({c[0], c[1]}).at(x);
                for (std::size_t i = 1; i + 1 < c.size(); ++i)
                    fold = gauge_at(form_product(fold, seeds.at({c[i], c[i + 1]}).at(x)),
                                    phi_samples(bundle, {c[0], c[i], c[i + 1]}), base.lattice, x);
                for (std::size_t mu = 0; mu < num.size(); ++mu) num[mu] += w * fold[mu];
                den += w;
            }
            if (den == 0.0)
                throw DomainError("zero weight denominator on " + format_simplex(p) + " at point " +
                                  std::to_string(x));
            for (auto& b : num) b *= 1.0 / den;
            field.values.emplace(x, std::move(num));
        }
        out.fields.emplace(p, std::move(field));
    }
    return out;
}

ConnectiveReport connective_residuals(const ChartedBundle<ApproxComplex>& bundle,
                                      const SampledBase& base, const ConnectiveStructure& s) {
    ConnectiveReport report;
    for (const auto& t : bundle.cover.simplices_of_size(3)) {
        const auto& ab = s(t[0], t[1]);
        const auto& bc = s(t[1], t[2]);
        const auto& ac = s(t[0], t[2]);
        const auto& phi = phi_samples(bundle, t);
        double worst = 0.0;
        for (int x : base.shrunk_points(t)) {
            const auto lhs = gauge_at(form_product(ab.at(x), bc.at(x)), phi, base.lattice, x);
            const double r = max_abs_diff(lhs, ac.at(x));
            ++report.checked_points;
            worst = std::max(worst, r);
            if (!report.worst || r > report.worst->residual) report.worst = CocycleResidual{t, x, r};
        }
        report.per_triple[t] = worst;
        report.max_residual = std::max(report.max_residual, worst);
    }
    return report;
}

ConnectiveStructure contractibility_check(const ChartedBundle<ApproxComplex>& bundle,
                                          const SampledBase& base, const ConnectiveStructure& s1,
                                          const ConnectiveStructure& s2, double t,
                                          double tolerance) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("contractibility_check: t outside [0,1]");
    ConnectiveStructure out;
    for (const auto& [p, f1] : s1.fields) {
        auto it = s2.fields.find(p);
        if (it == s2.fields.end()) throw DomainError("structures cover different pairs");
        std::map<int, double> w1, w2;
        for (const auto& [x, v] : f1.values) {
            w1[x] = t;
            w2[x] = 1.0 - t;
        }
        out.fields.emplace(p, convex_combine({f1, it->second}, {w1, w2}));
    }
    const auto report = connective_residuals(bundle, base, out);
    if (report.max_residual > tolerance)
        throw DomainError("convex combination fails the cocycle condition: residual " +
                          std::to_string(report.max_residual));
    return out;
}

// ---------------------------------------------------------------------------
// transport

std::vector<int> expand_path(const Lattice& lattice, const std::vector<int>& points) {
    if (points.empty()) throw DomainError("empty path");
    std::vector<int> out{points.front()};
    for (std::size_t s = 1; s < points.size(); ++s) {
        const auto a = lattice.index(points[s - 1]);
        const auto b = lattice.index(points[s]);
        const int d0 = b[0] - a[0], d1 = b[1] - a[1];
        const int g = std::gcd(std::abs(d0), std::abs(d1));
        if (g == 0) throw DomainError("path repeats point " + std::to_string(points[s]));
        for (int k = 1; k <= g; ++k)
            out.push_back(lattice.point({a[0] + k * d0 / g, a[1] + k * d1 / g}));
    }
    return out;
}

VMatrix<ApproxComplex> parallel_transport(const ConnectionField& field, const Lattice& lattice,
                                          const std::vector<int>& points, int refine) {
    if (refine < 1) throw DomainError("refine must be at least 1");
    const auto path = expand_path(lattice, points);
    for (int x : path)
        if (!field.defined_at(x))
            throw DomainError("path leaves the domain of the connection on " +
                              format_simplex(field.pair) + " at point " + std::to_string(x));
    const int n = static_cast<int>(field.dims.rows());
    std::vector<Block> p;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p.push_back(Block::Identity(field.dims(i, j), field.dims(i, j)));
    const double ds = 1.0 / refine;
    for (std::size_t s = 1; s < path.size(); ++s) {
        const auto& va = field.at(path[s - 1]);
        const auto& vb = field.at(path[s]);
        std::vector<double> dx(static_cast<std::size_t>(lattice.dimension));
        for (int mu = 0; mu < lattice.dimension; ++mu)
            dx[static_cast<std::size_t>(mu)] =
                lattice.coordinate(path[s], mu) - lattice.coordinate(path[s - 1], mu);
        for (std::size_t e = 0; e < p.size(); ++e) {
            if (p[e].size() == 0) continue;
            auto gen = [&](double t) {
                Block m = Block::Zero(p[e].rows(), p[e].cols());
                for (std::size_t mu = 0; mu < dx.size(); ++mu)
                    m += dx[mu] * ((1.0 - t) * va[mu].blocks()[e] + t * vb[mu].blocks()[e]);
                return m;
            };
            for (int k = 0; k < refine; ++k) {
                const double t0 = k * ds;
                const Block half = p[e] - 0.5 * ds * gen(t0) * p[e];
                p[e] -= ds * gen(t0 + 0.5 * ds) * half;
            }
        }
    }
    std::vector<VMor<ApproxComplex>> entries;
    entries.reserve(p.size());
    for (auto& b : p) entries.push_back(VMor<ApproxComplex>::trusted(std::move(b)));
    return VMatrix<ApproxComplex>(field.dims, std::move(entries));
}

TransportReport gerbe_transport_check(const OrientedChartedBundle<ApproxComplex>& bundle,
                                      const ConnectiveStructure& s, const Lattice& lattice,
                                      const PathSpec& path) {
    const auto& t = path.simplex;
    if (t.size() != 3) throw DomainError("gerbe transport check needs a triple");
    if (path.points.empty()) throw DomainError("empty path");
    const int a = t[0], b = t[1], c = t[2];
    const auto pab = parallel_transport(s(a, b), lattice, path.points, path.refine);
    const auto pbc = parallel_transport(s(b, c), lattice, path.points, path.refine);
    const auto pac = parallel_transport(s(a, c), lattice, path.points, path.refine);
    const auto& phi_start = bundle.base.phi(t, path.points.front());
    const auto& phi_end = bundle.base.phi(t, path.points.back());

    TransportReport report{t, 0.0, 0.0};
    report.square_residual =
        mor_residual(mor_compose(pac, phi_start), mor_compose(phi_end, mor_product(pab, pbc)));

    const int sign = bundle.lift(t);
    auto dg = [](const VMatrix<ApproxComplex>& f, int sgn) {
        return dger(OrientedV<ApproxComplex>(f, sgn)).scale;
    };
    const ApproxComplex lhs = dg(pac, 1) * dg(phi_start, sign);
    const ApproxComplex rhs = dg(phi_end, sign) * (dg(pab, 1) * dg(pbc, 1));
    report.dger_residual = std::abs(lhs - rhs);
    return report;
}

std::pair<Lattice, std::map<int, int>> coarsen(const Lattice& lattice) {
    if (lattice.size < 3 || lattice.size % 2 == 0)
        throw DomainError("coarsening needs an odd lattice size of at least 3");
    Lattice coarse{lattice.dimension, lattice.lo, 2.0 * lattice.h, (lattice.size + 1) / 2};
    std::map<int, int> remap;
    for (int x = 0; x < lattice.num_points(); ++x) {
        const auto idx = lattice.index(x);
        if (idx[0] % 2 == 0 && idx[1] % 2 == 0) remap[x] = coarse.point({idx[0] / 2, idx[1] / 2});
    }
    return {coarse, remap};
}

}  // namespace bivect
