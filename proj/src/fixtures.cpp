#include "bivect/fixtures.hpp"

#include <cmath>

namespace bivect::fixtures {

DimMatrix random_weakly_invertible(Rng& rng, int n, long long max_entry) {
    if (n < 1) throw DomainError("random_weakly_invertible: n must be positive");
    DimMatrix d = dim_identity(n);
    if (n == 1) return d;
    std::uniform_int_distribution<int> row(0, n - 1);
    std::uniform_int_distribution<int> op(0, 2);
    for (int step = 0; step < 4 * n; ++step) {
        const int i = row(rng), j = row(rng);
        if (i == j) continue;
        if (op(rng) == 0) {
            d.row(i).swap(d.row(j));
        } else {
            const DimMatrix candidate = d.row(i) + d.row(j);
            if (candidate.maxCoeff() <= max_entry) d.row(i) = candidate;
        }
    }
    return d;
}

template <>
ExactComplex random_scalar<ExactComplex>(Rng& rng) {
    std::uniform_int_distribution<int> num(-3, 3);
    std::uniform_int_distribution<int> den(1, 3);
    return {Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
}

template <>
ApproxComplex random_scalar<ApproxComplex>(Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double re = u(rng);
    return {re, u(rng)};
}

namespace {

// Exact gauges are unimodular over the Gaussian integers (unit-triangular
// factors with unit diagonals), so inverses stay integral and small.
Matrix<ExactComplex> random_unimodular(Rng& rng, int d) {
    static const ExactComplex units[] = {ExactComplex(1), ExactComplex(-1),
                                         ExactComplex(Rational(0), Rational(1)),
                                         ExactComplex(Rational(0), Rational(-1))};
    std::uniform_int_distribution<int> unit(0, 3), coeff(-2, 2);
    Matrix<ExactComplex> lower = Matrix<ExactComplex>::Identity(d, d);
    Matrix<ExactComplex> upper = Matrix<ExactComplex>::Identity(d, d);
    for (int r = 0; r < d; ++r) {
        upper(r, r) = units[unit(rng)];
        for (int c = 0; c < r; ++c) {
            lower(r, c) = ExactComplex(Rational(coeff(rng)), Rational(coeff(rng)));
            upper(c, r) = ExactComplex(Rational(coeff(rng)), Rational(coeff(rng)));
        }
    }
    return lower * upper;
}

template <class Scalar>
Matrix<Scalar> random_invertible(Rng& rng, int d);

template <>
Matrix<ExactComplex> random_invertible<ExactComplex>(Rng& rng, int d) {
    return random_unimodular(rng, d);
}

template <>
Matrix<ApproxComplex> random_invertible<ApproxComplex>(Rng& rng, int d) {
    for (;;) {
        Matrix<ApproxComplex> m(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) m(r, c) = random_scalar<ApproxComplex>(rng);
        if (std::abs(determinant(m)) >= 0.1) return m;
    }
}

}  // namespace

template <class Scalar>
VMatrix<Scalar> random_automorphism(Rng& rng, const DimMatrix& dims) {
    std::vector<VMor<Scalar>> entries;
    for (int i = 0; i < dims.rows(); ++i)
        for (int j = 0; j < dims.cols(); ++j)
            entries.push_back(
                VMor<Scalar>::trusted(random_invertible<Scalar>(rng, static_cast<int>(dims(i, j)))));
    return VMatrix<Scalar>(dims, std::move(entries));
}

OrderedCover simplex_cover(int vertices, bool boundary, const std::vector<int>& points) {
    if (vertices < 2 || vertices > 16) throw DomainError("simplex_cover: 2 to 16 vertices");
    std::vector<int> indices(static_cast<std::size_t>(vertices));
    for (int v = 0; v < vertices; ++v) indices[static_cast<std::size_t>(v)] = v;
    const int top = std::min(5, boundary ? vertices - 1 : vertices);
    std::map<Simplex, std::vector<int>> simplices;
    for (unsigned mask = 0; mask < (1U << vertices); ++mask) {
        const int size = __builtin_popcount(mask);
        if (size < 2 || size > top) continue;
        Simplex s;
        for (int v = 0; v < vertices; ++v)
            if (mask >> v & 1U) s.push_back(v);
        simplices.emplace(std::move(s), points);
    }
    return OrderedCover(std::move(indices), std::move(simplices));
}

template <class Scalar>
ChartedBundle<Scalar> canonical_bundle(const OrderedCover& cover, int rank,
                                       const std::vector<DimMatrix>& edges) {
    const auto& idx = cover.indices();
    if (edges.size() + 1 != idx.size())
        throw DomainError("canonical_bundle: need one edge per consecutive pair of charts");
    std::map<int, int> pos;
    for (std::size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = static_cast<int>(i);
    auto span_dims = [&](int a, int b) {
        DimMatrix d = edges[static_cast<std::size_t>(pos[a])];
        for (int t = pos[a] + 1; t < pos[b]; ++t) d = obj_product(d, edges[static_cast<std::size_t>(t)]);
        return d;
    };
    ChartedBundle<Scalar> e{cover, rank, {}, {}};
    for (const auto& p : cover.simplices_of_size(2)) e.dims.emplace(p, span_dims(p[0], p[1]));
    for (const auto& t : cover.simplices_of_size(3)) {
        const int pa = pos[t[0]], pb = pos[t[1]], pc = pos[t[2]];
        const std::vector<DimMatrix> factors(edges.begin() + pa, edges.begin() + pc);
        const int split = pb - pa, last = pc - pa - 1;
        const auto source = Bracketing::join(Bracketing::left_nested(0, split - 1),
                                             Bracketing::left_nested(split, last));
        const auto phi = canonical_map<VMor<Scalar>>(factors, source, Bracketing::left_nested(0, last));
        auto& slot = e.phis[t];
        for (int x : cover.points(t)) slot.emplace(x, phi);
    }
    return e;
}

template <class Scalar>
ChartedBundle<Scalar> gauge_bundle(const ChartedBundle<Scalar>& bundle,
                                   const std::map<Simplex, std::map<int, VMatrix<Scalar>>>& gauges) {
    auto g = [&](int a, int b, int x) -> const VMatrix<Scalar>& {
        auto it = gauges.find(Simplex{a, b});
        if (it == gauges.end() || !it->second.count(x))
            throw DomainError("gauge_bundle: no gauge on " + format_simplex(Simplex{a, b}) +
                              " at point " + std::to_string(x));
        return it->second.at(x);
    };
    ChartedBundle<Scalar> out{bundle.cover, bundle.rank, bundle.dims, {}};
    for (const auto& [t, samples] : bundle.phis) {
        auto& slot = out.phis[t];
        for (const auto& [x, phi] : samples) {
            const auto src = mor_inverse(mor_product(g(t[0], t[1], x), g(t[1], t[2], x)));
            slot.emplace(x, mor_compose(g(t[0], t[2], x), mor_compose(phi, src)));
        }
    }
    return out;
}

template <class Scalar>
ChartedBundle<Scalar> random_gauge(const ChartedBundle<Scalar>& bundle, Rng& rng, bool per_point) {
    std::map<Simplex, std::map<int, VMatrix<Scalar>>> gauges;
    for (const auto& p : bundle.cover.simplices_of_size(2)) {
        auto& slot = gauges[p];
        const auto& dims = bundle.dims.at(p);
        if (per_point) {
            for (int x : bundle.cover.points(p)) slot.emplace(x, random_automorphism<Scalar>(rng, dims));
        } else {
            const auto g = random_automorphism<Scalar>(rng, dims);
            for (int x : bundle.cover.points(p)) slot.emplace(x, g);
        }
    }
    return gauge_bundle(bundle, gauges);
}

std::array<DimMatrix, 3> nonmoi_triple() {
    return {dim_from_rows({{1, 1}, {0, 1}}), dim_from_rows({{0, 1}, {1, 1}}),
            dim_from_rows({{1, 0}, {1, 1}})};
}

template <class Scalar>
ChartedBundle<Scalar> nonmoi_bundle(std::uint64_t seed, const std::vector<int>& points) {
    const auto t = nonmoi_triple();
    Rng rng(seed);
    const auto base = canonical_bundle<Scalar>(simplex_cover(4, false, points), 2, {t[0], t[1], t[2]});
    return random_gauge(base, rng, true);
}

SignCochain fundamental_class(const OrderedCover& cover) {
    SignCochain s{3, {}};
    const auto quads = cover.simplices_of_size(4);
    for (std::size_t i = 0; i < quads.size(); ++i) s.values[quads[i]] = i == 0 ? -1 : 1;
    return s;
}

SignCochain random_cochain(const OrderedCover& cover, Rng& rng) {
    SignCochain s{2, {}};
    std::bernoulli_distribution coin(0.5);
    for (const auto& t : cover.simplices_of_size(3)) s.values[t] = coin(rng) ? -1 : 1;
    return s;
}

namespace {

constexpr double eps = 1e-9;

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
    if (t <= eps) return 0.0;
    if (t >= 1.0 - eps) return 1.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

}  // namespace

SampledBase interval_base(int dimension, double h, int charts) {
    if (dimension != 1 && dimension != 2) throw DomainError("interval_base: dimension 1 or 2");
    if (charts < 2 || charts > 4) throw DomainError("interval_base: 2 to 4 charts");
    const int size = static_cast<int>(std::lround(1.0 / h)) + 1;
    SampledBase base{Lattice{dimension, 0.0, h, size}, {}, {}, {}};
    const auto& lat = base.lattice;
    for (int a = 0; a < charts; ++a) {
        const double l = 0.1 * a, r = 0.7 + 0.1 * a, band = 0.1;
        auto inside = [&](double x) { return l + eps < x && x < r - eps; };
        auto inside_shrunk = [&](double x) { return l + band + eps < x && x < r - band - eps; };
        auto bump = [&](double x) { return smooth_step((x - l) / band) * smooth_step((r - x) / band); };
        auto& mem = base.membership[a];
        auto& sh = base.shrunk[a];
        auto& psi = base.psi[a];
        psi.assign(static_cast<std::size_t>(lat.num_points()), 0.0);
        for (int p = 0; p < lat.num_points(); ++p) {
            bool in = true, in_sh = true;
            double v = 1.0;
            for (int mu = 0; mu < dimension; ++mu) {
                const double x = lat.coordinate(p, mu);
                in = in && inside(x);
                in_sh = in_sh && inside_shrunk(x);
                v *= bump(x);
            }
            if (in) mem.push_back(p);
            if (in_sh) sh.push_back(p);
            psi[static_cast<std::size_t>(p)] = in_sh ? 1.0 : (in ? v : 0.0);
        }
    }
    return base;
}

int nearest_point(const Lattice& lattice, double x, double y) {
    auto clamp = [&](double c) {
        const long i = std::lround((c - lattice.lo) / lattice.h);
        return static_cast<int>(std::clamp<long>(i, 0, lattice.size - 1));
    };
    return lattice.point({clamp(x), lattice.dimension == 2 ? clamp(y) : 0});
}

namespace {

// Analytic coefficients of a smooth matrix-valued function of (x, y), drawn
// once so that the function can be sampled at any spacing.
struct SmoothEntry {
    Block c0, c1, c2;
    double wx = 0, px = 0, wy = 0, py = 0;

    Block at(double x, double y) const {
        return c0 + std::sin(wx * x + px) * c1 + std::cos(wy * y + py) * c2;
    }
};

Block random_block(Rng& rng, long long d, double scale) {
    std::uniform_int_distribution<int> num(-8, 8);
    Block b(d, d);
    for (long long r = 0; r < d; ++r)
        for (long long c = 0; c < d; ++c) b(r, c) = {scale * num(rng) / 8.0, scale * num(rng) / 8.0};
    return b;
}

SmoothEntry random_smooth(Rng& rng, long long d, double scale, int dimension) {
    std::uniform_real_distribution<double> freq(1.0, 3.0), phase(0.0, 6.0);
    SmoothEntry s{random_block(rng, d, scale), random_block(rng, d, scale), random_block(rng, d, scale)};
    s.wx = freq(rng);
    s.px = phase(rng);
    s.wy = freq(rng);
    s.py = phase(rng);
    if (dimension == 1) s.c2.setZero();
    return s;
}

}  // namespace

ConnectiveFixture connective_fixture(int dimension, double h, int rank, bool smooth_gauge,
                                     std::uint64_t seed) {
    Rng rng(seed);
    SampledBase base = interval_base(dimension, h);
    const auto cover = OrderedCover::from_membership(base.membership);
    std::vector<DimMatrix> edges;
    const auto nm = nonmoi_triple();
    for (std::size_t i = 0; i + 1 < cover.indices().size(); ++i)
        edges.push_back(rank == 1   ? dim_identity(1)
                        : rank == 2 ? nm[i % 3]
                                    : random_weakly_invertible(rng, rank, 2));
    const auto canonical = canonical_bundle<ApproxComplex>(cover, rank, edges);
    const auto& lat = base.lattice;
    auto coords = [&](int p) {
        return std::pair{lat.coordinate(p, 0), dimension == 2 ? lat.coordinate(p, 1) : 0.0};
    };

    std::map<Simplex, std::map<int, VMatrix<ApproxComplex>>> gauges;
    for (const auto& p : cover.simplices_of_size(2)) {
        const auto& dims = canonical.dims.at(p);
        const auto g0 = random_automorphism<ApproxComplex>(rng, dims);
        std::vector<SmoothEntry> twist;
        for (const auto& e : g0.entries()) {
            auto s = random_smooth(rng, e.dim(), 0.4, dimension);
            // Strictly upper triangular, so I + twist stays unipotent.
            s.c0 = s.c0.triangularView<Eigen::StrictlyUpper>();
            s.c1 = s.c1.triangularView<Eigen::StrictlyUpper>();
            s.c2 = s.c2.triangularView<Eigen::StrictlyUpper>();
            twist.push_back(std::move(s));
        }
        const auto scale = random_smooth(rng, 1, 0.3, dimension);
        auto& slot = gauges[p];
        for (int x : cover.points(p)) {
            if (!smooth_gauge) {
                slot.emplace(x, g0);
                continue;
            }
            const auto [cx, cy] = coords(x);
            const ApproxComplex lam = std::exp(scale.at(cx, cy)(0, 0));
            std::vector<VMor<ApproxComplex>> entries;
            for (std::size_t e = 0; e < g0.entries().size(); ++e) {
                const auto& m = g0.entries()[e].matrix();
                const Block id = Block::Identity(m.rows(), m.cols());
                entries.push_back(VMor<ApproxComplex>::trusted(lam * m * (id + twist[e].at(cx, cy))));
            }
            slot.emplace(x, VMatrix<ApproxComplex>(dims, std::move(entries)));
        }
    }
    auto bundle = gauge_bundle(canonical, gauges);

    std::map<Simplex, ConnectionField> seeds;
    for (const auto& p : cover.simplices_of_size(2)) {
        const auto& dims = canonical.dims.at(p);
        std::vector<std::vector<SmoothEntry>> coeff(static_cast<std::size_t>(dimension));
        for (auto& dir : coeff)
            for (int i = 0; i < rank; ++i)
                for (int j = 0; j < rank; ++j) dir.push_back(random_smooth(rng, dims(i, j), 1.0, dimension));
        ConnectionField field{p, dims, dimension, {}};
        for (int x : cover.points(p)) {
            const auto [cx, cy] = coords(x);
            FormValue v;
            for (const auto& dir : coeff) {
                std::vector<Block> blocks;
                for (const auto& s : dir) blocks.push_back(s.at(cx, cy));
                v.emplace_back(dims, std::move(blocks));
            }
            field.values.emplace(x, std::move(v));
        }
        seeds.emplace(p, std::move(field));
    }
    return {std::move(base), std::move(bundle), std::move(seeds)};
}

#define BIVECT_INSTANTIATE_FIXTURES(S)                                                            \
    template VMatrix<S> random_automorphism<S>(Rng&, const DimMatrix&);                          \
    template ChartedBundle<S> canonical_bundle<S>(const OrderedCover&, int,                      \
                                                  const std::vector<DimMatrix>&);                \
    template ChartedBundle<S> gauge_bundle<S>(const ChartedBundle<S>&,                           \
                                              const std::map<Simplex, std::map<int, VMatrix<S>>>&); \
    template ChartedBundle<S> random_gauge<S>(const ChartedBundle<S>&, Rng&, bool);              \
    template ChartedBundle<S> nonmoi_bundle<S>(std::uint64_t, const std::vector<int>&);

BIVECT_INSTANTIATE_FIXTURES(ExactComplex)
BIVECT_INSTANTIATE_FIXTURES(ApproxComplex)

}  // namespace bivect::fixtures
