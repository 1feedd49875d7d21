#include "bivect/charted.hpp"

#include "bivect/gf2.hpp"

#include <algorithm>
#include <sstream>

namespace bivect {

std::string format_simplex(const Simplex& s) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ")";
    return os.str();
}

std::vector<Simplex> faces(const Simplex& s) {
    std::vector<Simplex> out;
    out.reserve(s.size());
    for (std::size_t omit = 0; omit < s.size(); ++omit) {
        Simplex f;
        f.reserve(s.size() - 1);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (i != omit) f.push_back(s[i]);
        out.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// OrderedCover

OrderedCover::OrderedCover(std::vector<int> indices, std::map<Simplex, std::vector<int>> simplices)
    : indices_(std::move(indices)), simplices_(std::move(simplices)) {
    if (!std::is_sorted(indices_.begin(), indices_.end()) ||
        std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
        throw DomainError("cover indices must be strictly increasing");
    for (auto& [s, pts] : simplices_) {
        if (s.size() < 2 || s.size() > 5)
            throw DomainError("simplex " + format_simplex(s) + " must have 2 to 5 indices");
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!std::binary_search(indices_.begin(), indices_.end(), s[i]))
                throw DomainError("simplex " + format_simplex(s) + " uses an unknown index");
            if (i && s[i - 1] >= s[i])
                throw DomainError("simplex " + format_simplex(s) + " is not strictly increasing");
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    }
    for (const auto& [s, pts] : simplices_) {
        if (s.size() == 2) continue;
        for (const auto& f : faces(s)) {
            auto it = simplices_.find(f);
            if (it == simplices_.end())
                throw DomainError("face " + format_simplex(f) + " of " + format_simplex(s) +
                                  " is missing");
            if (!std::includes(it->second.begin(), it->second.end(), pts.begin(), pts.end()))
                throw DomainError("sample points of " + format_simplex(s) +
                                  " are not contained in face " + format_simplex(f));
        }
    }
}

OrderedCover OrderedCover::from_membership(const std::map<int, std::vector<int>>& membership) {
    std::vector<int> indices;
    std::map<int, std::vector<int>> sorted;
    for (const auto& [a, pts] : membership) {
        indices.push_back(a);
        auto& s = sorted[a];
        s = pts;
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    std::map<Simplex, std::vector<int>> simplices;
    // Grow simplices one index at a time; a nonempty intersection's faces are
    // nonempty, so every face is generated before its cofaces.
    std::vector<std::pair<Simplex, std::vector<int>>> layer;
    for (int a : indices) layer.push_back({{a}, sorted[a]});
    for (std::size_t size = 2; size <= 5; ++size) {
        std::vector<std::pair<Simplex, std::vector<int>>> next;
        for (const auto& [s, pts] : layer)
            for (int b : indices) {
                if (b <= s.back()) continue;
                std::vector<int> meet;
                const auto& other = sorted[b];
                std::set_intersection(pts.begin(), pts.end(), other.begin(), other.end(),
                                      std::back_inserter(meet));
                if (meet.empty()) continue;
                Simplex t = s;
                t.push_back(b);
                simplices[t] = meet;
                next.push_back({std::move(t), std::move(meet)});
            }
        layer = std::move(next);
    }
    return OrderedCover(std::move(indices), std::move(simplices));
}

const std::vector<int>& OrderedCover::points(const Simplex& s) const {
    auto it = simplices_.find(s);
    if (it == simplices_.end()) throw DomainError("simplex " + format_simplex(s) + " not in cover");
    return it->second;
}

std::vector<Simplex> OrderedCover::simplices_of_size(std::size_t size) const {
    std::vector<Simplex> out;
    for (const auto& [s, pts] : simplices_)
        if (s.size() == size) out.push_back(s);
    return out;
}

OrderedCover OrderedCover::restrict_points(const std::set<int>& keep) const {
    auto simplices = simplices_;
    for (auto& [s, pts] : simplices)
        pts.erase(std::remove_if(pts.begin(), pts.end(), [&](int p) { return !keep.count(p); }),
                  pts.end());
    return OrderedCover(indices_, std::move(simplices));
}

// ---------------------------------------------------------------------------
// bundles

template <class Scalar>
const DimMatrix& ChartedBundle<Scalar>::dim(int a, int b) const {
    auto it = dims.find(Simplex{a, b});
    if (it == dims.end())
        throw DomainError("no dimension matrix for " + format_simplex(Simplex{a, b}));
    return it->second;
}

template <class Scalar>
const VMatrix<Scalar>& ChartedBundle<Scalar>::phi(const Simplex& triple, int point) const {
    auto it = phis.find(triple);
    if (it == phis.end()) throw DomainError("no coherency map on " + format_simplex(triple));
    auto jt = it->second.find(point);
    if (jt == it->second.end())
        throw DomainError("no coherency map on " + format_simplex(triple) + " at point " +
                          std::to_string(point));
    return jt->second;
}

std::string to_string(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::structure: return "structure";
        case Violation::Kind::not_weakly_invertible: return "not_weakly_invertible";
        case Violation::Kind::object_condition: return "object_condition";
        case Violation::Kind::dimension_mismatch: return "dimension_mismatch";
        case Violation::Kind::missing_sample: return "missing_sample";
        case Violation::Kind::cocycle: return "cocycle";
        case Violation::Kind::orientation: return "orientation";
        case Violation::Kind::gerbe_cocycle: return "gerbe_cocycle";
    }
    return "unknown";
}

void BundleReport::add(Violation v) {
    valid = false;
    violations.push_back(std::move(v));
}

InvalidBundleError::InvalidBundleError(BundleReport r)
    : DomainError("invalid bundle: " +
                  (r.violations.empty() ? std::string("unknown reason")
                                        : to_string(r.violations.front().kind) + " at " +
                                              format_simplex(r.violations.front().simplex) +
                                              ": " + r.violations.front().message)),
      report_(std::move(r)) {}

namespace {

using Kind = Violation::Kind;

template <class Scalar>
void check_structure(const ChartedBundle<Scalar>& e, BundleReport& report) {
    const auto& cover = e.cover;
    if (e.rank < 1) report.add({Kind::structure, {}, {}, 0.0, "rank must be positive"});
    for (const auto& [s, d] : e.dims)
        if (s.size() != 2 || !cover.contains(s))
            report.add({Kind::structure, s, {}, 0.0, "dimension matrix on a non-pair simplex"});
    for (const auto& pair : cover.simplices_of_size(2)) {
        auto it = e.dims.find(pair);
        if (it == e.dims.end()) {
            report.add({Kind::structure, pair, {}, 0.0, "missing dimension matrix"});
            continue;
        }
        const auto& d = it->second;
        if (d.rows() != e.rank || d.cols() != e.rank) {
            report.add({Kind::dimension_mismatch, pair, {}, 0.0, "dimension matrix has wrong rank"});
            continue;
        }
        if ((d.array() < 0).any())
            report.add({Kind::structure, pair, {}, 0.0, "negative dimension"});
        else if (!is_weakly_invertible(d))
            report.add({Kind::not_weakly_invertible, pair, {}, 0.0,
                        "det " + format_dims(d) + " = " + std::to_string(int_det(d))});
    }
    if (!report.valid) return;
    for (const auto& t : cover.simplices_of_size(3)) {
        const DimMatrix prod = obj_product(e.dim(t[0], t[1]), e.dim(t[1], t[2]));
        if (prod != e.dim(t[0], t[2]))
            report.add({Kind::object_condition, t, {}, 0.0,
                        "E^ab.E^bc = " + format_dims(prod) + " but E^ac = " +
                            format_dims(e.dim(t[0], t[2]))});
    }
    for (const auto& [t, samples] : e.phis)
        if (t.size() != 3 || !cover.contains(t))
            report.add({Kind::structure, t, {}, 0.0, "coherency maps on a non-triple simplex"});
    if (!report.valid) return;
    for (const auto& t : cover.simplices_of_size(3)) {
        const auto it = e.phis.find(t);
        for (int x : cover.points(t)) {
            if (it == e.phis.end() || !it->second.count(x)) {
                report.add({Kind::missing_sample, t, x, 0.0, "no coherency map at this point"});
                continue;
            }
            if (it->second.at(x).dims() != e.dim(t[0], t[2]))
                report.add({Kind::dimension_mismatch, t, x, 0.0,
                            "coherency map is not an automorphism of E^ac"});
        }
    }
}

}  // namespace

template <class Scalar>
BundleReport validate_bundle(const ChartedBundle<Scalar>& e, double tolerance) {
    BundleReport report;
    check_structure(e, report);
    if (!report.valid) return report;
    using Entry = VMor<Scalar>;
    for (const auto& q : e.cover.simplices_of_size(4)) {
        const int a = q[0], b = q[1], c = q[2], d = q[3];
        const DimMatrix& eab = e.dim(a, b);
        const DimMatrix& ebc = e.dim(b, c);
        const DimMatrix& ecd = e.dim(c, d);
        const auto ua_inv = associator_inverse<Entry>(eab, ebc, ecd);
        const auto id_ab = MorMatrix<Entry>::identity(eab);
        const auto id_cd = MorMatrix<Entry>::identity(ecd);
        ++report.checked_quadruples;
        for (int x : e.cover.points(q)) {
            ++report.checked_points;
            const auto lhs =
                mor_compose(e.phi({a, b, d}, x), mor_product(id_ab, e.phi({b, c, d}, x)));
            const auto rhs = mor_compose(
                mor_compose(e.phi({a, c, d}, x), mor_product(e.phi({a, b, c}, x), id_cd)), ua_inv);
            const double r = mor_residual(lhs, rhs);
            report.max_residual = std::max(report.max_residual, r);
            const bool ok = scalar_traits<Scalar>::exact ? r == 0.0 : r <= tolerance;
            if (!ok) report.add({Kind::cocycle, q, x, r, "cocycle diagram does not commute"});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// sign cochains

int SignCochain::operator()(const Simplex& s) const {
    auto it = values.find(s);
    if (it == values.end()) throw DomainError("cochain has no value on " + format_simplex(s));
    return it->second;
}

bool SignCochain::is_trivial() const {
    return std::all_of(values.begin(), values.end(), [](const auto& kv) { return kv.second == 1; });
}

std::vector<Simplex> cocycle_defects(const OrderedCover& cover, const SignCochain& s) {
    std::vector<Simplex> bad;
    for (const auto& p : cover.simplices_of_size(5)) {
        const int a = p[0], b = p[1], c = p[2], d = p[3], e = p[4];
        const int lhs = s({a, c, d, e}) * s({a, b, c, e});
        const int rhs = s({a, b, c, d}) * s({a, b, d, e}) * s({b, c, d, e});
        if (lhs != rhs) bad.push_back(p);
    }
    return bad;
}

template <class Scalar>
SignCochain sign_cocycle(const ChartedBundle<Scalar>& e) {
    SignCochain s{3, {}};
    for (const auto& q : e.cover.simplices_of_size(4))
        s.values[q] = assoc_sign(e.dim(q[0], q[1]), e.dim(q[1], q[2]), e.dim(q[2], q[3]));
    const auto bad = cocycle_defects(e.cover, s);
    if (!bad.empty())
        throw InternalError("associator signs violate the cocycle identity on " +
                            format_simplex(bad.front()));
    return s;
}

SignCochain cech_coboundary(const OrderedCover& cover, const SignCochain& c) {
    if (c.degree != 2) throw DomainError("cech_coboundary expects a 2-cochain");
    SignCochain out{3, {}};
    for (const auto& q : cover.simplices_of_size(4)) {
        int v = 1;
        for (const auto& f : faces(q)) v *= c(f);
        out.values[q] = v;
    }
    return out;
}

namespace {

struct OrientationSystem {
    std::vector<Simplex> triples;
    std::vector<Simplex> quadruples;
    std::vector<gf2::Equation> equations;
};

OrientationSystem build_system(const OrderedCover& cover, const SignCochain& cocycle) {
    if (cocycle.degree != 3) throw DomainError("orientation obstruction must be a 3-cochain");
    OrientationSystem sys;
    sys.triples = cover.simplices_of_size(3);
    sys.quadruples = cover.simplices_of_size(4);
    for (const auto& [q, v] : cocycle.values) {
        if (q.size() != 4 || !cover.contains(q))
            throw DomainError("cochain value on " + format_simplex(q) + " is not a quadruple");
        if (v != 1 && v != -1) throw DomainError("cochain values must be +-1");
    }
    std::map<Simplex, int> var;
    for (std::size_t i = 0; i < sys.triples.size(); ++i)
        var[sys.triples[i]] = static_cast<int>(i);
    for (const auto& q : sys.quadruples) {
        gf2::Equation eq;
        for (const auto& f : faces(q)) eq.variables.push_back(var.at(f));
        eq.rhs = cocycle(q) == -1;
        sys.equations.push_back(std::move(eq));
    }
    return sys;
}

}  // namespace

std::variant<SignCochain, ObstructionWitness> solve_orientation(const OrderedCover& cover,
                                                                const SignCochain& cocycle) {
    const auto sys = build_system(cover, cocycle);
    auto outcome = gf2::solve(static_cast<int>(sys.triples.size()), sys.equations);
    if (auto* cert = std::get_if<gf2::Certificate>(&outcome)) {
        ObstructionWitness w;
        for (int e : cert->equations) w.quadruples.push_back(sys.quadruples[static_cast<std::size_t>(e)]);
        return w;
    }
    const auto& bits = std::get<gf2::Bits>(outcome);
    SignCochain lift{2, {}};
    for (std::size_t i = 0; i < sys.triples.size(); ++i) lift.values[sys.triples[i]] = bits.test(i) ? -1 : 1;
    return lift;
}

bool verify_witness(const OrderedCover& cover, const SignCochain& cocycle,
                    const ObstructionWitness& witness) {
    const auto sys = build_system(cover, cocycle);
    gf2::Certificate cert;
    for (const auto& q : witness.quadruples) {
        auto it = std::find(sys.quadruples.begin(), sys.quadruples.end(), q);
        if (it == sys.quadruples.end()) return false;
        cert.equations.push_back(static_cast<int>(it - sys.quadruples.begin()));
    }
    return gf2::verify_certificate(static_cast<int>(sys.triples.size()), sys.equations, cert);
}

// ---------------------------------------------------------------------------
// orientation

template <class Scalar>
BundleReport validate_oriented(const OrientedChartedBundle<Scalar>& oe, double tolerance) {
    BundleReport report = validate_bundle(oe.base, tolerance);
    if (!report.valid) return report;
    const auto& cover = oe.base.cover;
    for (const auto& t : cover.simplices_of_size(3)) {
        auto it = oe.lift.values.find(t);
        if (it == oe.lift.values.end() || (it->second != 1 && it->second != -1))
            report.add({Kind::orientation, t, {}, 0.0, "missing or malformed lift sign"});
    }
    if (!report.valid) return report;
    const auto signs = sign_cocycle(oe.base);
    const auto& l = oe.lift;
    for (const auto& q : cover.simplices_of_size(4)) {
        const int a = q[0], b = q[1], c = q[2], d = q[3];
        if (l({a, c, d}) * l({a, b, c}) * signs(q) != l({a, b, d}) * l({b, c, d}))
            report.add({Kind::orientation, q, {}, 0.0, "oriented cocycle diagram fails on signs"});
    }
    return report;
}

template <class Scalar>
std::variant<OrientedChartedBundle<Scalar>, ObstructionWitness> orient_lift(
    const ChartedBundle<Scalar>& e, double tolerance) {
    auto report = validate_bundle(e, tolerance);
    if (!report.valid) throw InvalidBundleError(std::move(report));
    auto solved = solve_orientation(e.cover, sign_cocycle(e));
    if (auto* w = std::get_if<ObstructionWitness>(&solved)) return *w;
    OrientedChartedBundle<Scalar> oe{e, std::get<SignCochain>(std::move(solved))};
    const auto check = validate_oriented(oe, tolerance);
    if (!check.valid) throw InternalError("orientation lift does not satisfy the oriented cocycle");
    return oe;
}

// ---------------------------------------------------------------------------
// gerbes

template <class Scalar>
const Scalar& ChartedGerbe<Scalar>::operator()(const Simplex& triple, int point) const {
    auto it = values.find(triple);
    if (it == values.end()) throw DomainError("gerbe has no value on " + format_simplex(triple));
    auto jt = it->second.find(point);
    if (jt == it->second.end())
        throw DomainError("gerbe has no value on " + format_simplex(triple) + " at point " +
                          std::to_string(point));
    return jt->second;
}

template <class Scalar>
BundleReport validate_gerbe(const ChartedGerbe<Scalar>& g, double tolerance) {
    BundleReport report;
    for (const auto& q : g.cover.simplices_of_size(4)) {
        const int a = q[0], b = q[1], c = q[2], d = q[3];
        ++report.checked_quadruples;
        for (int x : g.cover.points(q)) {
            ++report.checked_points;
            const Scalar diff = g({b, c, d}, x) * g({a, b, d}, x) - g({a, c, d}, x) * g({a, b, c}, x);
            const double r = scalar_traits<Scalar>::is_zero(diff)
                                 ? 0.0
                                 : std::max(scalar_traits<Scalar>::magnitude(diff),
                                            std::numeric_limits<double>::denorm_min());
            report.max_residual = std::max(report.max_residual, r);
            const bool ok = scalar_traits<Scalar>::exact ? r == 0.0 : r <= tolerance;
            if (!ok) report.add({Kind::gerbe_cocycle, q, x, r, "gerbe cocycle identity fails"});
        }
    }
    return report;
}

template <class Scalar>
ChartedGerbe<Scalar> det_gerbe(const OrientedChartedBundle<Scalar>& oe, double tolerance) {
    ChartedGerbe<Scalar> g{oe.base.cover, {}};
    for (const auto& t : oe.base.cover.simplices_of_size(3)) {
        auto& slot = g.values[t];
        const int sign = oe.lift(t);
        for (int x : oe.base.cover.points(t))
            slot.emplace(x, dger(OrientedV<Scalar>(oe.base.phi(t, x), sign)).scale);
    }
    auto report = validate_gerbe(g, tolerance);
    if (!report.valid) throw InvalidBundleError(std::move(report));
    return g;
}

template <class Scalar>
OrientedChartedBundle<Scalar> bundle_from_gerbe(const ChartedGerbe<Scalar>& g, int rank) {
    OrientedChartedBundle<Scalar> oe{{g.cover, rank, {}, {}}, SignCochain{2, {}}};
    for (const auto& p : g.cover.simplices_of_size(2)) oe.base.dims.emplace(p, dim_identity(rank));
    for (const auto& t : g.cover.simplices_of_size(3)) {
        auto& slot = oe.base.phis[t];
        for (int x : g.cover.points(t))
            slot.emplace(x, gerbe_include<VMor<Scalar>>(Lv1Mor<Scalar>(g(t, x)), rank).base());
        oe.lift.values[t] = 1;
    }
    return oe;
}

template <class Scalar>
ChartedBundle<Scalar> restrict_points(const ChartedBundle<Scalar>& e, const std::set<int>& keep) {
    ChartedBundle<Scalar> out{e.cover.restrict_points(keep), e.rank, e.dims, {}};
    for (const auto& [t, samples] : e.phis) {
        auto& slot = out.phis[t];
        for (const auto& [x, phi] : samples)
            if (keep.count(x)) slot.emplace(x, phi);
    }
    return out;
}

#define BIVECT_INSTANTIATE_CHARTED(S)                                                          \
    template struct ChartedBundle<S>;                                                          \
    template BundleReport validate_bundle<S>(const ChartedBundle<S>&, double);                 \
    template SignCochain sign_cocycle<S>(const ChartedBundle<S>&);                             \
    template BundleReport validate_oriented<S>(const OrientedChartedBundle<S>&, double);       \
    template std::variant<OrientedChartedBundle<S>, ObstructionWitness> orient_lift<S>(        \
        const ChartedBundle<S>&, double);                                                      \
    template struct ChartedGerbe<S>;                                                           \
    template BundleReport validate_gerbe<S>(const ChartedGerbe<S>&, double);                   \
    template ChartedGerbe<S> det_gerbe<S>(const OrientedChartedBundle<S>&, double);            \
    template OrientedChartedBundle<S> bundle_from_gerbe<S>(const ChartedGerbe<S>&, int);       \
    template ChartedBundle<S> restrict_points<S>(const ChartedBundle<S>&, const std::set<int>&);

BIVECT_INSTANTIATE_CHARTED(ExactComplex)
BIVECT_INSTANTIATE_CHARTED(ApproxComplex)

}  // namespace bivect
