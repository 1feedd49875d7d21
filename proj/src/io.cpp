#include "bivect/io.hpp"

#include <fstream>

namespace bivect::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw SchemaError(what); }

const json& field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) fail(std::string("missing field \"") + key + "\"");
    return obj.at(key);
}

template <class T>
T get(const json& j, const char* what) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        fail(std::string("field \"") + what + "\" has the wrong type");
    }
}

Simplex parse_simplex(const json& j, std::size_t size, const char* what) {
    auto s = get<Simplex>(j, what);
    if (size && s.size() != size)
        fail(std::string("\"") + what + "\" must list " + std::to_string(size) + " indices");
    return s;
}

Rational parse_component(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    fail("exact scalar components must be \"p/q\" strings or integers");
}

template <class Scalar>
Scalar parse_scalar(const json& j);

template <>
ExactComplex parse_scalar<ExactComplex>(const json& j) {
    try {
        if (j.is_object()) {
            if (!j.contains("re") || !j.contains("im") || j.size() != 2)
                fail("exact scalars need exactly \"re\" and \"im\"");
            return {parse_component(j["re"]), parse_component(j["im"])};
        }
        if (j.is_array() && j.size() == 2) return {parse_component(j[0]), parse_component(j[1])};
        return {parse_component(j), Rational(0)};
    } catch (const DomainError& e) {
        fail(std::string("bad exact scalar: ") + e.what());
    }
}

template <>
ApproxComplex parse_scalar<ApproxComplex>(const json& j) {
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_number()) return {j.get<double>(), 0.0};
    fail("approximate scalars must be [re, im] number pairs");
}

template <class M, class Parse>
M parse_square(const json& j, Parse parse_entry, const char* what) {
    if (!j.is_array()) fail(std::string("\"") + what + "\" must be a list of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    M m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            fail(std::string("\"") + what + "\" must be square");
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = parse_entry(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

DimMatrix parse_dims(const json& j) {
    return parse_square<DimMatrix>(j, [](const json& e) { return get<long long>(e, "matrix"); },
                                   "matrix");
}

template <class Scalar>
VMatrix<Scalar> parse_vmatrix(const json& j) {
    if (!j.is_array()) fail("\"entries\" must be a matrix of matrices");
    const auto n = static_cast<int>(j.size());
    DimMatrix dims(n, n);
    std::vector<VMor<Scalar>> entries;
    for (int r = 0; r < n; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != n) fail("\"entries\" must be square");
        for (int c = 0; c < n; ++c) {
            auto m = parse_square<Matrix<Scalar>>(row[static_cast<std::size_t>(c)],
                                                  [](const json& e) { return parse_scalar<Scalar>(e); },
                                                  "entries");
            dims(r, c) = m.rows();
            try {
                entries.emplace_back(std::move(m));
            } catch (const DomainError& e) {
                fail("coherency map entry (" + std::to_string(r) + "," + std::to_string(c) +
                     ") is not invertible");
            }
        }
    }
    return VMatrix<Scalar>(std::move(dims), std::move(entries));
}

OrderedCover parse_cover(const json& j) {
    auto indices = get<std::vector<int>>(field(j, "indices"), "indices");
    std::map<Simplex, std::vector<int>> simplices;
    for (const auto& s : field(j, "simplices")) {
        auto key = parse_simplex(field(s, "simplex"), 0, "simplex");
        auto pts = s.contains("points") ? get<std::vector<int>>(s.at("points"), "points")
                                        : std::vector<int>{};
        if (!simplices.emplace(std::move(key), std::move(pts)).second) fail("duplicate simplex in cover");
    }
    try {
        return OrderedCover(std::move(indices), std::move(simplices));
    } catch (const DomainError& e) {
        fail(std::string("invalid cover: ") + e.what());
    }
}

SampledBase parse_base(const json& j) {
    SampledBase base;
    const auto& lat = field(j, "lattice");
    base.lattice = Lattice{get<int>(field(lat, "dimension"), "dimension"), get<double>(field(lat, "lo"), "lo"),
                           get<double>(field(lat, "h"), "h"), get<int>(field(lat, "size"), "size")};
    for (const auto& c : field(j, "charts")) {
        const int a = get<int>(field(c, "index"), "index");
        auto mem = get<std::vector<int>>(field(c, "membership"), "membership");
        auto sh = get<std::vector<int>>(field(c, "shrunk"), "shrunk");
        std::sort(mem.begin(), mem.end());
        std::sort(sh.begin(), sh.end());
        base.membership[a] = std::move(mem);
        base.shrunk[a] = std::move(sh);
        base.psi[a] = get<std::vector<double>>(field(c, "psi"), "psi");
    }
    const auto issues = check_base(base);
    if (!issues.empty()) fail("invalid base: " + issues.front());
    return base;
}

SignCochain parse_cochain(const json& j, int degree, const char* key) {
    SignCochain c{degree, {}};
    for (const auto& e : j) {
        auto s = parse_simplex(field(e, key), static_cast<std::size_t>(degree + 1), key);
        const int v = get<int>(field(e, "sign"), "sign");
        if (v != 1 && v != -1) fail("signs must be +1 or -1");
        if (!c.values.emplace(std::move(s), v).second) fail(std::string("duplicate ") + key);
    }
    return c;
}

template <class Scalar>
ChartedBundle<Scalar> parse_bundle(const json& doc, const OrderedCover& cover, int rank) {
    ChartedBundle<Scalar> e{cover, rank, {}, {}};
    for (const auto& d : field(doc, "dims")) {
        auto p = parse_simplex(field(d, "pair"), 2, "pair");
        if (!e.dims.emplace(std::move(p), parse_dims(field(d, "matrix"))).second) fail("duplicate dims entry");
    }
    if (doc.contains("phis"))
        for (const auto& f : doc.at("phis")) {
            auto t = parse_simplex(field(f, "triple"), 3, "triple");
            const int x = get<int>(field(f, "point"), "point");
            if (!e.phis[t].emplace(x, parse_vmatrix<Scalar>(field(f, "entries"))).second)
                fail("duplicate coherency map at " + format_simplex(t));
        }
    return e;
}

ConnectionField& seed_slot(std::map<Simplex, ConnectionField>& seeds, const Simplex& p,
                           const DimMatrix& dims, int dirs) {
    auto it = seeds.find(p);
    if (it == seeds.end()) it = seeds.emplace(p, ConnectionField{p, dims, dirs, {}}).first;
    return it->second;
}

}  // namespace

Job parse_job(const json& doc) {
    if (!doc.is_object()) fail("job file must be a JSON object");
    if (get<std::string>(field(doc, "version"), "version") != schema_version)
        fail(std::string("unsupported version, expected ") + schema_version);
    Job job;
    const auto mode = get<std::string>(field(doc, "scalar_mode"), "scalar_mode");
    if (mode != "exact" && mode != "approx") fail("scalar_mode must be \"exact\" or \"approx\"");
    job.exact = mode == "exact";
    if (doc.contains("tolerance")) {
        job.tolerance = get<double>(doc.at("tolerance"), "tolerance");
        if (!(job.tolerance > 0)) fail("tolerance must be positive");
    }
    if (doc.contains("rank")) job.rank = get<int>(doc.at("rank"), "rank");
    if (doc.contains("base")) job.base = parse_base(doc.at("base"));
    if (doc.contains("cover"))
        job.cover = parse_cover(doc.at("cover"));
    else if (job.base)
        job.cover = OrderedCover::from_membership(job.base->membership);
    if (!job.cover) fail("missing field \"cover\"");

    if (doc.contains("dims")) {
        if (job.rank < 1) fail("\"rank\" must be a positive integer when dims are given");
        if (job.exact)
            job.bundle = parse_bundle<ExactComplex>(doc, *job.cover, job.rank);
        else
            job.bundle = parse_bundle<ApproxComplex>(doc, *job.cover, job.rank);
    }
    if (doc.contains("lift")) job.lift = parse_cochain(doc.at("lift"), 2, "triple");
    if (doc.contains("sign_cocycle")) job.sign_cocycle = parse_cochain(doc.at("sign_cocycle"), 3, "quadruple");

    if (doc.contains("seeds")) {
        if (job.exact) fail("connections require scalar_mode \"approx\"");
        const auto* bundle = std::get_if<ChartedBundle<ApproxComplex>>(&job.bundle);
        if (!bundle || !job.base) fail("seeds need dims and a base");
        const int dirs = job.base->lattice.dimension;
        for (const auto& s : doc.at("seeds")) {
            auto p = parse_simplex(field(s, "pair"), 2, "pair");
            auto dit = bundle->dims.find(p);
            if (dit == bundle->dims.end()) fail("seed on " + format_simplex(p) + " has no dims");
            const int x = get<int>(field(s, "point"), "point");
            const auto& form = field(s, "form");
            if (!form.is_array() || static_cast<int>(form.size()) != dirs)
                fail("seed form must have one matrix per lattice direction");
            FormValue v;
            for (const auto& dir : form) {
                const int n = static_cast<int>(dit->second.rows());
                if (!dir.is_array() || static_cast<int>(dir.size()) != n) fail("seed form has the wrong rank");
                std::vector<Block> blocks;
                for (const auto& row : dir) {
                    if (!row.is_array() || static_cast<int>(row.size()) != n) fail("seed form has the wrong rank");
                    for (const auto& b : row)
                        blocks.push_back(parse_square<Block>(
                            b, [](const json& e) { return parse_scalar<ApproxComplex>(e); }, "form"));
                }
                try {
                    v.emplace_back(dit->second, std::move(blocks));
                } catch (const DomainError& e) {
                    fail("seed on " + format_simplex(p) + ": " + e.what());
                }
            }
            seed_slot(job.seeds, p, dit->second, dirs).values.emplace(x, std::move(v));
        }
    }
    if (doc.contains("paths"))
        for (const auto& p : doc.at("paths")) {
            PathSpec spec{parse_simplex(field(p, "triple"), 3, "triple"),
                          get<std::vector<int>>(field(p, "points"), "points"),
                          p.contains("refine") ? get<int>(p.at("refine"), "refine") : 1};
            if (spec.points.empty() || spec.refine < 1) fail("paths need points and refine >= 1");
            job.paths.push_back(std::move(spec));
        }
    return job;
}

Job read_job(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    return parse_job(doc);
}

// ---------------------------------------------------------------------------
// writing

template <>
json scalar_to_json<ExactComplex>(const ExactComplex& z) {
    return {{"re", format_rational(z.re())}, {"im", format_rational(z.im())}};
}

template <>
json scalar_to_json<ApproxComplex>(const ApproxComplex& z) {
    return json::array({z.real(), z.imag()});
}

json dims_to_json(const DimMatrix& d) {
    json rows = json::array();
    for (int i = 0; i < d.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < d.cols(); ++j) row.push_back(d(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json simplex_to_json(const Simplex& s) { return json(s); }

namespace {

template <class M>
json matrix_to_json(const M& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

template <class Scalar>
json vmatrix_to_json(const VMatrix<Scalar>& f) {
    json rows = json::array();
    for (int i = 0; i < f.n(); ++i) {
        json row = json::array();
        for (int j = 0; j < f.n(); ++j) row.push_back(matrix_to_json(f(i, j).matrix()));
        rows.push_back(std::move(row));
    }
    return rows;
}

template json vmatrix_to_json<ExactComplex>(const VMatrix<ExactComplex>&);
template json vmatrix_to_json<ApproxComplex>(const VMatrix<ApproxComplex>&);

json cochain_to_json(const SignCochain& c) {
    const char* key = c.degree == 2 ? "triple" : "quadruple";
    json out = json::array();
    for (const auto& [s, v] : c.values) out.push_back({{key, s}, {"sign", v}});
    return out;
}

json report_to_json(const BundleReport& r) {
    json v = json::array();
    for (const auto& x : r.violations) {
        json e{{"kind", to_string(x.kind)},
               {"simplex", x.simplex},
               {"residual", x.residual},
               {"message", x.message}};
        if (x.point) e["point"] = *x.point;
        v.push_back(std::move(e));
    }
    return {{"valid", r.valid},
            {"max_residual", r.max_residual},
            {"checked_quadruples", r.checked_quadruples},
            {"checked_points", r.checked_points},
            {"violations", std::move(v)}};
}

namespace {

json form_to_json(const FormValue& v) {
    json dirs = json::array();
    for (const auto& bm : v) {
        json rows = json::array();
        for (int i = 0; i < bm.n(); ++i) {
            json row = json::array();
            for (int j = 0; j < bm.n(); ++j) row.push_back(matrix_to_json(bm(i, j)));
            rows.push_back(std::move(row));
        }
        dirs.push_back(std::move(rows));
    }
    return dirs;
}

template <class Scalar>
void write_bundle(const ChartedBundle<Scalar>& e, json& doc) {
    json dims = json::array();
    for (const auto& [p, d] : e.dims) dims.push_back({{"pair", p}, {"matrix", dims_to_json(d)}});
    json phis = json::array();
    for (const auto& [t, samples] : e.phis)
        for (const auto& [x, f] : samples)
            phis.push_back({{"triple", t}, {"point", x}, {"entries", vmatrix_to_json(f)}});
    doc["rank"] = e.rank;
    doc["dims"] = std::move(dims);
    doc["phis"] = std::move(phis);
}

}  // namespace

json field_to_json(const ConnectionField& f) {
    json values = json::array();
    for (const auto& [x, v] : f.values) values.push_back({{"point", x}, {"form", form_to_json(v)}});
    return {{"pair", f.pair}, {"values", std::move(values)}};
}

json write_job(const Job& job) {
    json doc{{"version", schema_version},
             {"scalar_mode", job.exact ? "exact" : "approx"},
             {"tolerance", job.tolerance}};
    if (job.rank > 0) doc["rank"] = job.rank;
    if (job.cover) {
        json simplices = json::array();
        for (const auto& [s, pts] : job.cover->simplices())
            simplices.push_back({{"simplex", s}, {"points", pts}});
        doc["cover"] = {{"indices", job.cover->indices()}, {"simplices", std::move(simplices)}};
    }
    if (job.base) {
        const auto& b = *job.base;
        json charts = json::array();
        for (const auto& [a, mem] : b.membership)
            charts.push_back({{"index", a}, {"membership", mem}, {"shrunk", b.shrunk.at(a)}, {"psi", b.psi.at(a)}});
        doc["base"] = {{"lattice",
                        {{"dimension", b.lattice.dimension},
                         {"lo", b.lattice.lo},
                         {"h", b.lattice.h},
                         {"size", b.lattice.size}}},
                       {"charts", std::move(charts)}};
    }
    if (const auto* e = std::get_if<ChartedBundle<ExactComplex>>(&job.bundle)) write_bundle(*e, doc);
    if (const auto* e = std::get_if<ChartedBundle<ApproxComplex>>(&job.bundle)) write_bundle(*e, doc);
    if (job.lift) doc["lift"] = cochain_to_json(*job.lift);
    if (job.sign_cocycle) doc["sign_cocycle"] = cochain_to_json(*job.sign_cocycle);
    if (!job.seeds.empty()) {
        json seeds = json::array();
        for (const auto& [p, f] : job.seeds)
            for (const auto& [x, v] : f.values)
                seeds.push_back({{"pair", p}, {"point", x}, {"form", form_to_json(v)}});
        doc["seeds"] = std::move(seeds);
    }
    if (!job.paths.empty()) {
        json paths = json::array();
        for (const auto& p : job.paths)
            paths.push_back({{"triple", p.simplex}, {"points", p.points}, {"refine", p.refine}});
        doc["paths"] = std::move(paths);
    }
    return doc;
}

}  // namespace bivect::io
