#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace bivect::cli {

using io::json;

namespace {

[[noreturn]] void input_fail(const std::string& what) { throw io::SchemaError(what); }

json witness_to_json(const ObstructionWitness& w, bool verified) {
    json qs = json::array();
    for (const auto& q : w.quadruples) qs.push_back(q);
    return {{"quadruples", std::move(qs)}, {"verified", verified}};
}

template <class Scalar>
const ChartedBundle<Scalar>* bundle_of(const io::Job& job) {
    return std::get_if<ChartedBundle<Scalar>>(&job.bundle);
}

// ---------------------------------------------------------------------------
// validate

template <class Scalar>
Outcome validate(const ChartedBundle<Scalar>& e, double tol) {
    const auto report = validate_bundle(e, tol);
    return {report.valid ? ok : math_failure, {{"command", "validate"}, {"report", io::report_to_json(report)}}};
}

// ---------------------------------------------------------------------------
// obstruction / orient

Outcome solve_cochain(const char* command, const OrderedCover& cover, const SignCochain& cocycle,
                      const char* source, bool unorientable_is_failure) {
    json out{{"command", command}, {"source", source}, {"cocycle", io::cochain_to_json(cocycle)}};
    const auto defects = cocycle_defects(cover, cocycle);
    json d = json::array();
    for (const auto& q : defects) d.push_back(q);
    out["cocycle_defects"] = std::move(d);
    auto solved = solve_orientation(cover, cocycle);
    if (const auto* lift = std::get_if<SignCochain>(&solved)) {
        out["class_trivial"] = true;
        out["lift"] = io::cochain_to_json(*lift);
        return {ok, std::move(out)};
    }
    const auto& w = std::get<ObstructionWitness>(solved);
    out["class_trivial"] = false;
    out["witness"] = witness_to_json(w, verify_witness(cover, cocycle, w));
    return {unorientable_is_failure ? math_failure : ok, std::move(out)};
}

template <class Scalar>
Outcome obstruction(const ChartedBundle<Scalar>& e, double tol) {
    const auto report = validate_bundle(e, tol);
    if (!report.valid)
        return {math_failure, {{"command", "obstruction"}, {"report", io::report_to_json(report)}}};
    return solve_cochain("obstruction", e.cover, sign_cocycle(e), "bundle", false);
}

template <class Scalar>
Outcome orient(const ChartedBundle<Scalar>& e, double tol) {
    const auto report = validate_bundle(e, tol);
    if (!report.valid)
        return {math_failure, {{"command", "orient"}, {"report", io::report_to_json(report)}}};
    const auto cocycle = sign_cocycle(e);
    json out{{"command", "orient"}, {"source", "bundle"}, {"cocycle", io::cochain_to_json(cocycle)}};
    auto lifted = orient_lift(e, tol);
    if (const auto* w = std::get_if<ObstructionWitness>(&lifted)) {
        out["class_trivial"] = false;
        out["witness"] = witness_to_json(*w, verify_witness(e.cover, cocycle, *w));
        return {math_failure, std::move(out)};
    }
    const auto& oe = std::get<OrientedChartedBundle<Scalar>>(lifted);
    out["class_trivial"] = true;
    out["lift"] = io::cochain_to_json(oe.lift);
    out["oriented_report"] = io::report_to_json(validate_oriented(oe, tol));
    return {ok, std::move(out)};
}

// ---------------------------------------------------------------------------
// gerbe

template <class Scalar>
Outcome gerbe(const ChartedBundle<Scalar>& e, const std::optional<SignCochain>& lift, double tol) {
    json out{{"command", "gerbe"}};
    std::optional<OrientedChartedBundle<Scalar>> oe;
    if (lift) {
        oe = OrientedChartedBundle<Scalar>{e, *lift};
        out["lift_source"] = "provided";
        const auto report = validate_oriented(*oe, tol);
        if (!report.valid) {
            out["report"] = io::report_to_json(report);
            return {math_failure, std::move(out)};
        }
    } else {
        const auto report = validate_bundle(e, tol);
        if (!report.valid) {
            out["report"] = io::report_to_json(report);
            return {math_failure, std::move(out)};
        }
        auto lifted = orient_lift(e, tol);
        if (const auto* w = std::get_if<ObstructionWitness>(&lifted)) {
            out["witness"] = witness_to_json(*w, verify_witness(e.cover, sign_cocycle(e), *w));
            return {math_failure, std::move(out)};
        }
        oe = std::get<OrientedChartedBundle<Scalar>>(std::move(lifted));
        out["lift_source"] = "computed";
    }
    out["lift"] = io::cochain_to_json(oe->lift);
    try {
        const auto g = det_gerbe(*oe, tol);
        json values = json::array();
        for (const auto& [t, samples] : g.values)
            for (const auto& [x, c] : samples)
                values.push_back({{"triple", t}, {"point", x}, {"value", io::scalar_to_json(c)}});
        out["gerbe"] = std::move(values);
        out["cocycle_report"] = io::report_to_json(validate_gerbe(g, tol));
        return {ok, std::move(out)};
    } catch (const InvalidBundleError& err) {
        out["cocycle_report"] = io::report_to_json(err.report());
        return {math_failure, std::move(out)};
    }
}

// ---------------------------------------------------------------------------
// connect

struct ConnectInput {
    SampledBase base;
    ChartedBundle<ApproxComplex> bundle;
    std::map<Simplex, ConnectionField> seeds;
};

template <class V>
std::map<int, V> remap_points(const std::map<int, V>& in, const std::map<int, int>& remap) {
    std::map<int, V> out;
    for (const auto& [x, v] : in) {
        auto it = remap.find(x);
        if (it != remap.end()) out.emplace(it->second, v);
    }
    return out;
}

// The same job on the lattice with every other point dropped.
std::optional<ConnectInput> coarsened(const ConnectInput& fine, std::string& why) {
    std::pair<Lattice, std::map<int, int>> lat;
    try {
        lat = coarsen(fine.base.lattice);
    } catch (const DomainError& e) {
        why = e.what();
        return std::nullopt;
    }
    const auto& remap = lat.second;
    SampledBase base{lat.first, {}, {}, {}};
    auto keep = [&](const std::vector<int>& pts) {
        std::vector<int> out;
        for (int x : pts)
            if (auto it = remap.find(x); it != remap.end()) out.push_back(it->second);
        std::sort(out.begin(), out.end());
        return out;
    };
    for (const auto& [a, mem] : fine.base.membership) {
        base.membership[a] = keep(mem);
        base.shrunk[a] = keep(fine.base.shrunk.at(a));
        auto& psi = base.psi[a];
        psi.assign(static_cast<std::size_t>(base.lattice.num_points()), 0.0);
        for (const auto& [x, y] : remap) psi[static_cast<std::size_t>(y)] = fine.base.psi.at(a)[static_cast<std::size_t>(x)];
    }
    if (const auto issues = check_base(base); !issues.empty()) {
        why = "coarse base invalid: " + issues.front();
        return std::nullopt;
    }
    const auto cover = OrderedCover::from_membership(base.membership);
    if (cover.simplices_of_size(2) != fine.bundle.cover.simplices_of_size(2) ||
        cover.simplices_of_size(3) != fine.bundle.cover.simplices_of_size(3)) {
        why = "coarse lattice changes the nerve";
        return std::nullopt;
    }
    ChartedBundle<ApproxComplex> bundle{cover, fine.bundle.rank, fine.bundle.dims, {}};
    for (const auto& [t, samples] : fine.bundle.phis) bundle.phis[t] = remap_points(samples, remap);
    std::map<Simplex, ConnectionField> seeds;
    for (const auto& [p, f] : fine.seeds)
        seeds.emplace(p, ConnectionField{f.pair, f.dims, f.directions, remap_points(f.values, remap)});
    return ConnectInput{std::move(base), std::move(bundle), std::move(seeds)};
}

OrientedChartedBundle<ApproxComplex> oriented_for_paths(const ChartedBundle<ApproxComplex>& e,
                                                        const std::optional<SignCochain>& lift,
                                                        double tol) {
    if (lift) return {e, *lift};
    auto lifted = orient_lift(e, tol);
    if (std::holds_alternative<ObstructionWitness>(lifted))
        throw DomainError("transport check needs an orientable bundle");
    return std::get<OrientedChartedBundle<ApproxComplex>>(std::move(lifted));
}

Outcome connect(const io::Job& job, const Options& opts, double tol) {
    const auto* e = bundle_of<ApproxComplex>(job);
    if (!e || !job.base || job.seeds.empty())
        input_fail("connect needs scalar_mode \"approx\", dims, phis, a base and seeds");
    ConnectInput fine{*job.base, *e, job.seeds};
    json out{{"command", "connect"}};

    ConnectiveStructure s;
    try {
        s = build_connective(fine.bundle, fine.base, fine.seeds);
    } catch (const InvalidBundleError& err) {
        out["report"] = io::report_to_json(err.report());
        return {math_failure, std::move(out)};
    } catch (const DomainError& err) {
        out["error"] = err.what();
        return {math_failure, std::move(out)};
    }
    const auto residuals = connective_residuals(fine.bundle, fine.base, s);
    json per = json::array();
    for (const auto& [t, r] : residuals.per_triple) per.push_back({{"triple", t}, {"max_residual", r}});
    json cocycle{{"max_residual", residuals.max_residual},
                 {"checked_points", residuals.checked_points},
                 {"tolerance", tol},
                 {"per_triple", std::move(per)}};
    if (residuals.worst)
        cocycle["worst"] = {{"triple", residuals.worst->triple}, {"point", residuals.worst->point}};
    bool passed = residuals.max_residual <= tol;
    out["cocycle"] = std::move(cocycle);

    json paths = json::array();
    if (!job.paths.empty()) {
        const auto oe = oriented_for_paths(fine.bundle, job.lift, tol);
        std::string why;
        const auto coarse = coarsened(fine, why);
        std::optional<ConnectiveStructure> coarse_s;
        std::optional<OrientedChartedBundle<ApproxComplex>> coarse_oe;
        if (coarse) {
            try {
                coarse_s = build_connective(coarse->bundle, coarse->base, coarse->seeds);
                coarse_oe = OrientedChartedBundle<ApproxComplex>{coarse->bundle, oe.lift};
            } catch (const DomainError& err) {
                why = err.what();
            }
        }
        const auto remap = coarsen(fine.base.lattice).second;
        for (auto path : job.paths) {
            if (opts.refine) path.refine = *opts.refine;
            TransportReport r;
            try {
                r = gerbe_transport_check(oe, s, fine.base.lattice, path);
            } catch (const DomainError& err) {
                input_fail(std::string("path: ") + err.what());
            }
            json p{{"triple", path.simplex},
                   {"points", path.points},
                   {"refine", path.refine},
                   {"square_residual", r.square_residual},
                   {"dger_residual", r.dger_residual}};
            std::optional<double> ratio;
            if (coarse_s) {
                PathSpec cp{path.simplex, {}, path.refine};
                bool representable = true;
                for (int x : path.points) {
                    auto it = remap.find(x);
                    if (it == remap.end()) representable = false;
                    else cp.points.push_back(it->second);
                }
                if (representable) {
                    try {
                        const auto rc = gerbe_transport_check(*coarse_oe, *coarse_s, coarse->base.lattice, cp);
                        p["coarse_residual"] = rc.residual();
                        if (r.residual() > 0) ratio = rc.residual() / r.residual();
                    } catch (const DomainError& err) {
                        p["ratio_unavailable"] = err.what();
                    }
                } else {
                    p["ratio_unavailable"] = "path uses points off the coarse lattice";
                }
            } else {
                p["ratio_unavailable"] = why;
            }
            if (ratio) p["ratio"] = *ratio;
            const bool path_ok = r.residual() <= tol || (ratio && *ratio >= 3.0 && *ratio <= 5.0);
            p["passed"] = path_ok;
            passed = passed && path_ok;
            paths.push_back(std::move(p));
        }
    }
    out["paths"] = std::move(paths);
    json fields = json::array();
    for (const auto& [pair, f] : s.fields) fields.push_back(io::field_to_json(f));
    out["connective_structure"] = std::move(fields);
    out["passed"] = passed;
    return {passed ? ok : math_failure, std::move(out)};
}

template <class F>
Outcome with_bundle(const io::Job& job, const char* command, F&& f) {
    if (const auto* e = bundle_of<ExactComplex>(job)) return f(*e);
    if (const auto* e = bundle_of<ApproxComplex>(job)) return f(*e);
    input_fail(std::string(command) + " needs a bundle (dims and phis)");
}

}  // namespace

Outcome run(const Options& opts, const io::Job& job) {
    const double tol = opts.tolerance.value_or(job.tolerance);
    if (!(tol > 0)) input_fail("tolerance must be positive");
    const auto& cmd = opts.command;
    if (cmd == "validate")
        return with_bundle(job, "validate", [&](const auto& e) { return validate(e, tol); });
    if (cmd == "obstruction" || cmd == "orient") {
        const bool is_orient = cmd == "orient";
        if (job.sign_cocycle)
            return solve_cochain(cmd.c_str(), *job.cover, *job.sign_cocycle, "supplied", is_orient);
        return with_bundle(job, cmd.c_str(), [&](const auto& e) {
            return is_orient ? orient(e, tol) : obstruction(e, tol);
        });
    }
    if (cmd == "gerbe")
        return with_bundle(job, "gerbe", [&](const auto& e) { return gerbe(e, job.lift, tol); });
    if (cmd == "connect") return connect(job, opts, tol);
    input_fail("unknown command " + cmd);
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Charted 2-vector bundles: validation, orientation, determinant gerbes and connective structures"};
    app.require_subcommand(1, 1);
    std::string file;
    std::optional<double> tolerance;
    std::optional<int> refine;
    std::string out_path;
    for (const char* name : {"validate", "obstruction", "orient", "gerbe", "connect"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("file", file, "bundle job file (JSON)")->required();
        sub->add_option("--tolerance", tolerance, "absolute residual tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--refine", refine, "midpoint steps per path segment")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_path, "write the report here instead of stdout");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : input_error;
    }
    Options opts{app.get_subcommands().front()->get_name(), tolerance, refine};

    Outcome outcome;
    try {
        outcome = run(opts, io::read_job(file));
    } catch (const io::SchemaError& e) {
        err << "bivect: input error: " << e.what() << "\n";
        return input_error;
    } catch (const InvalidBundleError& e) {
        outcome = {math_failure, {{"command", opts.command}, {"report", io::report_to_json(e.report())}}};
    } catch (const DomainError& e) {
        outcome = {math_failure, {{"command", opts.command}, {"error", e.what()}}};
    }

    const std::string text = outcome.report.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path);
        if (!f) {
            err << "bivect: cannot write " << out_path << "\n";
            return input_error;
        }
        f << text;
    }
    return outcome.exit_code;
}

}  // namespace bivect::cli
