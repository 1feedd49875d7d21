// Regenerates the JSON fixtures under docs/fixtures. Deterministic: every
// random choice comes from a fixed seed.

#include "bivect/fixtures.hpp"
#include "bivect/io.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace bivect;
using bivect::io::json;

namespace {

void write(const fs::path& dir, const std::string& name, const json& doc) {
    std::ofstream f(dir / name);
    f << doc.dump(2) << "\n";
    std::cout << (dir / name).string() << "\n";
}

template <class Scalar>
io::Job bundle_job(const ChartedBundle<Scalar>& e, bool exact) {
    io::Job job;
    job.exact = exact;
    job.rank = e.rank;
    job.cover = e.cover;
    job.bundle = e;
    return job;
}

// 4-charts, full simplex, nontrivial associator sign; orientable since the
// nerve is contractible.
json nonmoi() { return io::write_job(bundle_job(fixtures::nonmoi_bundle<ExactComplex>(7, {0, 1}), true)); }

// Boundary of the 4-simplex with the fundamental class: the one nerve in
// the set whose sign class cannot be lifted.
json obstruction_nerve() {
    const auto cover = fixtures::simplex_cover(5, true);
    io::Job job;
    job.cover = cover;
    job.sign_cocycle = fixtures::fundamental_class(cover);
    return io::write_job(job);
}

json coboundary_nerve() {
    const auto cover = fixtures::simplex_cover(5, true);
    fixtures::Rng rng(11);
    io::Job job;
    job.cover = cover;
    job.sign_cocycle = cech_coboundary(cover, fixtures::random_cochain(cover, rng));
    return io::write_job(job);
}

// Four overlapping intervals, rank 2, constant coherency maps.
json connective_base() {
    auto fx = fixtures::connective_fixture(1, 0.05, 2, false, 3);
    io::Job job;
    job.exact = false;
    job.tolerance = 1e-9;
    job.rank = 2;
    job.cover = fx.bundle.cover;
    job.bundle = fx.bundle;
    job.base = fx.base;
    job.seeds = fx.seeds;
    const auto& lat = fx.base.lattice;
    job.paths.push_back({{0, 1, 2}, {fixtures::nearest_point(lat, 0.4), fixtures::nearest_point(lat, 0.5)}, 2});
    return io::write_job(job);
}

// Gerbe included as a rank-2 bundle, c = delta(u) for a 1-cochain u.
json gerbe_include_bundle() {
    const auto cover = fixtures::simplex_cover(4, false, {0});
    std::map<Simplex, ExactComplex> u;
    long long k = 1;
    for (const auto& p : cover.simplices_of_size(2)) {
        u[p] = ExactComplex(Rational(k), Rational(1));
        ++k;
    }
    ChartedGerbe<ExactComplex> g{cover, {}};
    for (const auto& t : cover.simplices_of_size(3)) {
        const ExactComplex c = u.at({t[1], t[2]}) * u.at({t[0], t[1]}) / u.at({t[0], t[2]});
        g.values[t][0] = c;
    }
    const auto oe = bundle_from_gerbe(g, 2);
    auto job = bundle_job(oe.base, true);
    job.lift = oe.lift;
    return io::write_job(job);
}

json broken_phi() {
    auto doc = nonmoi();
    // Change one nonzero entry of the first coherency map.
    for (auto& row : doc["phis"][0]["entries"])
        for (auto& block : row)
            for (auto& brow : block)
                for (auto& z : brow)
                    if (z["re"] != "0") {
                        z["re"] = z["re"] == "7" ? "8" : "7";
                        return doc;
                    }
    return doc;
}

json trivial_dims() {
    const auto cover = fixtures::simplex_cover(4, false);
    std::vector<DimMatrix> edges(3, DimMatrix::Identity(2, 2));
    return io::write_job(bundle_job(fixtures::canonical_bundle<ExactComplex>(cover, 2, edges), true));
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path dir = argc > 1 ? argv[1] : "docs/fixtures";
    fs::create_directories(dir);
    write(dir, "nonmoi.json", nonmoi());
    write(dir, "obstruction_nerve.json", obstruction_nerve());
    write(dir, "connective_base.json", connective_base());
    write(dir, "coboundary_nerve.json", coboundary_nerve());
    write(dir, "gerbe_include.json", gerbe_include_bundle());
    write(dir, "broken_phi.json", broken_phi());
    write(dir, "trivial_dims.json", trivial_dims());
    std::ofstream(dir / "malformed.json") << "{\"version\": \"bivect/1\", \"dims\": [\n";
    std::cout << (dir / "malformed.json").string() << "\n";
}
