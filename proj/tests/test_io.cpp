#include "support.hpp"

#include "bivect/io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>

using namespace bivect;
using bivect::io::json;
using bivect::testing::Rng;
using X = ExactComplex;
using A = ApproxComplex;

namespace {

std::string fixture(const std::string& name) { return std::string(BIVECT_FIXTURE_DIR) + "/" + name; }

json load(const std::string& name) {
    std::ifstream in(fixture(name));
    return json::parse(in);
}

json minimal_job() {
    return json{{"version", "bivect/1"},
                {"scalar_mode", "exact"},
                {"cover", {{"indices", {0, 1}}, {"simplices", json::array({{{"simplex", {0, 1}}, {"points", {0}}}})}}}};
}

}  // namespace

TEST_CASE("exact scalars") {
    const X z(Rational(3, 4), Rational(-2));
    CHECK(io::scalar_to_json(z) == json{{"im", "-2"}, {"re", "3/4"}});
    CHECK(io::scalar_to_json(X(Rational(1))) == json{{"im", "0"}, {"re", "1"}});
    // Every accepted spelling of the same value parses to it.
    for (const json& s : {json{{"re", "6/8"}, {"im", "-2"}}, json{{"re", "3/4"}, {"im", -2}},
                          json::array({"3/4", "-2/1"})}) {
        INFO(s.dump());
        auto doc = load("trivial_dims.json");
        doc["phis"][0]["entries"][0][0][0][0] = s;
        const auto job = io::parse_job(doc);
        const auto& e = std::get<ChartedBundle<X>>(job.bundle);
        const auto& first = e.phis.begin()->second.begin()->second;
        CHECK(first(0, 0).matrix()(0, 0) == z);
    }
    auto doc = load("trivial_dims.json");
    doc["phis"][0]["entries"][0][0][0][0] = "3/4";
    CHECK(std::get<ChartedBundle<X>>(io::parse_job(doc).bundle).phis.begin()->second.begin()->second(0, 0).matrix()(0, 0) ==
          X(Rational(3, 4)));
}

TEST_CASE("approximate scalars") {
    CHECK(io::scalar_to_json(A(0.5, -1.25)) == json::array({0.5, -1.25}));
}

TEST_CASE("fixtures round-trip byte for byte") {
    for (const char* name : {"nonmoi.json", "obstruction_nerve.json", "connective_base.json", "coboundary_nerve.json",
                             "gerbe_include.json", "broken_phi.json", "trivial_dims.json"}) {
        INFO(name);
        const json doc = load(name);
        const json again = io::write_job(io::parse_job(doc));
        CHECK(again.dump(2) == doc.dump(2));
    }
}

TEST_CASE("parsed fixtures carry the expected data") {
    const auto nonmoi = io::read_job(fixture("nonmoi.json"));
    CHECK(nonmoi.exact);
    CHECK(nonmoi.rank == 2);
    const auto& e = std::get<ChartedBundle<X>>(nonmoi.bundle);
    CHECK(e.dim(0, 1) == dim_from_rows({{1, 1}, {0, 1}}));
    CHECK(validate_bundle(e).valid);

    const auto conn = io::read_job(fixture("connective_base.json"));
    CHECK_FALSE(conn.exact);
    REQUIRE(conn.base);
    CHECK(check_base(*conn.base).empty());
    CHECK(conn.seeds.size() == 6);
    REQUIRE(conn.paths.size() == 1);
    CHECK(conn.paths[0].simplex == Simplex{0, 1, 2});

    const auto obstruction = io::read_job(fixture("obstruction_nerve.json"));
    CHECK(std::holds_alternative<std::monostate>(obstruction.bundle));
    CHECK(obstruction.sign_cocycle);
}

TEST_CASE("random bundles round-trip") {
    Rng rng(1);
    const auto cover = fixtures::simplex_cover(4, false, {0, 1, 2});
    for (int t = 0; t < 20; ++t) {
        io::Job job;
        job.cover = cover;
        job.rank = 2;
        std::vector<DimMatrix> edges;
        for (int k = 0; k < 3; ++k) edges.push_back(fixtures::random_weakly_invertible(rng, 2, 2));
        const auto e = fixtures::random_gauge(fixtures::canonical_bundle<X>(cover, job.rank, edges), rng, true);
        job.bundle = e;
        const json j = io::write_job(job);
        const auto back = io::parse_job(j);
        const auto& f = std::get<ChartedBundle<X>>(back.bundle);
        for (const auto& [triple, per_point] : e.phis)
            for (const auto& [x, phi] : per_point) REQUIRE(mor_residual(f.phi(triple, x), phi) == 0.0);
        REQUIRE(io::write_job(back) == j);
    }
}

TEST_CASE("schema errors") {
    auto rejects = [](json doc) { CHECK_THROWS_AS(io::parse_job(doc), io::SchemaError); };
    rejects(json::array());
    rejects(json{{"version", "bivect/0"}});
    {
        auto d = minimal_job();
        d["scalar_mode"] = "float";
        rejects(d);
    }
    {
        auto d = minimal_job();
        d["tolerance"] = -1.0;
        rejects(d);
    }
    {
        auto d = minimal_job();
        d.erase("cover");
        rejects(d);
    }
    {
        auto d = minimal_job();
        d["cover"]["simplices"][0]["simplex"] = {1, 0};
        rejects(d);
    }
    {
        auto d = minimal_job();
        d["dims"] = json::array({{{"pair", {0, 1}}, {"matrix", {{1}}}}});
        rejects(d);  // no rank
    }
    {
        auto d = minimal_job();
        d["rank"] = 1;
        d["dims"] = json::array({{{"pair", {0, 1}}, {"matrix", {{1, 0}}}}});
        rejects(d);
    }
    {
        auto d = load("nonmoi.json");
        d["phis"][0]["entries"][0][0][0][0] = json{{"re", "1"}, {"im", "0"}, {"extra", "0"}};
        rejects(d);
    }
    {
        auto d = load("nonmoi.json");
        d["phis"][0]["entries"][0][0][0][0] = json{{"re", "1/0"}, {"im", "0"}};
        rejects(d);
    }
    {
        auto d = load("nonmoi.json");
        d["phis"].push_back(d["phis"][0]);
        rejects(d);
    }
    {
        auto d = load("obstruction_nerve.json");
        d["sign_cocycle"][0]["sign"] = 0;
        rejects(d);
    }
    {
        auto d = load("connective_base.json");
        d["scalar_mode"] = "exact";
        rejects(d);
    }
    {
        auto d = load("connective_base.json");
        d["paths"][0]["refine"] = 0;
        rejects(d);
    }
    CHECK_THROWS_AS(io::read_job(fixture("malformed.json")), io::SchemaError);
    CHECK_THROWS_AS(io::read_job(fixture("does_not_exist.json")), io::SchemaError);
}
