#include <algorithm>
#include <cmath>
#include <random>

#include "bmophi/verify.hpp"
#include "doctest.h"

using namespace bmo;

TEST_CASE("report row semantics") {
    TheoremReport rep;
    CHECK(rep.leq("a", "le", 1.0, 1.0 + 1e-12).pass);
    CHECK(rep.leq("a", "le-within-tol", 1.0 + 1e-9, 1.0, 1e-8).pass);
    CHECK_FALSE(rep.leq("a", "le-outside-tol", 1.0 + 1e-6, 1.0, 1e-8).pass);
    CHECK_FALSE(rep.less("a", "lt", 1.0, 1.0).pass);
    CHECK(rep.equal("a", "eq", 5.0, 5.0, 0.0).pass);
    CHECK_FALSE(rep.holds("a", "flag", false).pass);
    auto& d = rep.diagnostic("a", "diag", 10.0, 1.0);
    CHECK_FALSE(d.asserted);
    CHECK(rep.asserted_count() == 6);
    CHECK(rep.violations() == 3);
    CHECK_FALSE(rep.passed());
    CHECK(rep.passed("le"));
    CHECK_FALSE(rep.passed("lt"));

    TheoremReport ok;
    ok.diagnostic("x", "diag", 10.0, 1.0);
    CHECK(ok.passed());
}

TEST_CASE("report serialization is ordered by instance") {
    TheoremReport rep;
    rep.suite = "s";
    rep.leq("b", "one", 1, 2);
    rep.leq("a", "two", 1, 2);
    rep.leq("b", "three", 1, 2);
    rep.canonicalize();
    CHECK(rep.rows[0].instance == "a");
    CHECK(rep.rows[1].check == "one");
    CHECK(rep.rows[2].check == "three");
    const auto csv = rep.to_csv();
    CHECK(csv.rfind("suite,instance,check,asserted,lhs,rhs,constant,ratio,slack,pass,note\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("constants for the identity gauge") {
    const auto id = Gauge::identity();
    CHECK(main_constant(id, 1) == doctest::Approx(18.0));
    CHECK(main_constant(id, 2) == doctest::Approx(26.0));
    CHECK(nondoubling_constant(id) == doctest::Approx(18.0));
    CHECK(besicovitch_constant(id, 3.0) == doctest::Approx(26.0));
    const auto half = Gauge::power(0.5);
    CHECK(main_constant(half, 1) == doctest::Approx(2.0 * 16.0 + 10.0 * 10.0));
    CHECK(main_constant(half, 2) == doctest::Approx(2.0 * 16.0 + 18.0 * 18.0));
}

TEST_CASE("corpora are reproducible") {
    CorpusSpec spec;
    spec.dim = 2;
    spec.cells = 8;
    spec.count = 5;
    spec.measures = {MeasureKind::Random, MeasureKind::NonDoubling};
    const auto a = make_corpus(spec), b = make_corpus(spec);
    REQUIRE(a.size() == 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].f.values() == b[i].f.values());
        CHECK(a[i].m.weights() == b[i].m.weights());
    }
    spec.seed = 2;
    CHECK(make_corpus(spec)[0].f.values() != a[0].f.values());
}

TEST_CASE("measure generators") {
    for (int dim : {1, 2}) {
        const GridDomain d(dim, dim == 1 ? 64 : 8);
        const auto m = generate_measure(MeasureKind::NonDoubling, d, 3, 1e6);
        const auto [lo, hi] = std::minmax_element(m.weights().begin(), m.weights().end());
        CHECK(*hi / *lo == doctest::Approx(1e6).epsilon(1e-9));
        // Neighbours differ by a large factor.
        for (std::size_t c = 0; c + 1 < d.n(); ++c) {
            const double a = m.weight(c), b = m.weight(c + 1);
            CHECK(std::max(a, b) / std::min(a, b) > 10.0);
        }
        const auto r = generate_measure(MeasureKind::Random, d, 4, 100.0);
        const auto [rlo, rhi] = std::minmax_element(r.weights().begin(), r.weights().end());
        CHECK(*rhi / *rlo <= 100.0 * (1.0 + 1e-12));
    }
    const GridDomain d(1, 4);
    const auto m = generate_measure(MeasureKind::Density2x, d, 0);
    CHECK(m.total() == doctest::Approx(1.0));
    CHECK(m.weight(0) == doctest::Approx(1.0 / 16.0));
    CHECK(m.weight(3) == doctest::Approx(7.0 / 16.0));
}

TEST_CASE("brute-force CZ agrees with the stopping time on a hand example") {
    const GridDomain d(1, 8);
    const GridFunction g(d, {0, 0, 0, 8, 0, 0, 0, 0});
    const auto m = CellMeasure::uniform(d);
    // Averages: [0,8) 1, [0,4) 2, [2,4) 4, [3,4) 8.
    const auto want = std::vector<Rect>{Rect::interval(2, 4)};
    CHECK(brute_force_cz(g, m, 3.0) == want);
    TheoremReport rep;
    check_cz(rep, "hand", g, m, 3.0, cz_dyadic(g, {}, 3.0, m), true, true);
    CHECK(rep.passed());
    CHECK(rep.passed("cz-brute-force"));
}

TEST_CASE("oscillation oracles agree with the solvers") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    const auto id = named_probe("identity", 100.0, 1000);
    const auto g = Gauge::log1p(1.0);
    for (int k = 0; k < 10; ++k) {
        std::vector<std::pair<double, double>> vw;
        for (int i = 0; i < 9; ++i) vw.emplace_back(z(rng), 0.5 + std::abs(z(rng)));
        const auto s = WeightedSample::from_pairs(vw);
        // With psi = t the Luxemburg average is the L1 average.
        CHECK(probe_oscillation(s, id) == doctest::Approx(osc_l1(s, Centering::InfC).value).epsilon(1e-8));
        const double scan = gauge_infc_scan(s, g);
        const double solved = osc_gauge_infc(s, g).value;
        CHECK(solved <= scan * (1.0 + 1e-9));
        CHECK(solved == doctest::Approx(scan).epsilon(1e-5));
    }
}

TEST_CASE("small suites pass") {
    CHECK(verify_vitali(20, 40, 1).passed());
    CHECK(verify_mu_grid(5, 1).passed());
    CHECK(verify_solvers(50, 6, 1).passed());
    CorpusSpec spec;
    spec.cells = 32;
    spec.count = 4;
    CHECK(verify_thm_main(make_corpus(spec), Gauge::power(0.5)).passed());
    CHECK(verify_decompositions(make_corpus(spec), Gauge::identity(), {2, 4}).passed());
}

TEST_CASE("a violated bound is reported, not hidden") {
    CorpusSpec spec;
    spec.dim = 2;
    spec.cells = 4;
    spec.count = 2;
    spec.measures = {MeasureKind::Random};
    // A ceiling far below the observed ratio has to fail.
    const auto rep = verify_thm_rect(make_corpus(spec), Gauge::identity(), 1e-3);
    CHECK_FALSE(rep.passed("upper-rect-ceiling"));
    CHECK(rep.passed("lower-per-region"));
}
