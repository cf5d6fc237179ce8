#include <cmath>
#include <random>

#include "bmophi/errors.hpp"
#include "bmophi/oscillation.hpp"
#include "doctest.h"

using namespace bmo;

namespace {

GridFunction random_function(const GridDomain& d, std::mt19937_64& rng, int levels = 0) {
    std::normal_distribution<double> z;
    std::vector<double> v(d.cell_count());
    for (auto& x : v) x = levels > 0 ? std::round(levels * z(rng)) / levels : z(rng);
    return {d, v};
}

CellMeasure random_measure(const GridDomain& d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::vector<double> w(d.cell_count());
    for (auto& x : w) x = u(rng);
    return {d, w};
}

// Plain bisection on the defining inequality.
double lux_bisect(const WeightedSample& s, const Gauge& g, double c) {
    double lo = 0.0, hi = 1.0;
    while (s.gauge_average(g, c, hi) > 1.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (s.gauge_average(g, c, mid) > 1.0 ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("luxemburg closed forms") {
    std::mt19937_64 rng(1);
    const GridDomain d(1, 64);
    std::uniform_int_distribution<std::size_t> pick(0, 63);
    for (int rep = 0; rep < 200; ++rep) {
        const auto f = random_function(d, rng);
        const auto m = random_measure(d, rng);
        std::size_t a = pick(rng), b = pick(rng);
        if (a > b) std::swap(a, b);
        const auto s = sample(f, Rect::interval(a, b + 1), m);
        double l1 = 0.0, half = 0.0;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            l1 += s.weights[i] * std::abs(s.values[i]);
            half += s.weights[i] * std::sqrt(std::abs(s.values[i]));
        }
        l1 /= s.total;
        half /= s.total;
        CHECK(luxemburg(s, Gauge::identity()).lambda == doctest::Approx(l1).epsilon(1e-9));
        CHECK(luxemburg(s, Gauge::power(0.5)).lambda == doctest::Approx(half * half).epsilon(1e-9));
    }
}

TEST_CASE("luxemburg against a dense geometric scan") {
    std::mt19937_64 rng(2);
    const GridDomain d(1, 32);
    const auto g = Gauge::log1p(1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto s = sample(random_function(d, rng), Rect::interval(0, 32), random_measure(d, rng));
        const double lam = luxemburg(s, g).lambda;
        // First scan point satisfying the inequality, 10^4 points over [lam/2, 2 lam].
        double found = 0.0;
        for (int k = 0; k <= 10000; ++k) {
            const double t = lam * std::pow(4.0, k / 10000.0) / 2.0;
            if (s.gauge_average(g, 0.0, t) <= 1.0) {
                found = t;
                break;
            }
        }
        CHECK(found == doctest::Approx(lam).epsilon(1.5e-4));
        CHECK(s.gauge_average(g, 0.0, lam * (1.0 + 1e-10)) <= 1.0 + 1e-12);
        CHECK(s.gauge_average(g, 0.0, lam * (1.0 - 1e-8)) > 1.0);
    }
}

TEST_CASE("zero function has zero norm; empty region is an error") {
    const GridDomain d(1, 4);
    const GridFunction f(d, {0, 0, 0, 0});
    CHECK(luxemburg_norm(f, Rect::interval(0, 4), Gauge::power(0.5), CellMeasure::uniform(d)) == 0.0);
    const CellMeasure zero(d, {0, 0, 1, 1});
    CHECK_THROWS_AS(sample(f, Rect::interval(0, 2), zero), ContractError);
}

TEST_CASE("L1 oscillation of (0,0,0,1)") {
    const GridDomain d(1, 4);
    const auto s = sample(GridFunction(d, {0, 0, 0, 1}), Rect::interval(0, 4), CellMeasure::uniform(d));
    const auto inf = osc_l1(s, Centering::InfC);
    CHECK(inf.value == doctest::Approx(0.25));
    CHECK(inf.center == 0.0);
    const auto mean = osc_l1(s, Centering::AtMean);
    CHECK(mean.value == doctest::Approx(0.375));
    CHECK(mean.center == doctest::Approx(0.25));
    const auto c = osc_l1(WeightedSample::from_pairs({{3.0, 1.0}, {3.0, 2.0}}), Centering::InfC);
    CHECK(c.value == 0.0);
    CHECK(c.center == 3.0);
}

TEST_CASE("weighted median matches a dense c-scan") {
    std::mt19937_64 rng(4);
    const GridDomain d(1, 16);
    for (int rep = 0; rep < 50; ++rep) {
        const auto s = sample(random_function(d, rng), Rect::interval(0, 16), random_measure(d, rng));
        const double v = osc_l1(s, Centering::InfC).value;
        double best = 1e300;
        auto cost = [&](double c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < s.values.size(); ++i) acc += s.weights[i] * std::abs(s.values[i] - c);
            return acc / s.total;
        };
        for (double c : s.values) best = std::min(best, cost(c));
        for (int k = 0; k <= 20000; ++k) best = std::min(best, cost(s.min() + (s.max() - s.min()) * k / 20000.0));
        CHECK(std::abs(v - best) <= 1e-9);
        const double at_mean = osc_l1(s, Centering::AtMean).value;
        CHECK(v <= at_mean + 1e-12);
        CHECK(at_mean <= 2.0 * v + 1e-12);
    }
}

TEST_CASE("gauge infimum: constant, identity reduction, double-scan oracle") {
    const auto konst = osc_gauge_infc(WeightedSample::from_pairs({{2.0, 1.0}}), Gauge::power(0.5));
    CHECK(konst.value == 0.0);
    CHECK(konst.center == 2.0);

    std::mt19937_64 rng(6);
    const GridDomain d(1, 8);
    for (int rep = 0; rep < 30; ++rep) {
        const auto s = sample(random_function(d, rng), Rect::interval(0, 8), random_measure(d, rng));
        CHECK(osc_gauge_infc(s, Gauge::identity()).value ==
              doctest::Approx(osc_l1(s, Centering::InfC).value).epsilon(1e-8));

        const auto g = Gauge::power(0.5);
        const auto got = osc_gauge_infc(s, g);
        double best = 1e300;
        for (int k = 0; k <= 4000; ++k) best = std::min(best, lux_bisect(s, g, s.min() + (s.max() - s.min()) * k / 4000.0));
        for (double c : s.values) best = std::min(best, lux_bisect(s, g, c));
        CHECK(got.value <= best * (1.0 + 1e-9));
        CHECK(got.value == doctest::Approx(best).epsilon(1e-5));
    }
}

TEST_CASE("norm of the left-half indicator") {
    const GridDomain d(1, 8);
    const GridFunction f(d, {1, 1, 1, 1, 0, 0, 0, 0});
    const auto m = CellMeasure::uniform(d);
    const auto fam = RegionFamily::dyadic(d);
    for (Mode mode : {Mode::MeanCentered, Mode::InfC}) {
        const auto rep = norm_sup(f, fam, nullptr, m, mode);
        CHECK(rep.value == doctest::Approx(0.5));
        CHECK(std::get<Rect>(rep.witness) == Rect::interval(0, 8));
    }
    const GridFunction c(d, std::vector<double>(8, 3.0));
    const auto g = Gauge::power(0.5);
    for (Mode mode : {Mode::MeanCentered, Mode::InfC, Mode::GaugeInfC, Mode::CzCenter, Mode::KPhi})
        CHECK(norm_sup(c, fam, &g, m, mode).value == 0.0);
}

TEST_CASE("pruning never changes the supremum") {
    std::mt19937_64 rng(8);
    const auto g = Gauge::power(0.5);
    for (int dim : {1, 2}) {
        const GridDomain d(dim, dim == 1 ? 64 : 8);
        for (int rep = 0; rep < 5; ++rep) {
            const auto f = random_function(d, rng, 4);
            const auto m = random_measure(d, rng);
            const auto fam = RegionFamily::all_cubes(d);
            const auto a = norm_sup(f, fam, &g, m, Mode::GaugeInfC, {true});
            const auto b = norm_sup(f, fam, &g, m, Mode::GaugeInfC, {false});
            CHECK(a.value == b.value);
            CHECK(a.witness == b.witness);
        }
    }
}

TEST_CASE("k_phi: identity coincidence and lack of homogeneity") {
    std::mt19937_64 rng(10);
    const GridDomain d(2, 8);
    const auto f = random_function(d, rng);
    const auto m = CellMeasure::uniform(d);
    const auto base = Rect::whole(d);
    CHECK(k_phi(f, base, Gauge::identity(), m) ==
          doctest::Approx(norm_sup(f, RegionFamily::all_cubes(d), nullptr, m, Mode::MeanCentered).value).epsilon(1e-12));

    const GridDomain d1(1, 2);
    const GridFunction two(d1, {0.0, 1.0});
    const GridFunction twice(d1, {0.0, 2.0});
    const auto u = CellMeasure::uniform(d1);
    const auto g = Gauge::power(0.5);
    const double k1 = k_phi(two, Rect::whole(d1), g, u);
    const double k2 = k_phi(twice, Rect::whole(d1), g, u);
    CHECK(k1 == doctest::Approx(std::sqrt(0.5)));
    CHECK(k2 != doctest::Approx(2.0 * k1));
    const auto fam = RegionFamily::all_cubes(d1);
    CHECK(norm_sup(twice, fam, &g, u, Mode::GaugeInfC).value ==
          doctest::Approx(2.0 * norm_sup(two, fam, &g, u, Mode::GaugeInfC).value).epsilon(1e-9));
}

TEST_CASE("homogeneity, translation invariance, Jensen, family monotonicity") {
    std::mt19937_64 rng(12);
    const std::vector<Gauge> gauges{Gauge::power(0.5), Gauge::log1p(1.0), Gauge::polygonal({{0, 0}, {1, 1}, {3, 2}}, 0.25)};
    const GridDomain d(2, 8);
    for (int rep = 0; rep < 4; ++rep) {
        const auto f = random_function(d, rng);
        const auto m = random_measure(d, rng);
        std::vector<double> scaled(f.values()), shifted(f.values());
        for (auto& x : scaled) x *= 3.5;
        for (auto& x : shifted) x += 7.25;
        const GridFunction fs(d, scaled), ft(d, shifted);
        const auto cubes = RegionFamily::all_cubes(d);
        for (const auto& g : gauges) {
            for (Mode mode : {Mode::InfC, Mode::GaugeInfC, Mode::MeanCentered}) {
                const Gauge* gp = mode == Mode::GaugeInfC ? &g : nullptr;
                const double base = norm_sup(f, cubes, gp, m, mode).value;
                CHECK(norm_sup(ft, cubes, gp, m, mode).value == doctest::Approx(base).epsilon(1e-9));
                if (mode != Mode::MeanCentered)
                    CHECK(norm_sup(fs, cubes, gp, m, mode).value == doctest::Approx(3.5 * base).epsilon(1e-9));
            }
            // Jensen per region.
            const double k = 1.0 / g.inverse(1.0);
            for (const auto& r : cubes.regions()) {
                const auto s = sample(f, std::get<Rect>(r), m);
                double l1 = 0.0;
                for (std::size_t i = 0; i < s.values.size(); ++i) l1 += s.weights[i] * std::abs(s.values[i]);
                CHECK(luxemburg(s, g).lambda <= k * l1 / s.total * (1.0 + 1e-9));
            }
            const double dy = norm_sup(f, RegionFamily::dyadic(d), &g, m, Mode::GaugeInfC).value;
            const double cu = norm_sup(f, cubes, &g, m, Mode::GaugeInfC).value;
            const double re = norm_sup(f, RegionFamily::all_rects(d), &g, m, Mode::GaugeInfC).value;
            CHECK(dy <= cu);
            CHECK(cu <= re);
        }
    }
}

TEST_CASE("family sizes and modes") {
    const GridDomain d(2, 4);
    CHECK(RegionFamily::dyadic(d).size() == 21);
    CHECK(RegionFamily::all_cubes(d).size() == 16 + 9 + 4 + 1);
    CHECK(RegionFamily::all_rects(d).size() == 100);
    CHECK(mode_from_string(to_string(Mode::CzCenter)) == Mode::CzCenter);
    CHECK_THROWS_AS(mode_from_string("nope"), ContractError);
    const GridDomain d1(1, 4);
    const GridFunction f(d1, {0, 1, 0, 1});
    CHECK_THROWS_AS(norm_sup(f, RegionFamily::dyadic(d1), nullptr, CellMeasure::uniform(d1), Mode::GaugeInfC),
                    ContractError);
}
