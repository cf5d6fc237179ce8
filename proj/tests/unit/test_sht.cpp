#include <cmath>
#include <random>

#include "bmophi/errors.hpp"
#include "bmophi/sht.hpp"
#include "doctest.h"

using namespace bmo;

namespace {

FiniteSHT line(std::size_t n, double power = 1.0, double kappa = 1.0, std::vector<double> w = {}) {
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::pow(std::abs(double(i) - double(j)), power);
    if (w.empty()) w.assign(n, 1.0);
    return {n, d, kappa, w};
}

FiniteSHT random_plane(std::size_t n, std::mt19937_64& rng, double power) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = u(rng);
        y[i] = u(rng);
        w[i] = 0.1 + u(rng);
    }
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::pow(std::hypot(x[i] - x[j], y[i] - y[j]), power);
    return {n, d, std::pow(2.0, power - 1.0), w};
}

}  // namespace

TEST_CASE("validation: minimal kappa and structural rejection") {
    const auto v = validate_sht(line(6));
    CHECK(v.accepted);
    CHECK(v.kappa_min == doctest::Approx(1.0));
    CHECK(v.doubling_constant >= 1.0);
    CHECK(v.doubling_order == doctest::Approx(std::log2(v.doubling_constant)));

    const auto sq = validate_sht(line(3, 2.0, 2.0));
    CHECK(sq.kappa_min == doctest::Approx(2.0));
    CHECK(sq.accepted);
    CHECK_FALSE(validate_sht(line(3, 2.0, 1.5)).accepted);

    auto d = line(4).dist();
    d[1] += 0.5;
    const auto bad = validate_sht(FiniteSHT(4, d, 1.0, {1, 1, 1, 1}));
    CHECK_FALSE(bad.structural);
    CHECK(bad.failures.front() == "asymmetric distance matrix");
    CHECK_THROWS_AS(FiniteSHT(3, {0, 1}, 1.0, {1, 1, 1}), ContractError);
}

TEST_CASE("balls are open and radii enumerate every distinct ball") {
    const auto s = line(5);
    CHECK(s.members({2, 1.0}) == std::vector<std::size_t>{2});
    CHECK(s.members({2, 1.5}) == std::vector<std::size_t>{1, 2, 3});
    const auto r = s.radii(0);
    REQUIRE(r.size() == 5);
    CHECK(r.front() == 0.5);
    CHECK(r.back() == 8.0);
    CHECK(ball_family(s).size() == 5 + 4 + 3 + 4 + 5);
}

TEST_CASE("Vitali: disjoint family, nested family, factor 5") {
    const auto s = line(20);
    const std::vector<Ball> apart{{1, 1.5}, {5, 1.5}, {10, 1.5}};
    CHECK(vitali_select(apart, s).selected.size() == 3);

    const std::vector<Ball> nested{{10, 1.5}, {10, 3.5}, {10, 6.5}};
    const auto sel = vitali_select(nested, s);
    CHECK(sel.selected == std::vector<std::size_t>{2});
    CHECK(sel.dilation == 5.0);
    CHECK(sel.covered);
    CHECK(vitali_factor(2.0) == 18.0);
}

TEST_CASE("Vitali on random families") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 60; ++rep) {
        const auto s = random_plane(40 + rep % 20, rng, rep % 3 == 0 ? 2.0 : 1.0);
        const auto all = ball_family(s);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        std::vector<Ball> fam;
        for (int k = 0; k < 30; ++k) fam.push_back(all[pick(rng)]);
        const auto sel = vitali_select(fam, s);
        CHECK(sel.disjoint);
        CHECK(sel.covered);
        for (std::size_t i = 0; i < sel.selected.size(); ++i)
            for (std::size_t j = i + 1; j < sel.selected.size(); ++j)
                for (std::size_t y : s.members(fam[sel.selected[i]])) CHECK_FALSE(s.contains(fam[sel.selected[j]], y));
    }
}

TEST_CASE("radius lemma") {
    // Single scale: every P contains all of the dilated ball.
    const FiniteSHT tri(3, {0, 1, 1, 1, 0, 1, 1, 1, 0}, 1.0, {1, 1, 1});
    const auto single = check_radius_lemma(tri, {0, 0.5}, 0.1);
    CHECK(single.L == 1.0);
    CHECK(single.star_contained);

    const auto lattice = line(41);
    const Ball B{20, 10.5};
    const auto rep = check_radius_lemma(lattice, B, 0.9 * (2.0 - 1.0) / 5.0);
    CHECK(std::isfinite(rep.L));
    CHECK(rep.L > 1.0);
    CHECK(rep.star_contained);
    CHECK(rep.eps_threshold == doctest::Approx(0.2));

    std::vector<double> heavy(41, 1e-6);
    heavy[20] = 1.0;
    const auto adv = check_radius_lemma(line(41, 1.0, 1.0, heavy), B, 0.1);
    CHECK(std::isfinite(adv.L));
    CHECK(adv.star_contained);
}

TEST_CASE("bmo over balls: constant, lattice cross-check, Jensen side") {
    const auto s = line(16);
    CHECK(bmo_sht(std::vector<double>(16, 2.0), s, nullptr, Mode::InfC).value == 0.0);

    std::mt19937_64 rng(37);
    std::normal_distribution<double> z;
    std::vector<double> f(16);
    for (auto& x : f) x = z(rng);
    const auto rep = bmo_sht(f, s, nullptr, Mode::InfC);

    // Every ball on the lattice is a run of consecutive points.
    const GridDomain d(1, 16);
    const GridFunction gf(d, f);
    const auto m = CellMeasure::uniform(d);
    std::vector<Region> intervals;
    for (const auto& b : ball_family(s)) {
        const auto pts = s.members(b);
        intervals.emplace_back(Rect::interval(pts.front(), pts.back() + 1));
    }
    const auto grid = norm_sup(intervals, grid_source(gf, m), nullptr, Mode::InfC);
    CHECK(rep.value == doctest::Approx(grid.value).epsilon(1e-12));

    const auto g = Gauge::power(0.5);
    for (int k = 0; k < 10; ++k) {
        const auto sp = random_plane(30, rng, 1.0);
        std::vector<double> v(30);
        for (auto& x : v) x = z(rng);
        const double lower = g.inverse(1.0) * bmo_sht(v, sp, &g, Mode::GaugeInfC).value;
        CHECK(lower <= bmo_sht(v, sp, nullptr, Mode::InfC).value * (1.0 + 1e-9));
        std::vector<double> w(v);
        for (auto& x : w) x = -2.0 * x + 5.0;
        CHECK(bmo_sht(w, sp, &g, Mode::GaugeInfC).value ==
              doctest::Approx(2.0 * bmo_sht(v, sp, &g, Mode::GaugeInfC).value).epsilon(1e-9));
    }
}

TEST_CASE("reiteration fit") {
    const auto s = line(12);
    const auto v = validate_sht(s);
    const auto fit = reiteration_fit(s, v.doubling_order);
    CHECK(fit.pairs > 0);
    CHECK(std::isfinite(fit.constant));
    CHECK(fit.constant > 0.0);
}
