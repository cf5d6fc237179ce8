#include <cmath>
#include <random>

#include "bmophi/errors.hpp"
#include "bmophi/grid.hpp"
#include "doctest.h"

using namespace bmo;

namespace {

CellMeasure random_measure(const GridDomain& d, std::mt19937_64& rng, double lo = 0.1, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> w(d.cell_count());
    for (auto& x : w) x = u(rng);
    return {d, w};
}

// Density 2x on [0, 1] in n cells: cell k carries (2k + 1) / n^2 with an affine profile.
CellMeasure density_2x(const GridDomain& d) {
    const double n = static_cast<double>(d.n());
    std::vector<double> w(d.n()), s(d.n());
    for (std::size_t k = 0; k < d.n(); ++k) {
        w[k] = (2.0 * k + 1.0) / (n * n);
        s[k] = 2.0 / (2.0 * k + 1.0);
    }
    return {d, w, s};
}

}  // namespace

TEST_CASE("domain geometry") {
    const GridDomain d(2, 8);
    CHECK(d.cell_count() == 64);
    CHECK(d.levels() == 3);
    CHECK(d.index(2, 3) == 19);
    CHECK_THROWS_AS(GridDomain(1, 6), ContractError);
    CHECK_THROWS_AS(GridDomain(3, 8), ContractError);
}

TEST_CASE("2x2 integral by hand") {
    const GridDomain d(2, 2);
    const GridFunction f(d, {1, 2, 3, 4});
    const CellMeasure m(d, {0.25, 0.25, 0.25, 0.25});
    CHECK(integrate(f, Rect::whole(d), m) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(Integrator(f, m).integral(Rect::whole(d)) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("prefix sums agree with a naive double loop") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    const GridDomain d(2, 8);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> v(d.cell_count());
        for (auto& x : v) x = z(rng);
        const GridFunction f(d, v);
        const auto m = random_measure(d, rng);
        const Integrator integ(f, m);
        for (std::size_t r0 = 0; r0 < 8; ++r0)
            for (std::size_t r1 = r0 + 1; r1 <= 8; ++r1)
                for (std::size_t c0 = 0; c0 < 8; c0 += 3)
                    for (std::size_t c1 = c0 + 1; c1 <= 8; c1 += 2) {
                        const Rect r = Rect::box(r0, r1, c0, c1);
                        double naive = 0.0, mu = 0.0;
                        for (std::size_t i = r0; i < r1; ++i)
                            for (std::size_t j = c0; j < c1; ++j) {
                                naive += v[d.index(i, j)] * m.weight(d.index(i, j));
                                mu += m.weight(d.index(i, j));
                            }
                        CHECK(std::abs(integ.integral(r) - naive) <= 1e-12);
                        CHECK(std::abs(integ.mass(r) - mu) <= 1e-12);
                    }
    }
}

TEST_CASE("real-box sums are bilinear in the corners") {
    const GridDomain d(2, 4);
    std::vector<double> v(16);
    for (std::size_t k = 0; k < 16; ++k) v[k] = static_cast<double>(k + 1);
    const PrefixTable t(d, v);
    // Half of cell (1, 2) plus a quarter of cell (1, 3).
    const double expect = 0.5 * v[d.index(1, 2)] + 0.25 * v[d.index(1, 3)];
    CHECK(t.sum(1.0, 1.5, 2.0, 3.5) == doctest::Approx(expect));
    CHECK(t.sum(0.0, 4.0, 0.0, 4.0) == doctest::Approx(136.0));
}

TEST_CASE("dyadic cubes tile every level") {
    std::mt19937_64 rng(9);
    for (int dim : {1, 2}) {
        const GridDomain d(dim, 16);
        const auto m = random_measure(d, rng);
        const auto cubes = dyadic_subcubes(d);
        for (int level = 0; level <= d.levels(); ++level) {
            double total = 0.0;
            std::size_t count = 0;
            for (const auto& q : cubes)
                if (q.level == level) {
                    const Rect r = q.rect(d);
                    for (std::size_t i = r.lo[0]; i < r.hi[0]; ++i)
                        for (std::size_t j = r.lo[1]; j < r.hi[1]; ++j) total += m.weight(d.index(i, j));
                    ++count;
                }
            CHECK(count == (std::size_t{1} << (dim * level)));
            CHECK(total == doctest::Approx(m.total()).epsilon(1e-12));
        }
    }
}

TEST_CASE("interval integrals are additive") {
    std::mt19937_64 rng(3);
    const GridDomain d(1, 32);
    const auto m = random_measure(d, rng);
    std::vector<double> v(32);
    std::normal_distribution<double> z;
    for (auto& x : v) x = z(rng);
    const GridFunction f(d, v);
    std::uniform_real_distribution<double> u(0.0, 32.0);
    for (int rep = 0; rep < 200; ++rep) {
        double a = u(rng), b = u(rng), c = u(rng);
        if (a > b) std::swap(a, b);
        if (c < a) std::swap(a, c);
        if (c > b) std::swap(b, c);
        if (!(a < c && c < b)) continue;
        const RealInterval whole{to_cell_point(a, 32), to_cell_point(b, 32)};
        const RealInterval left{to_cell_point(a, 32), to_cell_point(c, 32)};
        const RealInterval right{to_cell_point(c, 32), to_cell_point(b, 32)};
        CHECK(integrate(f, whole, m) == doctest::Approx(integrate(f, left, m) + integrate(f, right, m)).epsilon(1e-12));
    }
}

TEST_CASE("mu-dyadic split: uniform, density 2x, plateau") {
    const GridDomain d(1, 8);
    const auto uni = CellMeasure::uniform(d);
    CHECK(mu_dyadic_split(RealInterval::cells(0, 8), uni).position() / 8.0 == doctest::Approx(0.5));

    for (std::size_t n : {2u, 8u, 64u, 1024u}) {
        const GridDomain dn(1, n);
        const auto x = mu_dyadic_split(RealInterval::cells(0, n), density_2x(dn)).position() / static_cast<double>(n);
        CHECK(std::abs(x - 1.0 / std::sqrt(2.0)) <= 1e-12);
    }

    // Density 1 on [0, 0.4] and [0.6, 1], zero between: cells of width 0.2
    // on a domain of side 1.6, the interval [0, 1] being the first five cells.
    const GridDomain d5(1, 8, 1.6);
    const CellMeasure m5(d5, {0.2, 0.2, 0.0, 0.2, 0.2, 0.0, 0.0, 0.0});
    const auto x = mu_dyadic_split(RealInterval::cells(0, 5), m5);
    CHECK(x.position() * d5.cell_width() == doctest::Approx(0.6));
}

TEST_CASE("mu-dyadic tree: uniform depth 2 and density 2x depth 1") {
    const GridDomain d(1, 8);
    const auto t = MuDyadicTree::build(RealInterval::cells(0, 8), CellMeasure::uniform(d), 2);
    REQUIRE(t.size() == 7);
    CHECK(t.node(1).interval.hi.position() == doctest::Approx(4.0));
    CHECK(t.node(3).interval.hi.position() == doctest::Approx(2.0));
    CHECK(t.node(5).interval.hi.position() == doctest::Approx(6.0));

    const GridDomain d2(1, 1024);
    const auto t2 = MuDyadicTree::build(RealInterval::cells(0, 1024), density_2x(d2), 1);
    CHECK(std::abs(t2.node(1).interval.hi.position() / 1024.0 - 1.0 / std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("mu-dyadic tree leaves carry equal mass on random densities") {
    std::mt19937_64 rng(21);
    const GridDomain d(1, 64);
    for (int rep = 0; rep < 5; ++rep) {
        const auto m = random_measure(d, rng, 1e-3, 10.0);
        const auto t = MuDyadicTree::build(RealInterval::cells(0, 64), m, 10);
        std::size_t leaves = 0;
        for (const auto& node : t.nodes()) {
            if (!node.leaf()) {
                const double l = mass(m, t.node(node.left).interval);
                const double r = mass(m, t.node(node.right).interval);
                CHECK(std::abs(l - r) <= 1e-12 * node.mass);
                CHECK(t.node(node.left).interval.hi == t.node(node.right).interval.lo);
                continue;
            }
            ++leaves;
            CHECK(mass(m, node.interval) == doctest::Approx(m.total() / 1024.0).epsilon(1e-9));
        }
        CHECK(leaves == 1024);
    }
}

TEST_CASE("mu-dyadic errors") {
    const GridDomain d(1, 4);
    const CellMeasure m(d, {1.0, 0.0, 0.0, 1.0});
    CHECK_THROWS_AS(mu_dyadic_split(RealInterval::cells(1, 3), m), ContractError);
    CHECK_THROWS_AS(MuDyadicTree::build(RealInterval::cells(0, 4), m, 41), ContractError);
}
