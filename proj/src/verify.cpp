#include "bmophi/verify.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "bmophi/errors.hpp"

namespace bmo {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string padded(std::size_t k, int width = 3) {
    std::ostringstream os;
    os << std::setw(width) << std::setfill('0') << k;
    return os.str();
}

// Mixes a base seed with an index so neighbouring instances are unrelated.
std::uint64_t derive(std::uint64_t seed, std::uint64_t k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double cell_center(const GridDomain& d, std::size_t i) {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(d.n());
}

}  // namespace

// ---------------------------------------------------------------------------
// generators

std::string to_string(Generator g) {
    switch (g) {
        case Generator::StepDyadic: return "stepdyadic";
        case Generator::LogCusp: return "logcusp";
        case Generator::RandomBounded: return "random";
        case Generator::CheckerRect: return "checkerrect";
    }
    return "?";
}

Generator generator_from_string(const std::string& s) {
    if (s == "stepdyadic") return Generator::StepDyadic;
    if (s == "logcusp") return Generator::LogCusp;
    if (s == "random" || s == "randombounded") return Generator::RandomBounded;
    if (s == "checkerrect") return Generator::CheckerRect;
    throw ContractError("unknown generator '" + s + "'");
}

GridFunction generate(Generator gen, const GridDomain& d, std::uint64_t seed, const GeneratorParams& p) {
    Rng rng(seed);
    const std::size_t n = d.n();
    std::vector<double> v(d.cell_count(), 0.0);
    switch (gen) {
        case Generator::StepDyadic: {
            std::normal_distribution<double> z;
            for (const auto& q : dyadic_subcubes(d)) {
                if (q.level >= d.levels()) continue;
                const Rect r = q.rect(d);
                const std::size_t h0 = (r.lo[0] + r.hi[0]) / 2, h1 = (r.lo[1] + r.hi[1]) / 2;
                const double a = p.amplitude * z(rng);
                const double b = d.dim() == 2 ? p.amplitude * z(rng) : 0.0;
                const double c = d.dim() == 2 ? p.amplitude * z(rng) : 0.0;
                for (std::size_t i = r.lo[0]; i < r.hi[0]; ++i)
                    for (std::size_t j = r.lo[1]; j < r.hi[1]; ++j) {
                        const double si = i < h0 ? 1.0 : -1.0;
                        const double sj = j < h1 ? 1.0 : -1.0;
                        v[d.index(i, j)] += a * si + b * sj + c * si * sj;
                    }
            }
            break;
        }
        case Generator::LogCusp:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < (d.dim() == 1 ? 1 : n); ++j) {
                    const double dx = cell_center(d, i) - p.x0;
                    const double dy = d.dim() == 1 ? 0.0 : cell_center(d, j) - p.x1;
                    v[d.index(i, j)] = p.amplitude * -std::log(std::hypot(dx, dy));
                }
            break;
        case Generator::RandomBounded:
            for (auto& x : v) x = uniform(rng, -p.amplitude, p.amplitude);
            break;
        case Generator::CheckerRect: {
            std::normal_distribution<double> z;
            const std::size_t strips = 4 + pick(rng, 0, 4);
            for (std::size_t k = 0; k < strips; ++k) {
                // Long along one axis, at most n/8 wide along the other.
                const std::size_t len = std::max<std::size_t>(1, n / 2 + pick(rng, 0, n / 2));
                const std::size_t wid = std::max<std::size_t>(1, pick(rng, 1, std::max<std::size_t>(1, n / 8)));
                const bool tall = d.dim() == 2 && pick(rng, 0, 1) == 1;
                const std::size_t e0 = tall ? len : wid, e1 = tall ? wid : len;
                const std::size_t a0 = pick(rng, 0, n - std::min(n, e0));
                const std::size_t a1 = d.dim() == 1 ? 0 : pick(rng, 0, n - std::min(n, e1));
                const double h = 2.0 * p.amplitude * z(rng);
                for (std::size_t i = a0; i < std::min(n, a0 + e0); ++i)
                    for (std::size_t j = a1; j < (d.dim() == 1 ? 1 : std::min(n, a1 + e1)); ++j)
                        v[d.index(i, j)] += h;
            }
            break;
        }
    }
    return {d, std::move(v)};
}

std::string to_string(MeasureKind k) {
    switch (k) {
        case MeasureKind::Uniform: return "uniform";
        case MeasureKind::Random: return "random";
        case MeasureKind::NonDoubling: return "nondoubling";
        case MeasureKind::Density2x: return "density2x";
    }
    return "?";
}

MeasureKind measure_kind_from_string(const std::string& s) {
    if (s == "uniform") return MeasureKind::Uniform;
    if (s == "random") return MeasureKind::Random;
    if (s == "nondoubling") return MeasureKind::NonDoubling;
    if (s == "density2x") return MeasureKind::Density2x;
    throw ContractError("unknown measure kind '" + s + "'");
}

CellMeasure generate_measure(MeasureKind k, const GridDomain& d, std::uint64_t seed, double range) {
    if (!(range >= 1.0)) throw ContractError("weight range must be at least 1");
    Rng rng(seed);
    const std::size_t cells = d.cell_count();
    switch (k) {
        case MeasureKind::Uniform: return CellMeasure::uniform(d);
        case MeasureKind::Random: {
            std::vector<double> w(cells);
            for (auto& x : w) x = std::pow(range, uniform(rng, 0.0, 1.0));
            return {d, std::move(w)};
        }
        case MeasureKind::NonDoubling: {
            // Alternate light and heavy cells so neighbours differ by a large factor.
            std::vector<double> u(cells);
            for (std::size_t i = 0; i < cells; ++i) {
                const std::size_t parity = d.dim() == 1 ? i : i / d.n() + i % d.n();
                u[i] = parity % 2 ? uniform(rng, 0.7, 1.0) : uniform(rng, 0.0, 0.3);
            }
            *std::min_element(u.begin(), u.end()) = 0.0;
            *std::max_element(u.begin(), u.end()) = 1.0;
            std::vector<double> w(cells);
            for (std::size_t i = 0; i < cells; ++i) w[i] = u[i] == 0.0 ? 1.0 : u[i] == 1.0 ? range : std::pow(range, u[i]);
            return {d, std::move(w)};
        }
        case MeasureKind::Density2x: {
            if (d.dim() != 1) throw ContractError("density2x is a 1-D measure");
            const double n = static_cast<double>(d.n());
            std::vector<double> w(d.n()), s(d.n());
            for (std::size_t i = 0; i < d.n(); ++i) {
                const double k2 = static_cast<double>(i);
                w[i] = (2.0 * k2 + 1.0) / (n * n) * d.side();
                s[i] = 1.0 / (k2 + 0.5);
            }
            return {d, std::move(w), std::move(s)};
        }
    }
    throw ContractError("unknown measure kind");
}

std::vector<Instance> make_corpus(const CorpusSpec& spec) {
    std::vector<Generator> gens = spec.generators;
    if (gens.empty()) {
        gens = {Generator::StepDyadic, Generator::LogCusp, Generator::RandomBounded};
        if (spec.dim == 2) gens.push_back(Generator::CheckerRect);
    }
    std::vector<MeasureKind> measures = spec.measures;
    if (measures.empty()) measures = {MeasureKind::Uniform};
    const GridDomain d(spec.dim, spec.cells);
    std::vector<Instance> out;
    for (std::size_t k = 0; k < spec.count; ++k) {
        Instance in;
        in.generator = gens[k % gens.size()];
        in.measure = measures[(k / gens.size()) % measures.size()];
        in.seed = derive(spec.seed, k);
        Rng rng(in.seed);
        GeneratorParams p;
        p.amplitude = std::pow(10.0, uniform(rng, -1.0, 1.0));
        if (in.generator == Generator::LogCusp) {
            p.x0 = uniform(rng, 0.1, 0.9);
            p.x1 = uniform(rng, 0.1, 0.9);
        }
        in.f = generate(in.generator, d, rng(), p);
        in.m = generate_measure(in.measure, d, rng(), spec.range);
        in.name = "d" + std::to_string(spec.dim) + "-n" + std::to_string(spec.cells) + "-" + padded(k) + "-" +
                  to_string(in.generator) + "-" + to_string(in.measure);
        out.push_back(std::move(in));
    }
    return out;
}

FiniteSHT random_plane_sht(std::size_t n, double p, std::uint64_t seed, double weight_range) {
    if (n == 0) throw ContractError("space needs at least one point");
    if (!(p >= 1.0)) throw ContractError("distance exponent must be at least 1");
    Rng rng(seed);
    std::vector<std::array<double, 2>> pts(n);
    for (auto& x : pts) x = {uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double e = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
            dist[i * n + j] = dist[j * n + i] = std::pow(e, p);
        }
    std::vector<double> w(n);
    for (auto& x : w) x = std::pow(weight_range, uniform(rng, 0.0, 1.0));
    return {n, std::move(dist), std::exp2(p - 1.0), std::move(w)};
}

std::vector<SpaceInstance> make_sht_corpus(std::size_t count, std::size_t max_points, std::uint64_t seed) {
    std::vector<SpaceInstance> out;
    for (std::size_t k = 0; k < count; ++k) {
        Rng rng(derive(seed, k));
        const std::size_t n = pick(rng, std::min<std::size_t>(8, max_points), max_points);
        const double p = uniform(rng, 1.0, 2.0);
        SpaceInstance in;
        in.space = random_plane_sht(n, p, rng());
        in.f.resize(n);
        const bool cusp = k % 2 == 1;
        const std::size_t anchor = pick(rng, 0, n - 1);
        for (std::size_t y = 0; y < n; ++y)
            in.f[y] = cusp ? -std::log(in.space.d(anchor, y) + 1e-3) : uniform(rng, -1.0, 1.0);
        in.name = "sht-" + padded(k) + "-n" + std::to_string(n) + (cusp ? "-cusp" : "-random");
        out.push_back(std::move(in));
    }
    return out;
}

// ---------------------------------------------------------------------------
// constants

double main_constant(const Gauge& g, int dim) {
    return 2.0 * g.inverse(4.0) + g.inverse(2.0 + std::ldexp(1.0, dim + 2));
}

double nondoubling_constant(const Gauge& g) { return 2.0 * g.inverse(4.0) + g.inverse(10.0); }

double besicovitch_constant(const Gauge& g, double B) { return 2.0 * g.inverse(2.0 * B) + g.inverse(4.0 * B + 2.0); }

double general_threshold(const EventuallyConcaveGauge& phi, int dim) {
    constexpr double L = 4.0;
    const double t0 = phi.t0();
    const double center = std::max(t0, phi.inverse(phi(2.0 * t0) + std::ldexp(L, dim + 1) + 4.0));
    return 2.0 * phi.inverse(L) + center;
}

// ---------------------------------------------------------------------------
// reports

ReportRow& TheoremReport::leq(const std::string& instance, const std::string& check, double lhs, double rhs,
                              std::optional<double> tol) {
    ReportRow r;
    r.instance = instance;
    r.check = check;
    r.lhs = lhs;
    r.rhs = rhs;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    r.slack = scale > 0.0 ? (rhs - lhs) / scale : 0.0;
    r.pass = std::isfinite(lhs) && std::isfinite(rhs) && r.slack >= -tol.value_or(tolerance);
    rows.push_back(std::move(r));
    return rows.back();
}

ReportRow& TheoremReport::less(const std::string& instance, const std::string& check, double lhs, double rhs) {
    ReportRow r;
    r.instance = instance;
    r.check = check;
    r.lhs = lhs;
    r.rhs = rhs;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    r.slack = scale > 0.0 ? (rhs - lhs) / scale : 0.0;
    r.pass = lhs < rhs;
    rows.push_back(std::move(r));
    return rows.back();
}

ReportRow& TheoremReport::equal(const std::string& instance, const std::string& check, double lhs, double rhs,
                                double tol) {
    ReportRow r;
    r.instance = instance;
    r.check = check;
    r.lhs = lhs;
    r.rhs = rhs;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    r.slack = -std::abs(lhs - rhs) / scale;
    r.pass = std::abs(lhs - rhs) <= tol * scale;
    rows.push_back(std::move(r));
    return rows.back();
}

ReportRow& TheoremReport::holds(const std::string& instance, const std::string& check, bool ok,
                                const std::string& note) {
    ReportRow r;
    r.instance = instance;
    r.check = check;
    r.lhs = ok ? 1.0 : 0.0;
    r.rhs = 1.0;
    r.slack = ok ? 0.0 : -1.0;
    r.pass = ok;
    r.note = note;
    rows.push_back(std::move(r));
    return rows.back();
}

ReportRow& TheoremReport::diagnostic(const std::string& instance, const std::string& check, double lhs, double rhs,
                                     const std::string& note) {
    ReportRow r;
    r.instance = instance;
    r.check = check;
    r.asserted = false;
    r.lhs = lhs;
    r.rhs = rhs;
    if (rhs != 0.0) r.ratio = lhs / rhs;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    r.slack = scale > 0.0 ? (rhs - lhs) / scale : 0.0;
    r.note = note;
    rows.push_back(std::move(r));
    return rows.back();
}

bool TheoremReport::passed() const { return violations() == 0; }

std::size_t TheoremReport::asserted_count() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.asserted; }));
}

std::size_t TheoremReport::violations() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.asserted && !r.pass; }));
}

double TheoremReport::max_ratio(const std::string& check) const {
    double m = 0.0;
    for (const auto& r : rows)
        if (r.check == check && r.ratio) m = std::max(m, *r.ratio);
    return m;
}

std::size_t TheoremReport::count(const std::string& check) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [&](const auto& r) { return r.check == check; }));
}

bool TheoremReport::passed(const std::string& check) const {
    return std::all_of(rows.begin(), rows.end(),
                       [&](const auto& r) { return r.check != check || !r.asserted || r.pass; });
}

void TheoremReport::canonicalize() {
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.instance < b.instance; });
}

void TheoremReport::merge(const TheoremReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

Json TheoremReport::to_json() const {
    Json j;
    j["suite"] = suite;
    j["tolerance"] = tolerance;
    j["params"] = params;
    j["summary"] = {{"rows", rows.size()},
                    {"asserted", asserted_count()},
                    {"violations", violations()},
                    {"passed", passed()}};
    Json arr = Json::array();
    for (const auto& r : rows) {
        Json e;
        e["instance"] = r.instance;
        e["check"] = r.check;
        e["asserted"] = r.asserted;
        e["lhs"] = r.lhs;
        e["rhs"] = r.rhs;
        e["constant"] = r.constant ? Json(*r.constant) : Json(nullptr);
        e["ratio"] = r.ratio ? Json(*r.ratio) : Json(nullptr);
        e["slack"] = r.slack;
        e["pass"] = r.pass;
        if (!r.note.empty()) e["note"] = r.note;
        arr.push_back(std::move(e));
    }
    j["rows"] = std::move(arr);
    return j;
}

std::string TheoremReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    auto quoted = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    os << "suite,instance,check,asserted,lhs,rhs,constant,ratio,slack,pass,note\n";
    for (const auto& r : rows) {
        os << suite << "," << quoted(r.instance) << "," << r.check << "," << (r.asserted ? 1 : 0) << "," << r.lhs
           << "," << r.rhs << ",";
        if (r.constant) os << *r.constant;
        os << ",";
        if (r.ratio) os << *r.ratio;
        os << "," << r.slack << "," << (r.pass ? 1 : 0) << "," << quoted(r.note) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// oracles

namespace {

// Plain bisection for the Luxemburg value at a fixed center.
double lux_bisect(const WeightedSample& s, const Gauge& g, double c) {
    double dev = 0.0;
    for (double v : s.values) dev = std::max(dev, std::abs(v - c));
    if (dev == 0.0) return 0.0;
    double hi = dev;
    while (s.gauge_average(g, c, hi) > 1.0) hi *= 2.0;
    double lo = hi;
    while (s.gauge_average(g, c, lo) <= 1.0 && lo > 1e-300) lo *= 0.5;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (s.gauge_average(g, c, mid) <= 1.0 ? hi : lo) = mid;
    }
    return hi;
}

double psi_average(const WeightedSample& s, const GaugeProbe& probe, double c, double lambda) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) acc += s.weights[i] * probe.psi(std::abs(s.values[i] - c) / lambda);
    return acc / s.total;
}

// Largest t on a fine geometric grid with psi <= 1 on every grid point up to t.
double probe_safe_argument(const GaugeProbe& probe) {
    double safe = 0.0;
    for (double t = 1e-9; t < 1e9; t *= std::pow(2.0, 1.0 / 64.0)) {
        if (probe.psi(t) > 1.0) break;
        safe = t;
    }
    if (safe == 0.0) throw ContractError("probe exceeds 1 immediately");
    return safe;
}

}  // namespace

double gauge_infc_scan(const WeightedSample& s, const Gauge& g) {
    if (s.constant()) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 4000; ++k) best = std::min(best, lux_bisect(s, g, s.min() + (s.max() - s.min()) * k / 4000.0));
    for (double c : s.values) best = std::min(best, lux_bisect(s, g, c));
    return best;
}

double probe_oscillation(const WeightedSample& s, const GaugeProbe& probe) {
    if (s.constant()) return 0.0;
    const double safe = probe_safe_argument(probe);
    constexpr double ratio = 1.035;
    std::vector<double> centers(s.values);
    for (int k = 0; k <= 64; ++k) centers.push_back(s.min() + (s.max() - s.min()) * k / 64.0);
    double best = std::numeric_limits<double>::infinity();
    for (double c : centers) {
        const double dev = std::max(std::abs(s.max() - c), std::abs(s.min() - c));
        double top = dev / safe;
        for (int k = 0; k < 200 && psi_average(s, probe, c, top) > 1.0; ++k) top *= 2.0;
        // Walk down the grid; keep the smallest feasible point and its infeasible neighbour.
        double feasible = top, infeasible = 0.0;
        double lam = top;
        for (int k = 1; k <= 4000; ++k) {
            lam /= ratio;
            if (psi_average(s, probe, c, lam) <= 1.0) {
                feasible = lam;
                infeasible = 0.0;
            } else if (infeasible == 0.0) {
                infeasible = lam;
            }
            if (k >= 200 && infeasible > 0.0) break;
        }
        if (infeasible > 0.0 && infeasible < feasible) {
            double lo = infeasible, hi = feasible;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (psi_average(s, probe, c, mid) <= 1.0 ? hi : lo) = mid;
            }
            feasible = hi;
        }
        best = std::min(best, feasible);
    }
    return best;
}

std::vector<Rect> brute_force_cz(const GridFunction& g, const CellMeasure& m, double L) {
    const auto& d = g.domain();
    const Integrator in(g, m);
    auto above = [&](const DyadicCube& q) {
        const Rect r = q.rect(d);
        const double mu = in.mass(r);
        return mu > 0.0 && in.integral(r) / mu > L;
    };
    std::vector<Rect> out;
    for (const auto& q : dyadic_subcubes(d)) {
        if (q.level == 0 || !above(q)) continue;
        bool maximal = true;
        for (DyadicCube p = q; p.level > 1 && maximal;) {
            p = {p.level - 1, {p.index[0] / 2, p.index[1] / 2}};
            if (above(p)) maximal = false;
        }
        if (maximal) out.push_back(q.rect(d));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// checkers

void check_cz(TheoremReport& rep, const std::string& instance, const GridFunction& g, const CellMeasure& m,
              double L, const CZResult& r, bool lebesgue, bool brute_force) {
    const auto& d = g.domain();
    const Integrator in(g, m);
    const Rect base = std::get<Rect>(r.base);
    const double root = in.integral(base) / in.mass(base);
    double min_avg = std::numeric_limits<double>::infinity(), max_avg = 0.0, mass_sum = 0.0;
    std::vector<int> cover(d.cell_count(), 0);
    bool disjoint = true;
    std::vector<Rect> got;
    for (const auto& s : r.selected) {
        const Rect rr = std::get<Rect>(s.region);
        got.push_back(rr);
        const double mu = in.mass(rr);
        const double avg = in.integral(rr) / mu;
        min_avg = std::min(min_avg, avg);
        max_avg = std::max(max_avg, avg);
        mass_sum += mu;
        for (std::size_t i = rr.lo[0]; i < rr.hi[0]; ++i)
            for (std::size_t j = rr.lo[1]; j < rr.hi[1]; ++j)
                if (++cover[d.index(i, j)] > 1) disjoint = false;
    }
    const std::string tag = "L=" + [&] {
        std::ostringstream os;
        os << L;
        return os.str();
    }();
    if (!r.selected.empty()) {
        rep.less(instance, "cz-average-above-L", L, min_avg).note = tag;
        if (lebesgue) rep.leq(instance, "cz-average-cap", max_avg, std::ldexp(L, d.dim()), 1e-12).note = tag;
    }
    rep.holds(instance, "cz-disjoint", disjoint, tag);
    double worst_good = 0.0;
    bool mask_ok = true;
    for (std::size_t i = base.lo[0]; i < base.hi[0]; ++i)
        for (std::size_t j = base.lo[1]; j < base.hi[1]; ++j) {
            const std::size_t c = d.index(i, j);
            if ((r.good_mask[c] != 0) != (cover[c] == 0)) mask_ok = false;
            if (r.good_mask[c] && m.weight(c) > 0.0) worst_good = std::max(worst_good, g[c]);
        }
    rep.holds(instance, "cz-good-mask", mask_ok, tag);
    rep.leq(instance, "cz-good-cells", worst_good, L, 0.0).note = tag;
    rep.leq(instance, "cz-mass", mass_sum / in.mass(base), root / L, 1e-12).note = tag;
    if (brute_force) {
        const auto want = brute_force_cz(g, m, L);
        rep.holds(instance, "cz-brute-force", got == want,
                  tag + " selected=" + std::to_string(got.size()) + " enumerated=" + std::to_string(want.size()));
    }
}

void check_rising_sun(TheoremReport& rep, const std::string& instance, const GridFunction& h,
                      const RealInterval& R, double lambda, const CellMeasure& m, const CZResult& r) {
    const auto& d = h.domain();
    const double muR = mass(m, R);
    const double mean = integrate(h, R, m) / muR;
    double worst_mean = 0.0, total = 0.0;
    bool disjoint = true, inside = true;
    for (std::size_t k = 0; k < r.selected.size(); ++k) {
        const auto iv = std::get<RealInterval>(r.selected[k].region);
        const double mu = mass(m, iv);
        total += mu;
        worst_mean = std::max(worst_mean, std::abs(integrate(h, iv, m) / mu - lambda) / std::max(1.0, std::abs(lambda)));
        if (k > 0 && !(std::get<RealInterval>(r.selected[k - 1].region).hi < iv.lo)) disjoint = false;
        if (iv.lo < R.lo || R.hi < iv.hi || !(iv.lo < iv.hi)) inside = false;
    }
    rep.leq(instance, "sun-mean", worst_mean, 1e-9, 0.0).note = std::to_string(r.selected.size()) + " intervals";
    rep.holds(instance, "sun-disjoint", disjoint && inside);
    // Cell-exact outside bound: any cell with mass outside the union has h <= lambda.
    double worst_out = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < d.cell_count(); ++c)
        if (r.good_mask[c] && m.weight(c) > 0.0) worst_out = std::max(worst_out, h[c]);
    if (std::isfinite(worst_out)) rep.leq(instance, "sun-outside", worst_out, lambda, 0.0);
    bool nonneg = true;
    for (double v : h.values()) nonneg &= v >= 0.0;
    if (nonneg) {
        const double bound = muR / lambda * mean;
        auto& row = rep.leq(instance, "sun-mass", total, bound, 0.0);
        row.slack = total == 0.0 && bound == 0.0 ? 0.0 : (bound - total) / std::max(1.0, bound);
        row.pass = row.slack >= -1e-9;
    }
}

void check_bcz(TheoremReport& rep, const std::string& instance, const GridFunction& g, const CellMeasure& m,
               double L, const BczResult& r) {
    const auto& d = g.domain();
    const auto& sel = r.cz.selected;
    double worst_avg = 0.0;
    bool cubes = true;
    std::vector<RealBox> boxes;
    for (const auto& s : sel) {
        const auto& b = std::get<RealBox>(s.region);
        boxes.push_back(b);
        worst_avg = std::max(worst_avg, std::abs(box_average(g, b, m) - L) / L);
        const auto n = static_cast<double>(d.n());
        if (std::abs(b.side(0) - b.side(1)) > 1e-12 * n || b.lo[0] < 0.0 || b.lo[1] < 0.0 || b.hi[0] > n ||
            b.hi[1] > n)
            cubes = false;
    }
    rep.leq(instance, "bcz-average", worst_avg, 1e-9, 0.0).note = std::to_string(sel.size()) + " cubes";
    rep.holds(instance, "bcz-cubes-inside-base", cubes);
    bool disjoint = true;
    std::vector<int> listed(sel.size(), 0);
    for (const auto& fam : r.families.families) {
        for (std::size_t i = 0; i < fam.size(); ++i) {
            ++listed[fam[i]];
            for (std::size_t j = i + 1; j < fam.size(); ++j)
                if (boxes[fam[i]].overlaps(boxes[fam[j]])) disjoint = false;
        }
    }
    const bool partition = std::all_of(listed.begin(), listed.end(), [](int x) { return x == 1; });
    rep.holds(instance, "bcz-families-disjoint", disjoint && partition);
    double worst_good = 0.0;
    bool mask_ok = true;
    for (std::size_t i = 0; i < d.n(); ++i)
        for (std::size_t j = 0; j < d.n(); ++j) {
            const std::size_t c = d.index(i, j);
            bool covered = false;
            for (const auto& b : boxes) covered |= b.covers_cell(i, j);
            if (covered && r.cz.good_mask[c]) mask_ok = false;
            if (r.cz.good_mask[c] && m.weight(c) > 0.0) worst_good = std::max(worst_good, g[c]);
        }
    rep.holds(instance, "bcz-good-mask", mask_ok);
    rep.leq(instance, "bcz-good-cells", worst_good, L, 0.0);
    const Integrator in(g, m);
    double mass_sum = 0.0;
    for (const auto& s : sel) mass_sum += s.mass;
    const double bound = static_cast<double>(r.families.family_count()) / L * in.integral(Rect::whole(d));
    rep.leq(instance, "bcz-mass", mass_sum, bound, 1e-12);
    auto& fc = rep.leq(instance, "bcz-family-count", static_cast<double>(r.families.family_count()),
                       static_cast<double>(r.families.bound), 0.0);
    fc.note = "max overlap " + std::to_string(r.families.max_overlap);
}

// ---------------------------------------------------------------------------
// suites

namespace {

struct Worst {
    double slack = std::numeric_limits<double>::infinity();
    double lhs = 0.0, rhs = 0.0;
    std::string where;

    void offer(double l, double r, const Region& reg) {
        const double scale = std::max(std::abs(l), std::abs(r));
        const double s = scale > 0.0 ? (r - l) / scale : 0.0;
        if (s < slack) {
            slack = s;
            lhs = l;
            rhs = r;
            where = describe(reg);
        }
    }
};

void lower_rows(TheoremReport& rep, const std::string& inst, const Worst& w, std::size_t regions, double tol) {
    auto& row = rep.leq(inst, "lower-per-region", w.lhs, w.rhs, tol);
    row.note = "worst of " + std::to_string(regions) + " at " + w.where;
}

Json gauge_param(const Gauge& g) { return g.name(); }

}  // namespace

TheoremReport verify_thm_main(const std::vector<Instance>& corpus, const Gauge& g, const VerifyOptions& o) {
    TheoremReport rep;
    rep.suite = "main";
    rep.tolerance = o.tol;
    rep.params["gauge"] = gauge_param(g);
    const auto val = validate_gauge(g);
    rep.holds("gauge", "gauge-valid", val.accepted, val.failures.empty() ? "" : val.failures.front());
    const double phi1 = g.inverse(1.0);
    const bool identity = std::holds_alternative<Gauge::Identity>(g.kind());
    for (const auto& in : corpus) {
        const auto& d = in.f.domain();
        const double C = main_constant(g, d.dim());
        const auto fam = RegionFamily::dyadic(d);
        const auto src = grid_source(in.f, in.m);
        Worst worst;
        double bmo = 0.0, bmo_mean = 0.0, bmo_phi = 0.0;
        for (const auto& reg : fam.regions()) {
            const auto s = src(reg);
            const double l1 = osc_l1(s, Centering::InfC).value;
            const double am = osc_l1(s, Centering::AtMean).value;
            const double gv = evaluate(s, &g, Mode::GaugeInfC).value;
            worst.offer(phi1 * gv, l1, reg);
            bmo = std::max(bmo, l1);
            bmo_mean = std::max(bmo_mean, am);
            bmo_phi = std::max(bmo_phi, gv);
        }
        lower_rows(rep, in.name, worst, fam.size(), o.lower_tol);
        rep.leq(in.name, "lower-norm", phi1 * bmo_phi, bmo, o.lower_tol);
        auto& up = rep.leq(in.name, "upper-dyadic", bmo, C * bmo_phi);
        up.constant = C;
        if (bmo_phi > 0.0) up.ratio = bmo / bmo_phi;
        auto& am = rep.diagnostic(in.name, "upper-dyadic-at-mean", bmo_mean, C * bmo_phi);
        am.constant = C;
        am.ratio = bmo_phi > 0.0 ? std::optional<double>(bmo_mean / bmo_phi) : std::nullopt;
        if (identity) rep.equal(in.name, "identity-crosscheck", bmo_phi, bmo, 1e-8);

        const auto cubes = RegionFamily::all_cubes(d);
        if (cubes.size() <= o.diagnostic_family_limit) {
            const double a = norm_sup(in.f, cubes, nullptr, in.m, Mode::InfC).value;
            const double b = norm_sup(in.f, cubes, &g, in.m, Mode::GaugeInfC).value;
            auto& row = rep.diagnostic(in.name, "upper-all-cubes", a, C * b);
            row.constant = C;
            row.ratio = b > 0.0 ? std::optional<double>(a / b) : std::nullopt;
        }
    }
    rep.canonicalize();
    return rep;
}

TheoremReport verify_thm_general(const GaugeProbe& probe, const std::vector<Instance>& corpus,
                                 const VerifyOptions& o, const GeneralOptions& go) {
    TheoremReport rep;
    rep.suite = "general";
    rep.tolerance = o.tol;
    const auto phi = concave_minorant(probe, go.levels, go.delta);
    const Gauge G = Gauge::eventually_concave(phi);
    rep.params["probe"] = probe.name;
    rep.params["t_max"] = probe.t_max;
    rep.params["levels"] = go.levels;
    rep.params["t0"] = phi.t0();
    rep.params["knots"] = phi.knots();
    rep.params["tail_slope"] = phi.final_slope();

    // Domination on a grid that is dense near 0 and reaches the horizon.
    double excess = -std::numeric_limits<double>::infinity();
    const std::size_t N = go.domination_samples;
    for (std::size_t k = 0; k < N; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(N - 1);
        const double t = probe.t_max * u * u;
        excess = std::max(excess, phi(t) - probe.psi(t));
    }
    rep.leq(probe.name, "minorant-domination", excess, 0.0, 0.0).note = std::to_string(N) + " samples";
    const auto tail = validate_tail(phi);
    rep.holds(probe.name, "minorant-tail-concave", tail.accepted, tail.failures.empty() ? "" : tail.failures.front());

    for (const auto& in : corpus) {
        const auto& d = in.f.domain();
        const double T = general_threshold(phi, d.dim());
        rep.params["threshold_d" + std::to_string(d.dim())] = T;
        const auto fam = RegionFamily::dyadic(d);
        const auto src = grid_source(in.f, in.m);
        Worst worst;
        double bmo = 0.0, bmo_phi = 0.0, bmo_psi = 0.0;
        for (const auto& reg : fam.regions()) {
            const auto s = src(reg);
            const double gv = evaluate(s, &G, Mode::GaugeInfC).value;
            const double pv = probe_oscillation(s, probe);
            worst.offer(gv, pv, reg);
            bmo = std::max(bmo, osc_l1(s, Centering::InfC).value);
            bmo_phi = std::max(bmo_phi, gv);
            bmo_psi = std::max(bmo_psi, pv);
        }
        auto& pr = rep.leq(in.name, "phi-le-psi-per-region", worst.lhs, worst.rhs);
        pr.note = "worst of " + std::to_string(fam.size()) + " at " + worst.where;
        rep.leq(in.name, "phi-le-psi", bmo_phi, bmo_psi);
        auto& up = rep.leq(in.name, "upper-general", bmo, T * bmo_phi);
        up.constant = T;
        if (bmo_phi > 0.0) up.ratio = bmo / bmo_phi;
    }
    rep.canonicalize();
    return rep;
}

TheoremReport verify_thm_nondoubling_1d(const std::vector<Instance>& corpus, const Gauge& g,
                                        const VerifyOptions& o) {
    TheoremReport rep;
    rep.suite = "nondoubling1d";
    rep.tolerance = o.tol;
    rep.params["gauge"] = gauge_param(g);
    const double K = nondoubling_constant(g);
    rep.params["constant"] = K;
    const double phi1 = g.inverse(1.0);
    for (const auto& in : corpus) {
        const auto& d = in.f.domain();
        if (d.dim() != 1) throw ContractError("non-doubling suite is 1-D");
        const auto tree = MuDyadicTree::build(RealInterval::cells(0, d.n()), in.m, MuDyadicTree::kMaxDepth, true);
        const auto fam = RegionFamily::mu_dyadic(tree);
        const auto src = grid_source(in.f, in.m);
        Worst worst;
        double X = 0.0, bmo = 0.0, bmo_phi = 0.0;
        for (const auto& reg : fam.regions()) {
            const auto s = src(reg);
            const auto cz = evaluate(s, &g, Mode::CzCenter);
            const double l1 = osc_l1(s, Centering::InfC).value;
            worst.offer(phi1 * cz.lambda, l1, reg);
            X = std::max(X, cz.value);
            bmo = std::max(bmo, l1);
            bmo_phi = std::max(bmo_phi, cz.lambda);
        }
        lower_rows(rep, in.name, worst, fam.size(), o.lower_tol);
        auto& up = rep.leq(in.name, "upper-nondoubling", X, K * bmo_phi);
        up.constant = K;
        if (bmo_phi > 0.0) up.ratio = X / bmo_phi;
        up.note = std::to_string(tree.size()) + " nodes";
        rep.diagnostic(in.name, "bmo-ratio", bmo, bmo_phi);

        if (in.measure == MeasureKind::Density2x) {
            // CDF x^2 on [0, 1): the split of [a, b] is sqrt((a^2 + b^2) / 2).
            double err = 0.0;
            const double n = static_cast<double>(d.n());
            for (const auto& node : tree.nodes()) {
                if (node.leaf()) continue;
                const double a = node.interval.lo.position() / n, b = node.interval.hi.position() / n;
                const double x = tree.node(static_cast<std::size_t>(node.left)).interval.hi.position() / n;
                err = std::max(err, std::abs(x - std::sqrt(0.5 * (a * a + b * b))));
            }
            rep.leq(in.name, "density2x-splits", err, 1e-12, 0.0);
        }
    }
    rep.canonicalize();
    return rep;
}

namespace {

GridFunction slice(const GridFunction& f, std::size_t k, bool row) {
    const auto& d = f.domain();
    std::vector<double> v(d.n());
    for (std::size_t t = 0; t < d.n(); ++t) v[t] = row ? f[d.index(k, t)] : f[d.index(t, k)];
    return {GridDomain(1, d.n(), d.side()), std::move(v)};
}

CellMeasure slice(const CellMeasure& m, std::size_t k, bool row) {
    const auto& d = m.domain();
    std::vector<double> w(d.n());
    for (std::size_t t = 0; t < d.n(); ++t) w[t] = row ? m.weight(d.index(k, t)) : m.weight(d.index(t, k));
    return {GridDomain(1, d.n(), d.side()), std::move(w)};
}

}  // namespace

TheoremReport verify_thm_rect(const std::vector<Instance>& corpus, const Gauge& g, double ceiling,
                              const VerifyOptions& o) {
    TheoremReport rep;
    rep.suite = "rect";
    rep.tolerance = o.tol;
    if (ceiling <= 0.0) ceiling = main_constant(g, 2);
    rep.params["gauge"] = gauge_param(g);
    rep.params["ceiling"] = ceiling;
    const double phi1 = g.inverse(1.0);
    for (const auto& in : corpus) {
        const auto& d = in.f.domain();
        if (d.dim() != 2) throw ContractError("rectangle suite is 2-D");
        const auto rects = RegionFamily::all_rects(d);
        const auto src = grid_source(in.f, in.m);
        Worst worst;
        double bmo = 0.0, bmo_phi = 0.0;
        for (const auto& reg : rects.regions()) {
            const auto s = src(reg);
            const double l1 = osc_l1(s, Centering::InfC).value;
            const double gv = evaluate(s, &g, Mode::GaugeInfC).value;
            worst.offer(phi1 * gv, l1, reg);
            bmo = std::max(bmo, l1);
            bmo_phi = std::max(bmo_phi, gv);
        }
        lower_rows(rep, in.name, worst, rects.size(), o.lower_tol);
        rep.leq(in.name, "lower-norm", phi1 * bmo_phi, bmo, o.lower_tol);
        auto& up = rep.leq(in.name, "upper-rect-ceiling", bmo, ceiling * bmo_phi);
        up.constant = ceiling;
        if (bmo_phi > 0.0) up.ratio = bmo / bmo_phi;

        const auto cubes = RegionFamily::all_cubes(d);
        rep.leq(in.name, "cubes-le-rects", norm_sup(in.f, cubes, nullptr, in.m, Mode::InfC).value, bmo, 0.0);
        rep.leq(in.name, "cubes-le-rects-phi", norm_sup(in.f, cubes, &g, in.m, Mode::GaugeInfC).value, bmo_phi, 0.0);

        // Rising sun on every row and column of f - min f.
        TheoremReport slices;
        std::size_t intervals = 0;
        const double fmin = *std::min_element(in.f.values().begin(), in.f.values().end());
        for (bool row : {true, false})
            for (std::size_t k = 0; k < d.n(); ++k) {
                auto h = slice(in.f, k, row);
                std::vector<double> v = h.values();
                for (auto& x : v) x -= fmin;
                h = GridFunction(h.domain(), std::move(v));
                const auto m = slice(in.m, k, row);
                const auto R = RealInterval::cells(0, d.n());
                const double mean = integrate(h, R, m) / mass(m, R);
                const double top = *std::max_element(h.values().begin(), h.values().end());
                const double lam = top - mean > 1e-9 * std::max(1.0, std::abs(top)) ? mean + 0.5 * (top - mean) : mean + 1.0;
                const auto r = rising_sun_1d(h, R, lam, m);
                intervals += r.selected.size();
                check_rising_sun(slices, (row ? "row" : "col") + std::to_string(k), h, R, lam, m, r);
            }
        rep.holds(in.name, "rising-sun-slices", slices.passed(),
                  std::to_string(2 * d.n()) + " slices, " + std::to_string(intervals) + " intervals, " +
                      std::to_string(slices.violations()) + " violations");
    }
    rep.canonicalize();
    return rep;
}

TheoremReport verify_sht(const std::vector<SpaceInstance>& corpus, const Gauge& g, const VerifyOptions& o) {
    TheoremReport rep;
    rep.suite = "sht";
    rep.tolerance = o.tol;
    rep.params["gauge"] = gauge_param(g);
    const double phi1 = g.inverse(1.0);
    for (const auto& in : corpus) {
        const auto& s = in.space;
        const auto v = validate_sht(s);
        rep.holds(in.name, "sht-valid", v.accepted, v.failures.empty() ? "" : v.failures.front());
        if (!v.structural) continue;

        Worst worst;
        const auto balls = ball_family(s);
        for (const auto& b : balls) {
            std::vector<std::pair<double, double>> vw;
            for (std::size_t y : s.members(b)) vw.emplace_back(in.f[y], s.weight(y));
            const auto smp = WeightedSample::from_pairs(std::move(vw));
            worst.offer(phi1 * evaluate(smp, &g, Mode::GaugeInfC).value, osc_l1(smp, Centering::InfC).value, b);
        }
        lower_rows(rep, in.name, worst, balls.size(), o.lower_tol);
        const double bmo = bmo_sht(in.f, s, nullptr, Mode::InfC).value;
        const double bmo_phi = bmo_sht(in.f, s, &g, Mode::GaugeInfC).value;
        rep.leq(in.name, "lower-norm", phi1 * bmo_phi, bmo, o.lower_tol);
        auto& ratio = rep.diagnostic(in.name, "upper-ratio", bmo, bmo_phi);
        rep.holds(in.name, "upper-ratio-finite", bmo_phi > 0.0 ? std::isfinite(bmo / bmo_phi) : bmo == 0.0,
                  ratio.ratio ? "" : "zero norms");

        // Radius lemma around a few balls of median radius.
        double maxL = 1.0;
        bool finite = true, star = true;
        std::size_t tested = 0;
        const std::size_t stride = std::max<std::size_t>(1, s.size() / 6);
        for (std::size_t x = 0; x < s.size(); x += stride) {
            const auto radii = s.radii(x);
            const Ball B{x, radii[radii.size() / 2]};
            const double eps = (s.gamma() / s.kappa() - 1.0) / vitali_factor(s.kappa());
            const auto lem = check_radius_lemma(s, B, eps);
            finite &= std::isfinite(lem.L);
            star &= lem.star_contained;
            maxL = std::max(maxL, lem.L);
            ++tested;
        }
        rep.holds(in.name, "radius-lemma-finite-L", finite,
                  std::to_string(tested) + " balls, max L " + std::to_string(maxL));
        rep.holds(in.name, "radius-lemma-star", star);
        rep.diagnostic(in.name, "doubling-constant", v.doubling_constant, 1.0).note =
            "order " + std::to_string(v.doubling_order);
        const auto fit = reiteration_fit(s, v.doubling_order);
        rep.diagnostic(in.name, "reiteration-constant", fit.constant, 1.0).note =
            std::to_string(fit.pairs) + " nested pairs";
    }
    rep.canonicalize();
    return rep;
}

TheoremReport verify_decompositions(const std::vector<Instance>& corpus, const Gauge& g,
                                    const std::vector<double>& schedule, const VerifyOptions& o) {
    TheoremReport rep;
    rep.suite = "decomp";
    rep.tolerance = o.tol;
    rep.params["gauge"] = gauge_param(g);
    rep.params["schedule"] = schedule;
    for (const auto& in : corpus) {
        const auto& d = in.f.domain();
        const Rect whole = Rect::whole(d);
        const auto root = osc_gauge_infc(sample(in.f, whole, in.m), g);
        // g = phi(|f - c_Q| / lambda): root phi-average at most 1 (lambda nudged up by the solver tolerance).
        std::vector<double> gv(d.cell_count(), 0.0);
        if (root.value > 0.0) {
            const double lam = root.value * (1.0 + 1e-9);
            for (std::size_t c = 0; c < gv.size(); ++c) gv[c] = g(std::abs(in.f[c] - root.center) / lam);
        }
        const GridFunction G(d, std::move(gv));
        const Integrator integ(G, in.m);
        const double avg = integ.integral(whole) / integ.mass(whole);
        const bool lebesgue = in.measure == MeasureKind::Uniform;
        const bool brute = d.n() <= 256;
        for (double L : schedule) {
            std::ostringstream tag;
            tag << "L=" << L;
            if (avg > L) {
                rep.diagnostic(in.name, "cz-precondition", avg, L, "root average exceeds " + tag.str());
                continue;
            }
            const auto r = cz_dyadic(G, {}, L, in.m);
            check_cz(rep, in.name, G, in.m, L, r, lebesgue, brute);
            if (avg <= 2.0) rep.leq(in.name, "cz-mass-2-over-L", r.mass_ratio, 2.0 / L, 1e-12).note = tag.str();

            if (d.dim() == 1) {
                const auto R = RealInterval::cells(0, d.n());
                if (L > avg) check_rising_sun(rep, in.name, G, R, L, in.m, rising_sun_1d(G, R, L, in.m));
                if (!lebesgue) {
                    const auto tree = MuDyadicTree::build(R, in.m, MuDyadicTree::kMaxDepth, true);
                    const auto mr = cz_mu_dyadic(G, tree, L, in.m);
                    double top = 0.0;
                    for (const auto& s : mr.selected) top = std::max(top, s.average);
                    rep.leq(in.name, "mu-cz-2L", top, 2.0 * L + 1e-9, 0.0).note = tag.str();
                    rep.leq(in.name, "mu-cz-mass", mr.mass_ratio, avg / L, 1e-9).note = tag.str();
                }
            } else if (L > avg) {
                check_bcz(rep, in.name, G, in.m, L, bcz_2d(G, whole, L, in.m));
            }
        }
    }
    rep.canonicalize();
    return rep;
}

TheoremReport verify_vitali(std::size_t families, std::size_t max_points, std::uint64_t seed) {
    TheoremReport rep;
    rep.suite = "vitali";
    rep.params["families"] = families;
    rep.params["max_points"] = max_points;
    rep.equal("kappa=1", "vitali-factor", vitali_factor(1.0), 5.0, 0.0);
    constexpr std::size_t kBits = 256;
    if (max_points > kBits) throw ContractError("Vitali suite supports at most 256 points");
    for (std::size_t k = 0; k < families; ++k) {
        Rng rng(derive(seed, k));
        const std::size_t n = pick(rng, 5, max_points);
        const double p = k % 4 == 0 ? 1.0 : uniform(rng, 1.0, 2.0);
        const auto s = random_plane_sht(n, p, rng());
        const auto all = ball_family(s);
        const std::size_t size = pick(rng, 1, std::min<std::size_t>(120, all.size()));
        std::vector<Ball> balls;
        for (std::size_t i = 0; i < size; ++i) balls.push_back(all[pick(rng, 0, all.size() - 1)]);
        const auto sel = vitali_select(balls, s);
        auto bits = [&](const Ball& b) {
            std::bitset<kBits> out;
            for (std::size_t y : s.members(b)) out.set(y);
            return out;
        };
        std::vector<std::bitset<kBits>> in_bits;
        for (const auto& b : balls) in_bits.push_back(bits(b));
        bool disjoint = true;
        for (std::size_t a = 0; a < sel.selected.size(); ++a)
            for (std::size_t b = a + 1; b < sel.selected.size(); ++b)
                if ((in_bits[sel.selected[a]] & in_bits[sel.selected[b]]).any()) disjoint = false;
        std::vector<std::bitset<kBits>> dilated;
        for (std::size_t i : sel.selected) dilated.push_back(bits(dilate(balls[i], vitali_factor(s.kappa()))));
        bool covered = true;
        for (const auto& ib : in_bits) {
            bool inside = false;
            for (const auto& db : dilated) inside |= (ib & ~db).none();
            covered &= inside;
        }
        const std::string name = "family-" + padded(k) + "-n" + std::to_string(n);
        rep.holds(name, "vitali-disjoint", disjoint && sel.disjoint,
                  std::to_string(sel.selected.size()) + " of " + std::to_string(size) + " selected");
        rep.holds(name, "vitali-covered", covered && sel.covered);
    }
    rep.canonicalize();
    return rep;
}

TheoremReport verify_mu_grid(std::size_t densities, std::uint64_t seed) {
    TheoremReport rep;
    rep.suite = "mugrid";
    rep.params["densities"] = densities;
    for (std::size_t k = 0; k < densities; ++k) {
        Rng rng(derive(seed, k));
        const std::size_t n = std::size_t{1} << pick(rng, 4, 8);
        const GridDomain d(1, n);
        std::vector<double> w(n), sl(n);
        const double range = std::pow(10.0, uniform(rng, 0.0, 6.0));
        for (auto& x : w) x = std::pow(range, uniform(rng, 0.0, 1.0));
        for (auto& x : sl) x = uniform(rng, -2.0, 2.0);
        const CellMeasure m = k % 2 ? CellMeasure(d, w, sl) : CellMeasure(d, w);
        const auto R = RealInterval::cells(0, n);
        const auto tree = MuDyadicTree::build(R, m, d.levels() + 6);
        double worst = 0.0;
        for (const auto& node : tree.nodes()) {
            if (node.leaf()) continue;
            const double a = mass(m, tree.node(static_cast<std::size_t>(node.left)).interval);
            const double b = mass(m, tree.node(static_cast<std::size_t>(node.right)).interval);
            worst = std::max(worst, std::abs(a - b) / mass(m, node.interval));
        }
        const std::string name = "density-" + padded(k) + "-n" + std::to_string(n);
        rep.leq(name, "mu-children-equal", worst, 1e-12, 0.0).note = std::to_string(tree.size()) + " nodes";

        std::exponential_distribution<double> e(1.0);
        std::vector<double> gv(n);
        for (auto& x : gv) x = pick(rng, 0, 9) < 3 ? 4.0 * e(rng) : 0.2 * e(rng);
        const GridFunction g(d, gv);
        const double root = integrate(g, R, m) / m.total();
        const double L = root * uniform(rng, 1.2, 4.0);
        const auto full = MuDyadicTree::build(R, m, MuDyadicTree::kMaxDepth, true);
        const auto r = cz_mu_dyadic(g, full, L, m);
        double top = 0.0, bottom = std::numeric_limits<double>::infinity();
        for (const auto& s : r.selected) {
            top = std::max(top, s.average);
            bottom = std::min(bottom, s.average);
        }
        rep.leq(name, "mu-cz-2L", top, 2.0 * L + 1e-9, 0.0);
        if (!r.selected.empty()) rep.less(name, "mu-cz-above-L", L, bottom);
        double worst_good = 0.0;
        for (std::size_t c = 0; c < n; ++c)
            if (r.good_mask[c]) worst_good = std::max(worst_good, g[c]);
        rep.leq(name, "mu-cz-good-cells", worst_good, L, 0.0);
        rep.diagnostic(name, "mu-cz-unresolved-mass", r.unresolved_mass, m.total());
    }
    for (std::size_t n : {2u, 8u, 64u, 1024u}) {
        const GridDomain d(1, n);
        const auto m = generate_measure(MeasureKind::Density2x, d, 0);
        const auto tree = MuDyadicTree::build(RealInterval::cells(0, n), m, std::min(d.levels() + 4, 12));
        double err = 0.0;
        const double nn = static_cast<double>(n);
        for (const auto& node : tree.nodes()) {
            if (node.leaf()) continue;
            const double a = node.interval.lo.position() / nn, b = node.interval.hi.position() / nn;
            const double x = tree.node(static_cast<std::size_t>(node.left)).interval.hi.position() / nn;
            err = std::max(err, std::abs(x - std::sqrt(0.5 * (a * a + b * b))));
        }
        const std::string name = "density2x-n" + std::to_string(n);
        rep.leq(name, "density2x-splits", err, 1e-12, 0.0);
        rep.equal(name, "density2x-root-split", tree.node(1).interval.hi.position() / nn, 1.0 / std::sqrt(2.0), 1e-12);
    }
    rep.canonicalize();
    return rep;
}

TheoremReport verify_solvers(std::size_t pairs, std::size_t scans, std::uint64_t seed) {
    TheoremReport rep;
    rep.suite = "solvers";
    rep.params["pairs"] = pairs;
    rep.params["scans"] = scans;
    const auto id = Gauge::identity();
    const auto half = Gauge::power(0.5);
    double worst_id = 0.0, worst_half = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
        Rng rng(derive(seed, k));
        const int dim = k % 2 ? 2 : 1;
        const GridDomain d(dim, dim == 1 ? 64 : 8);
        std::normal_distribution<double> z;
        const double scale = std::pow(10.0, uniform(rng, -3.0, 3.0));
        std::vector<double> v(d.cell_count());
        for (auto& x : v) x = scale * z(rng);
        const GridFunction f(d, v);
        const auto m = generate_measure(k % 3 ? MeasureKind::Random : MeasureKind::Uniform, d, rng(), 1e3);
        const std::size_t a0 = pick(rng, 0, d.n() - 1), b0 = pick(rng, a0 + 1, d.n());
        const std::size_t a1 = dim == 1 ? 0 : pick(rng, 0, d.n() - 1), b1 = dim == 1 ? 1 : pick(rng, a1 + 1, d.n());
        const Rect r = Rect::box(a0, b0, a1, b1);
        const auto s = sample(f, r, m);
        double l1 = 0.0, root = 0.0;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            l1 += s.weights[i] * std::abs(s.values[i]);
            root += s.weights[i] * std::sqrt(std::abs(s.values[i]));
        }
        l1 /= s.total;
        root /= s.total;
        const double got_id = luxemburg_norm(f, r, id, m);
        const double got_half = luxemburg_norm(f, r, half, m);
        worst_id = std::max(worst_id, std::abs(got_id - l1) / l1);
        worst_half = std::max(worst_half, std::abs(got_half - root * root) / (root * root));
    }
    rep.leq("closed-forms", "luxemburg-identity", worst_id, 1e-9, 0.0).note = std::to_string(pairs) + " pairs";
    rep.leq("closed-forms", "luxemburg-power-half", worst_half, 1e-9, 0.0).note = std::to_string(pairs) + " pairs";

    const std::vector<Gauge> gauges{Gauge::power(0.5), Gauge::log1p(1.0),
                                    Gauge::polygonal({{0, 0}, {1, 1}, {3, 2}}, 0.25)};
    for (std::size_t k = 0; k < scans; ++k) {
        Rng rng(derive(seed ^ 0x5eedULL, k));
        const GridDomain d(1, 8);
        std::vector<double> v(8);
        for (auto& x : v) x = uniform(rng, -2.0, 2.0);
        const auto m = generate_measure(MeasureKind::Random, d, rng(), 100.0);
        const auto s = sample(GridFunction(d, v), Rect::interval(0, 8), m);
        const auto& g = gauges[k % gauges.size()];
        const double got = osc_gauge_infc(s, g).value;
        const double best = gauge_infc_scan(s, g);
        const std::string name = "scan-" + padded(k);
        rep.leq(name, "gauge-infc-not-above-scan", got, best, 1e-9).note = g.name();
        rep.leq(name, "gauge-infc-scan-relative", std::abs(got - best) / best, 1e-5, 0.0);
    }
    rep.canonicalize();
    return rep;
}

}  // namespace bmo
