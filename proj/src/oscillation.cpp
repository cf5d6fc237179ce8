#include "bmophi/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "bmophi/errors.hpp"

namespace bmo {

std::string describe(const Region& r) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Rect>) {
                os << "rect[" << x.lo[0] << "," << x.hi[0] << ")x[" << x.lo[1] << "," << x.hi[1] << ")";
            } else if constexpr (std::is_same_v<T, RealInterval>) {
                os << "interval[" << x.lo.position() << "," << x.hi.position() << "]";
            } else {
                os << "ball(" << x.center << "," << x.radius << ")";
            }
        },
        r);
    return os.str();
}

// ---------------------------------------------------------------------------
// samples

WeightedSample WeightedSample::from_pairs(std::vector<std::pair<double, double>> vw) {
    std::erase_if(vw, [](const auto& p) { return !(p.second > 0.0); });
    std::sort(vw.begin(), vw.end());
    WeightedSample s;
    for (const auto& [v, w] : vw) {
        if (!s.values.empty() && s.values.back() == v) {
            s.weights.back() += w;
        } else {
            s.values.push_back(v);
            s.weights.push_back(w);
        }
        s.total += w;
    }
    return s;
}

double WeightedSample::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i];
    return acc / total;
}

double WeightedSample::median() const {
    const double half = 0.5 * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        cum += weights[i];
        if (cum >= half) return values[i];
    }
    return values.back();
}

double WeightedSample::gauge_average(const Gauge& g, double shift, double lambda) const {
    return g.weighted_sum(values, weights, shift, 1.0 / lambda) / total;
}

WeightedSample sample(const GridFunction& f, const Rect& r, const CellMeasure& m) {
    const auto& d = f.domain();
    if (r.cell_count() == 0) throw ContractError("sample over an empty region");
    std::vector<std::pair<double, double>> vw;
    vw.reserve(r.cell_count());
    if (d.dim() == 1) {
        for (std::size_t i = r.lo[0]; i < r.hi[0]; ++i) vw.emplace_back(f[i], m.weight(i));
    } else {
        for (std::size_t i = r.lo[0]; i < r.hi[0]; ++i)
            for (std::size_t j = r.lo[1]; j < r.hi[1]; ++j) {
                const auto k = d.index(i, j);
                vw.emplace_back(f[k], m.weight(k));
            }
    }
    auto s = WeightedSample::from_pairs(std::move(vw));
    if (s.empty()) throw ContractError("region has zero measure");
    return s;
}

WeightedSample sample(const GridFunction& f, const RealInterval& iv, const CellMeasure& m) {
    if (!(iv.lo < iv.hi)) throw ContractError("sample over an empty interval");
    std::vector<std::pair<double, double>> vw;
    const std::int64_t last = iv.hi.frac > 0.0 ? iv.hi.cell : iv.hi.cell - 1;
    for (std::int64_t c = iv.lo.cell; c <= last; ++c) {
        const auto cell = static_cast<std::size_t>(c);
        const double u = c == iv.lo.cell ? iv.lo.frac : 0.0;
        const double v = c == iv.hi.cell ? iv.hi.frac : 1.0;
        vw.emplace_back(f[cell], m.piece_mass(cell, u, v));
    }
    auto s = WeightedSample::from_pairs(std::move(vw));
    if (s.empty()) throw ContractError("interval has zero measure");
    return s;
}

// ---------------------------------------------------------------------------
// Luxemburg

LuxemburgResult luxemburg(const WeightedSample& s, const Gauge& g, double shift) {
    if (s.empty() || !(s.total > 0.0)) throw ContractError("Luxemburg average over a region of zero measure");
    double mean_abs = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) mean_abs += s.weights[i] * std::abs(s.values[i] - shift);
    mean_abs /= s.total;
    if (mean_abs == 0.0) return {0.0, 0};

    auto excess = [&](double lambda) { return s.gauge_average(g, shift, lambda) - 1.0; };
    int iterations = 0;
    double hi = mean_abs;
    double f_hi = excess(hi);
    while (f_hi > 0.0) {
        hi *= 2.0;
        f_hi = excess(hi);
        ++iterations;
    }
    double lo = hi;
    double f_lo = f_hi;
    while (f_lo <= 0.0) {
        hi = lo;
        f_hi = f_lo;
        lo *= 0.5;
        f_lo = excess(lo);
        ++iterations;
        if (lo < std::numeric_limits<double>::min()) return {0.0, iterations};
    }
    if (f_hi == 0.0) return {hi, iterations};

    auto tol = [](double a, double b) { return b - a <= 1e-10 * b; };
    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(excess, lo, hi, f_lo, f_hi, tol, max_iter);
    iterations += static_cast<int>(max_iter);
    // toms748 keeps a sign-changing bracket; the left end has excess >= 0.
    return {a, iterations};
}

double luxemburg_norm(const GridFunction& f, const Rect& r, const Gauge& g, const CellMeasure& m) {
    return luxemburg(sample(f, r, m), g).lambda;
}

double luxemburg_norm(const GridFunction& f, const RealInterval& iv, const Gauge& g, const CellMeasure& m) {
    return luxemburg(sample(f, iv, m), g).lambda;
}

// ---------------------------------------------------------------------------
// oscillations

Oscillation osc_l1(const WeightedSample& s, Centering centering) {
    if (s.empty()) throw ContractError("oscillation over a region of zero measure");
    const double c = centering == Centering::AtMean ? s.mean() : s.median();
    double acc = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) acc += s.weights[i] * std::abs(s.values[i] - c);
    return {acc / s.total, c};
}

GaugeOscillation osc_gauge_infc(const WeightedSample& s, const Gauge& g) {
    if (s.empty()) throw ContractError("oscillation over a region of zero measure");
    GaugeOscillation out;
    if (s.constant()) {
        out.center = s.values.front();
        return out;
    }
    const double lo = s.min();
    const double hi = s.max();
    const double range = hi - lo;

    std::vector<double> cand(s.values);
    constexpr int kFill = 64;
    for (int k = 1; k <= kFill; ++k) cand.push_back(lo + range * k / (kFill + 1));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (std::size_t i = 1; i < cand.size(); ++i) out.scan_resolution = std::max(out.scan_resolution, cand[i] - cand[i - 1]);
    out.candidates = cand.size();

    const double med = s.median();
    auto solve = [&](double c) {
        ++out.solves;
        return luxemburg(s, g, c).lambda;
    };
    double best = solve(med);
    double best_c = med;
    // At least half the mass sits on the far side of the median, so
    // avg phi(|f - c| / best) >= phi(|c - med| / best) / 2 and centers with
    // |c - med| > best * phi^{-1}(2) cannot beat `best`.
    const double reach = g.inverse(2.0);
    for (double c : cand) {
        if (c == med) continue;
        if (std::abs(c - med) > best * reach * (1.0 + 1e-12)) continue;
        if (s.gauge_average(g, c, best) >= 1.0) continue;
        const double v = solve(c);
        if (v < best) {
            best = v;
            best_c = c;
        }
    }

    // Golden-section refinement between the neighbours of the best center.
    const auto it = std::lower_bound(cand.begin(), cand.end(), best_c);
    double a = it == cand.begin() ? best_c : *(it - 1);
    double b = (it + 1) == cand.end() || it == cand.end() ? best_c : *(it + 1);
    const double width = 1e-9 * range;
    if (b - a > width) {
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = solve(x1);
        double f2 = solve(x2);
        while (b - a > width) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = solve(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = solve(x2);
            }
        }
        if (f1 < best) {
            best = f1;
            best_c = x1;
        }
        if (f2 < best) {
            best = f2;
            best_c = x2;
        }
    }
    out.value = best;
    out.center = best_c;
    return out;
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::MeanCentered: return "at-mean";
        case Mode::InfC: return "infc";
        case Mode::GaugeInfC: return "gauge-infc";
        case Mode::CzCenter: return "cz-center";
        case Mode::KPhi: return "k-phi";
    }
    return "?";
}

Mode mode_from_string(const std::string& s) {
    if (s == "at-mean" || s == "mean") return Mode::MeanCentered;
    if (s == "infc") return Mode::InfC;
    if (s == "gauge-infc") return Mode::GaugeInfC;
    if (s == "cz-center") return Mode::CzCenter;
    if (s == "k-phi") return Mode::KPhi;
    throw ContractError("unknown mode '" + s + "'");
}

RegionValue evaluate(const WeightedSample& s, const Gauge* g, Mode mode) {
    RegionValue r;
    const bool needs_gauge = mode == Mode::GaugeInfC || mode == Mode::CzCenter || mode == Mode::KPhi;
    if (needs_gauge && g == nullptr) throw ContractError("mode " + to_string(mode) + " needs a gauge");
    switch (mode) {
        case Mode::MeanCentered: {
            const auto o = osc_l1(s, Centering::AtMean);
            r.value = o.value;
            r.center = o.center;
            break;
        }
        case Mode::InfC: {
            const auto o = osc_l1(s, Centering::InfC);
            r.value = o.value;
            r.center = o.center;
            break;
        }
        case Mode::GaugeInfC:
        case Mode::CzCenter: {
            const auto o = osc_gauge_infc(s, *g);
            r.center = o.center;
            r.lambda = o.value;
            r.solves = o.solves;
            r.candidates = o.candidates;
            r.scan_resolution = o.scan_resolution;
            if (mode == Mode::GaugeInfC) {
                r.value = o.value;
            } else {
                double acc = 0.0;
                for (std::size_t i = 0; i < s.values.size(); ++i) acc += s.weights[i] * std::abs(s.values[i] - o.center);
                r.value = acc / s.total;
            }
            break;
        }
        case Mode::KPhi: {
            r.center = s.mean();
            r.value = g->weighted_sum(s.values, s.weights, r.center, 1.0) / s.total;
            break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// families

RegionFamily RegionFamily::dyadic(const GridDomain& d, const DyadicCube& base) {
    RegionFamily f;
    f.kind_ = Kind::DyadicCubes;
    for (const auto& q : dyadic_subcubes(d, base)) f.regions_.emplace_back(q.rect(d));
    return f;
}

RegionFamily RegionFamily::all_cubes(const GridDomain& d, std::optional<Rect> base) {
    const Rect b = base.value_or(Rect::whole(d));
    RegionFamily f;
    f.kind_ = Kind::AllGridCubes;
    if (d.dim() == 1) {
        for (std::size_t lo = b.lo[0]; lo < b.hi[0]; ++lo)
            for (std::size_t hi = lo + 1; hi <= b.hi[0]; ++hi) f.regions_.emplace_back(Rect::interval(lo, hi));
    } else {
        const std::size_t max_side = std::min(b.extent(0), b.extent(1));
        for (std::size_t i = b.lo[0]; i < b.hi[0]; ++i)
            for (std::size_t j = b.lo[1]; j < b.hi[1]; ++j)
                for (std::size_t s = 1; s <= max_side && i + s <= b.hi[0] && j + s <= b.hi[1]; ++s)
                    f.regions_.emplace_back(Rect::box(i, i + s, j, j + s));
    }
    return f;
}

RegionFamily RegionFamily::all_rects(const GridDomain& d, std::optional<Rect> base) {
    if (d.dim() == 1) {
        auto f = all_cubes(d, base);
        f.kind_ = Kind::AllGridRects;
        return f;
    }
    const Rect b = base.value_or(Rect::whole(d));
    RegionFamily f;
    f.kind_ = Kind::AllGridRects;
    for (std::size_t r0 = b.lo[0]; r0 < b.hi[0]; ++r0)
        for (std::size_t c0 = b.lo[1]; c0 < b.hi[1]; ++c0)
            for (std::size_t r1 = r0 + 1; r1 <= b.hi[0]; ++r1)
                for (std::size_t c1 = c0 + 1; c1 <= b.hi[1]; ++c1) f.regions_.emplace_back(Rect::box(r0, r1, c0, c1));
    return f;
}

RegionFamily RegionFamily::mu_dyadic(const MuDyadicTree& tree) {
    RegionFamily f;
    f.kind_ = Kind::MuDyadic;
    for (const auto& n : tree.nodes()) f.regions_.emplace_back(n.interval);
    return f;
}

std::string to_string(RegionFamily::Kind k) {
    switch (k) {
        case RegionFamily::Kind::DyadicCubes: return "dyadic";
        case RegionFamily::Kind::AllGridCubes: return "cubes";
        case RegionFamily::Kind::AllGridRects: return "rects";
        case RegionFamily::Kind::MuDyadic: return "mu-dyadic";
    }
    return "?";
}

SampleSource grid_source(const GridFunction& f, const CellMeasure& m) {
    return [&f, &m](const Region& r) -> WeightedSample {
        if (const auto* rect = std::get_if<Rect>(&r)) return sample(f, *rect, m);
        if (const auto* iv = std::get_if<RealInterval>(&r)) return sample(f, *iv, m);
        throw ContractError("grid functions cannot be sampled on balls");
    };
}

NormReport norm_sup(const std::vector<Region>& regions, const SampleSource& source, const Gauge* g, Mode mode,
                    const NormOptions& opts) {
    if (regions.empty()) throw ContractError("norm over an empty family");
    NormReport rep;
    rep.mode = mode;
    rep.gauge = g ? g->name() : "none";
    rep.diagnostics.regions = regions.size();
    bool have = false;
    const bool prunable = opts.prune && mode == Mode::GaugeInfC && g != nullptr;
    for (const auto& region : regions) {
        const WeightedSample s = source(region);
        if (prunable && have && rep.value > 0.0 && !s.constant() &&
            s.gauge_average(*g, s.median(), rep.value) < 1.0) {
            ++rep.diagnostics.pruned;
            continue;
        }
        const RegionValue v = evaluate(s, g, mode);
        ++rep.diagnostics.evaluated;
        rep.diagnostics.luxemburg_solves += v.solves;
        rep.diagnostics.scan_candidates += v.candidates;
        rep.diagnostics.max_scan_resolution = std::max(rep.diagnostics.max_scan_resolution, v.scan_resolution);
        if (!have || v.value > rep.value || (v.value == rep.value && region < rep.witness)) {
            have = true;
            rep.value = v.value;
            rep.witness = region;
            rep.c_opt = v.center;
            rep.lambda_opt = v.lambda;
        }
    }
    return rep;
}

NormReport norm_sup(const GridFunction& f, const RegionFamily& fam, const Gauge* g, const CellMeasure& m, Mode mode,
                    const NormOptions& opts) {
    auto rep = norm_sup(fam.regions(), grid_source(f, m), g, mode, opts);
    rep.family = to_string(fam.kind());
    return rep;
}

double k_phi(const GridFunction& f, const Rect& base, const Gauge& g, const CellMeasure& m) {
    const auto fam = RegionFamily::all_cubes(f.domain(), base);
    double best = 0.0;
    for (const auto& r : fam.regions()) {
        const auto s = sample(f, std::get<Rect>(r), m);
        best = std::max(best, evaluate(s, &g, Mode::KPhi).value);
    }
    return best;
}

}  // namespace bmo
