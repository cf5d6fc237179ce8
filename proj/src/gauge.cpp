#include "bmophi/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bmophi/errors.hpp"

namespace bmo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double polygonal_eval(const Gauge::Polygonal& g, double t) {
    const auto& v = g.vertices;
    if (t >= v.back().t) return v.back().y + g.final_slope * (t - v.back().t);
    auto it = std::upper_bound(v.begin(), v.end(), t,
                               [](double x, const Vertex& p) { return x < p.t; });
    const Vertex& b = *it;
    const Vertex& a = *(it - 1);
    return a.y + (b.y - a.y) * (t - a.t) / (b.t - a.t);
}

double polygonal_inverse(const Gauge::Polygonal& g, double y) {
    const auto& v = g.vertices;
    if (y <= v.front().y) return v.front().t;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const Vertex& a = v[i - 1];
        const Vertex& b = v[i];
        if (b.y >= y) {
            if (a.y >= y) return a.t;
            return a.t + (y - a.y) * (b.t - a.t) / (b.y - a.y);
        }
    }
    if (g.final_slope <= 0.0)
        throw ContractError("gauge inverse: value above the range of a bounded polygonal gauge");
    return v.back().t + (y - v.back().y) / g.final_slope;
}

template <class Phi>
double sum_with(const Phi& phi, std::span<const double> values, std::span<const double> weights,
                double shift, double scale) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        s += weights[i] * phi(std::abs(values[i] - shift) * scale);
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// EventuallyConcaveGauge

EventuallyConcaveGauge::EventuallyConcaveGauge(std::vector<double> knots, double tail_slope)
    : knots_(std::move(knots)), tail_slope_(tail_slope) {
    if (knots_.size() < 2) throw ContractError("eventually concave gauge needs at least two knots");
    if (knots_.front() < 0.0) throw ContractError("eventually concave gauge: t_0 must be nonnegative");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i] > knots_[i - 1]))
            throw ContractError("eventually concave gauge: knots must be strictly increasing");
    const std::size_t n = knots_.size();
    const double last = 1.0 / (knots_[n - 1] - knots_[n - 2]);
    if (tail_slope_ < 0.0 || tail_slope_ > last * (1.0 + 1e-12))
        throw ContractError("eventually concave gauge: tail slope must lie in (0, last segment slope]");
    if (tail_slope_ == 0.0) tail_slope_ = last;
}

double EventuallyConcaveGauge::operator()(double t) const {
    if (t <= knots_.front()) return 0.0;
    const std::size_t n = knots_.size() - 1;
    if (t >= knots_.back()) return static_cast<double>(n) + (t - knots_.back()) * final_slope();
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const auto k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return static_cast<double>(k) + (t - knots_[k]) / (knots_[k + 1] - knots_[k]);
}

double EventuallyConcaveGauge::inverse(double y) const {
    if (y <= 0.0) return knots_.front();
    const std::size_t n = knots_.size() - 1;
    if (y >= static_cast<double>(n)) return knots_.back() + (y - static_cast<double>(n)) / final_slope();
    const auto k = static_cast<std::size_t>(std::floor(y));
    return knots_[k] + (y - static_cast<double>(k)) * (knots_[k + 1] - knots_[k]);
}

double EventuallyConcaveGauge::final_slope() const { return tail_slope_; }

bool EventuallyConcaveGauge::tail_concave() const {
    for (std::size_t i = 2; i < knots_.size(); ++i) {
        const double prev = knots_[i - 1] - knots_[i - 2];
        const double gap = knots_[i] - knots_[i - 1];
        if (gap < prev * (1.0 - 1e-12)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Gauge

Gauge Gauge::power(double p) {
    if (!(p > 0.0)) throw ContractError("power gauge: exponent must be positive");
    return Gauge(Power{p});
}

Gauge Gauge::log1p(double a) {
    if (!(a > 0.0)) throw ContractError("log1p gauge: scale must be positive");
    return Gauge(LogOnePlus{a});
}

Gauge Gauge::polygonal(std::vector<Vertex> vertices, double final_slope) {
    if (vertices.size() < 2) throw ContractError("polygonal gauge needs at least two vertices");
    if (vertices.front().t != 0.0) throw ContractError("polygonal gauge: first vertex must sit at t = 0");
    for (std::size_t i = 1; i < vertices.size(); ++i)
        if (!(vertices[i].t > vertices[i - 1].t))
            throw ContractError("polygonal gauge: vertex abscissae must be strictly increasing");
    return Gauge(Polygonal{std::move(vertices), final_slope});
}

Gauge Gauge::eventually_concave(EventuallyConcaveGauge g) { return Gauge(std::move(g)); }

double Gauge::operator()(double t) const {
    if (t < 0.0) throw ContractError("gauge evaluated at a negative argument");
    return std::visit(overloaded{
                          [&](const Identity&) { return t; },
                          [&](const Power& g) { return std::pow(t, g.p); },
                          [&](const LogOnePlus& g) { return g.a * std::log1p(t); },
                          [&](const Polygonal& g) { return polygonal_eval(g, t); },
                          [&](const EventuallyConcaveGauge& g) { return g(t); },
                      },
                      kind_);
}

double Gauge::inverse(double y) const {
    if (y < 0.0) throw ContractError("gauge inverse at a negative value");
    return std::visit(overloaded{
                          [&](const Identity&) { return y; },
                          [&](const Power& g) { return std::pow(y, 1.0 / g.p); },
                          [&](const LogOnePlus& g) { return std::expm1(y / g.a); },
                          [&](const Polygonal& g) { return polygonal_inverse(g, y); },
                          [&](const EventuallyConcaveGauge& g) { return g.inverse(y); },
                      },
                      kind_);
}

double Gauge::weighted_sum(std::span<const double> values, std::span<const double> weights,
                           double scale) const {
    return weighted_sum(values, weights, 0.0, scale);
}

double Gauge::weighted_sum(std::span<const double> values, std::span<const double> weights,
                           double shift, double scale) const {
    return std::visit(
        overloaded{
            [&](const Identity&) {
                return sum_with([](double t) { return t; }, values, weights, shift, scale);
            },
            [&](const Power& g) {
                if (g.p == 0.5)
                    return sum_with([](double t) { return std::sqrt(t); }, values, weights, shift, scale);
                const double p = g.p;
                return sum_with([p](double t) { return std::pow(t, p); }, values, weights, shift, scale);
            },
            [&](const LogOnePlus& g) {
                return g.a * sum_with([](double t) { return std::log1p(t); }, values, weights, shift, scale);
            },
            [&](const Polygonal& g) {
                return sum_with([&g](double t) { return polygonal_eval(g, t); }, values, weights, shift,
                                scale);
            },
            [&](const EventuallyConcaveGauge& g) {
                return sum_with([&g](double t) { return g(t); }, values, weights, shift, scale);
            },
        },
        kind_);
}

std::string Gauge::name() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const Identity&) { os << "id"; },
                   [&](const Power& g) { os << "power:" << g.p; },
                   [&](const LogOnePlus& g) { os << "log1p:" << g.a; },
                   [&](const Polygonal& g) { os << "polygonal[" << g.vertices.size() << "]"; },
                   [&](const EventuallyConcaveGauge& g) {
                       os << "minorant[t0=" << g.t0() << ",levels=" << g.levels() << "]";
                   },
               },
               kind_);
    return os.str();
}

// ---------------------------------------------------------------------------
// validation

namespace {

void check_subadditivity(const Gauge& g, GaugeValidation& out) {
    std::vector<double> pts{0.0};
    for (int k = -8; k <= 8; ++k) pts.push_back(std::ldexp(1.0, k));
    for (int k = 1; k <= 25; ++k) pts.push_back(4.0 * k);
    double worst = 0.0;
    for (double a : pts)
        for (double b : pts) {
            if (b < a) continue;
            const double lhs = g(a + b);
            const double rhs = g(a) + g(b);
            worst = std::max(worst, lhs - rhs);
        }
    out.subadditivity_excess = worst;
    if (out.accepted && worst > 1e-12 * std::max(1.0, g(200.0))) {
        out.accepted = false;
        out.failures.emplace_back("not subadditive on sampled pairs");
    }
}

void reject(GaugeValidation& v, std::string why) {
    v.accepted = false;
    v.failures.push_back(std::move(why));
}

}  // namespace

GaugeValidation validate_gauge(const Gauge& g) {
    GaugeValidation v;
    std::visit(overloaded{
                   [&](const Gauge::Identity&) {},
                   [&](const Gauge::Power& p) {
                       if (!(p.p > 0.0 && p.p <= 1.0)) reject(v, "not concave: power exponent outside (0, 1]");
                   },
                   [&](const Gauge::LogOnePlus& l) {
                       if (!(l.a > 0.0)) reject(v, "not increasing: log1p scale must be positive");
                   },
                   [&](const Gauge::Polygonal& p) {
                       const auto& vs = p.vertices;
                       if (vs.front().y != 0.0) reject(v, "phi(0) != 0");
                       std::vector<double> slopes;
                       for (std::size_t i = 1; i < vs.size(); ++i)
                           slopes.push_back((vs[i].y - vs[i - 1].y) / (vs[i].t - vs[i - 1].t));
                       slopes.push_back(p.final_slope);
                       if (std::any_of(slopes.begin(), slopes.end(), [](double s) { return s < 0.0; }))
                           reject(v, "not nondecreasing");
                       for (std::size_t i = 1; i < slopes.size(); ++i)
                           if (slopes[i] > slopes[i - 1] * (1.0 + 1e-12) + 1e-300) {
                               reject(v, "not concave: segment slopes increase");
                               break;
                           }
                       if (!(p.final_slope > 0.0)) reject(v, "does not tend to infinity: final slope is not positive");
                   },
                   [&](const EventuallyConcaveGauge& e) {
                       if (e.t0() > 0.0) reject(v, "not concave: flat initial segment on [0, t0]");
                       if (!e.tail_concave()) reject(v, "not concave: knot gaps decrease");
                   },
               },
               g.kind());
    check_subadditivity(g, v);
    return v;
}

GaugeValidation validate_tail(const EventuallyConcaveGauge& g) {
    GaugeValidation v;
    if (!g.tail_concave()) reject(v, "not concave on [t0, inf): knot gaps decrease");
    if (!(g.final_slope() > 0.0)) reject(v, "does not tend to infinity");
    // Subadditivity of the shifted tail s -> phi(t0 + s).
    const double t0 = g.t0();
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i)
        for (int j = i; j <= 40; ++j) {
            const double a = 0.25 * i * i;
            const double b = 0.25 * j * j;
            worst = std::max(worst, g(t0 + a + b) - g(t0 + a) - g(t0 + b));
        }
    v.subadditivity_excess = worst;
    if (worst > 1e-9) reject(v, "tail not subadditive on sampled pairs");
    return v;
}

// ---------------------------------------------------------------------------
// probes and the minorant

GaugeProbe named_probe(const std::string& name, double t_max, std::size_t sample_count) {
    GaugeProbe p;
    p.name = name;
    p.t_max = t_max;
    p.sample_count = sample_count;
    if (name == "identity")
        p.psi = [](double t) { return t; };
    else if (name == "oscillating")
        p.psi = [](double t) { return t * (1.0 + 0.5 * std::sin(t)); };
    else if (name == "log2-step")
        p.psi = [](double t) { return std::floor(std::log2(1.0 + t)); };
    else if (name == "floor")
        p.psi = [](double t) { return std::floor(t); };
    else if (name == "square")
        p.psi = [](double t) { return t * t; };
    else
        throw ContractError("unknown probe '" + name + "'");
    return p;
}

std::vector<double> level_crossings(const GaugeProbe& probe, std::size_t count) {
    if (probe.sample_count < 2 || !(probe.t_max > 0.0))
        throw ContractError("probe needs a positive horizon and at least two samples");
    if (probe.psi(0.0) != 0.0) throw ContractError("probe must satisfy psi(0) = 0");
    const std::size_t m = probe.sample_count;
    const double h = probe.t_max / static_cast<double>(m - 1);
    std::vector<double> ts(m), suffix_min(m);
    for (std::size_t i = 0; i < m; ++i) ts[i] = i == m - 1 ? probe.t_max : h * static_cast<double>(i);
    for (std::size_t i = m; i-- > 0;) {
        const double v = probe.psi(ts[i]);
        suffix_min[i] = i == m - 1 ? v : std::min(v, suffix_min[i + 1]);
    }
    std::vector<double> taus;
    taus.reserve(count);
    for (std::size_t n = 1; n <= count; ++n) {
        const double level = static_cast<double>(n);
        // Last sample with psi < level: the largest i with suffix_min[i] < level.
        const auto it = std::partition_point(suffix_min.begin(), suffix_min.end(),
                                             [level](double v) { return v < level; });
        const auto i = static_cast<std::size_t>(it - suffix_min.begin()) - 1;
        if (i == m - 1) {
            std::ostringstream os;
            os << "probe '" << probe.name << "' stays below level " << n << " up to t_max = " << probe.t_max;
            throw MinorantError(os.str(), n);
        }
        double lo = ts[i];
        double hi = ts[i + 1];
        for (int it2 = 0; it2 < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it2) {
            const double mid = 0.5 * (lo + hi);
            if (probe.psi(mid) < level)
                lo = mid;
            else
                hi = mid;
        }
        taus.push_back(hi);
    }
    return taus;
}

EventuallyConcaveGauge concave_minorant(const GaugeProbe& probe, std::size_t n_max, double delta) {
    if (n_max < 1) throw ContractError("concave_minorant needs n_max >= 1");
    if (!(delta > 0.0)) throw ContractError("concave_minorant needs a positive first gap");
    const auto tau = level_crossings(probe, n_max + 1);  // tau[k] = tau_{k+1}
    std::vector<double> t(n_max + 1);
    t[0] = tau[0];
    t[1] = std::max(tau[1], t[0] + delta);
    for (std::size_t n = 1; n + 1 <= n_max; ++n) t[n + 1] = std::max(tau[n + 1], 2.0 * t[n] - t[n - 1]);

    // psi >= n_max + 1 past t_{n_max}, so a positive tail slope staying under
    // the samples always exists.
    const double tN = t.back();
    const double top = static_cast<double>(n_max);
    double slope = 1.0 / (t[n_max] - t[n_max - 1]);
    const std::size_t m = probe.sample_count;
    for (std::size_t i = 0; i < m; ++i) {
        const double s = probe.t_max * static_cast<double>(i) / static_cast<double>(m - 1);
        if (s <= tN) continue;
        slope = std::min(slope, (probe.psi(s) - top) / (s - tN));
    }
    return EventuallyConcaveGauge(std::move(t), slope);
}

}  // namespace bmo
