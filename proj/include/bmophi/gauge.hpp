#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace bmo {

struct Vertex {
    double t = 0.0;
    double y = 0.0;
};

/// Piecewise-linear gauge that vanishes on [0, t0] and passes through
/// (t_n, n) for n = 0..N afterwards, t0 = t_0. Beyond t_N it continues with
/// `tail_slope`, which defaults to the slope of the last segment and may not
/// exceed it.
class EventuallyConcaveGauge {
public:
    EventuallyConcaveGauge() = default;
    explicit EventuallyConcaveGauge(std::vector<double> knots, double tail_slope = 0.0);

    double operator()(double t) const;
    /// Inverse of the restriction to [t0, inf). inverse(0) == t0.
    double inverse(double y) const;

    double t0() const { return knots_.front(); }
    const std::vector<double>& knots() const { return knots_; }
    std::size_t levels() const { return knots_.size() - 1; }
    double final_slope() const;
    /// True when the gaps t_{n+1} - t_n are nondecreasing.
    bool tail_concave() const;

private:
    std::vector<double> knots_;
    double tail_slope_ = 0.0;
};

/// An increasing gauge phi with phi(0) = 0, as used in Luxemburg averages.
class Gauge {
public:
    struct Identity {};
    struct Power {
        double p = 1.0;
    };
    struct LogOnePlus {
        double a = 1.0;
    };
    struct Polygonal {
        std::vector<Vertex> vertices;
        double final_slope = 0.0;
    };
    using Kind = std::variant<Identity, Power, LogOnePlus, Polygonal, EventuallyConcaveGauge>;

    Gauge() : kind_(Identity{}) {}

    static Gauge identity() { return Gauge(Identity{}); }
    static Gauge power(double p);
    static Gauge log1p(double a);
    /// vertices must start at t = 0 with strictly increasing t.
    static Gauge polygonal(std::vector<Vertex> vertices, double final_slope);
    static Gauge eventually_concave(EventuallyConcaveGauge g);

    double operator()(double t) const;
    /// Least t with phi(t) >= y (restricted inverse for eventually concave gauges).
    double inverse(double y) const;

    /// sum_i w_i * phi(|v_i| * scale); the hot loop of every Luxemburg solve.
    double weighted_sum(std::span<const double> values, std::span<const double> weights,
                        double scale) const;
    /// Same with values shifted: sum_i w_i * phi(|v_i - shift| * scale).
    double weighted_sum(std::span<const double> values, std::span<const double> weights,
                        double shift, double scale) const;

    const Kind& kind() const { return kind_; }
    std::string name() const;

private:
    explicit Gauge(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

struct GaugeValidation {
    bool accepted = true;
    std::vector<std::string> failures;
    /// max over sampled pairs of phi(t1 + t2) - phi(t1) - phi(t2).
    double subadditivity_excess = 0.0;
};

/// Checks the hypotheses of the main equivalence: phi(0) = 0, nondecreasing,
/// concave, unbounded. Subadditivity is sampled on top.
GaugeValidation validate_gauge(const Gauge& g);

/// Concavity and growth of an eventually concave gauge restricted to [t0, inf).
GaugeValidation validate_tail(const EventuallyConcaveGauge& g);

/// Sampled access to an arbitrary measurable psi with psi(0) = 0.
struct GaugeProbe {
    std::string name;
    std::function<double(double)> psi;
    double t_max = 0.0;
    std::size_t sample_count = 100000;
};

/// Named probes: "identity", "oscillating" (t(1 + sin(t)/2)), "log2-step"
/// (floor(log2(1 + t))), "floor" (floor(t)), "square" (t^2).
GaugeProbe named_probe(const std::string& name, double t_max, std::size_t sample_count = 100000);

/// tau_n = sup{t <= t_max : psi(t) < n} for n = 1..count, by scanning and
/// bisecting on the last sign change. Throws MinorantError if some level is
/// not reached before t_max.
std::vector<double> level_crossings(const GaugeProbe& probe, std::size_t count);

/// Polygonal concave-for-large-t minorant of psi with vertices (t_n, n),
/// n = 0..n_max: t_0 = tau_1, t_1 = max(tau_2, t_0 + delta),
/// t_{n+1} = max(tau_{n+2}, 2 t_n - t_{n-1}). The tail slope beyond t_{n_max}
/// is lowered where needed to stay under psi on the probe samples.
EventuallyConcaveGauge concave_minorant(const GaugeProbe& probe, std::size_t n_max,
                                        double delta = 1.0);

}  // namespace bmo
