#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bmophi/gauge.hpp"
#include "bmophi/oscillation.hpp"

namespace bmo {

/// Finite quasi-metric measure space. Balls are open: B(x, r) = {y : d(x, y) < r}.
class FiniteSHT {
public:
    FiniteSHT() = default;
    /// `dist` is row-major n x n. A gamma of 0 selects the default 2 * kappa.
    FiniteSHT(std::size_t n, std::vector<double> dist, double kappa, std::vector<double> weights, double gamma = 0.0);

    std::size_t size() const { return n_; }
    double d(std::size_t x, std::size_t y) const { return dist_[x * n_ + y]; }
    const std::vector<double>& dist() const { return dist_; }
    double kappa() const { return kappa_; }
    double gamma() const { return gamma_; }
    double weight(std::size_t x) const { return weights_[x]; }
    const std::vector<double>& weights() const { return weights_; }

    std::vector<std::size_t> members(const Ball& b) const;
    double mass(const Ball& b) const;
    bool contains(const Ball& b, std::size_t y) const { return d(b.center, y) < b.radius; }
    /// Radii giving every distinct ball around x: midpoints between consecutive
    /// distinct distances from x, then twice the largest distance (whole space).
    std::vector<double> radii(std::size_t x) const;

private:
    std::size_t n_ = 0;
    std::vector<double> dist_;
    double kappa_ = 1.0;
    std::vector<double> weights_;
    double gamma_ = 2.0;
};

inline Ball dilate(const Ball& b, double factor) { return {b.center, b.radius * factor}; }

/// Every (center, radius) ball of the space, ordered by center then radius.
std::vector<Ball> ball_family(const FiniteSHT& s);

struct ShtValidation {
    bool accepted = false;
    /// Symmetric, zero diagonal, nonnegative, positive weights, gamma > kappa.
    bool structural = false;
    std::vector<std::string> failures;
    /// max over triples of d(x, y) / (d(x, z) + d(z, y)).
    double kappa_min = 0.0;
    /// max over realized balls of mu(B(x, 2r)) / mu(B(x, r)).
    double doubling_constant = 0.0;
    double doubling_order = 0.0;
};

ShtValidation validate_sht(const FiniteSHT& s);

/// The Vitali dilation factor kappa (4 kappa + 1).
inline double vitali_factor(double kappa) { return kappa * (4.0 * kappa + 1.0); }

struct VitaliSelection {
    /// Indices into the input family.
    std::vector<std::size_t> selected;
    double dilation = 0.0;
    bool disjoint = true;
    /// Every input ball lies (as a point set) inside the dilation of the
    /// admitted ball that blocked it.
    bool covered = true;
};

/// Greedy by nonincreasing radius (ties by index): admit a ball iff it is
/// disjoint from every admitted ball. Both conclusions are verified on points.
VitaliSelection vitali_select(const std::vector<Ball>& balls, const FiniteSHT& s);

struct RadiusLemmaReport {
    /// Smallest L for which mu(P) <= mu(gamma B) / L forces r(P) <= eps r(B)
    /// over every realized P centered in B (any larger L also works).
    double L = 1.0;
    /// P* stays inside gamma B for every such small P.
    bool star_contained = true;
    /// eps below which the containment is guaranteed: (gamma / kappa - 1) / (kappa (4 kappa + 1)).
    double eps_threshold = 0.0;
    std::size_t balls_scanned = 0;
};

RadiusLemmaReport check_radius_lemma(const FiniteSHT& s, const Ball& B, double eps);

/// Supremum of the per-ball oscillation over ball_family(s); point masses are the weights.
NormReport bmo_sht(const std::vector<double>& f, const FiniteSHT& s, const Gauge* g, Mode mode,
                   const NormOptions& opts = {});

struct ReiterationFit {
    /// Smallest c with mu(B) / mu(P) <= c (r(B) / r(P))^D over nested realized
    /// balls P inside B with r(P) < r(B), using the doubling order D.
    double constant = 0.0;
    double exponent = 0.0;
    std::size_t pairs = 0;
};

ReiterationFit reiteration_fit(const FiniteSHT& s, double exponent);

}  // namespace bmo
