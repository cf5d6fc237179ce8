#include "bmophi/sht.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "bmophi/errors.hpp"

namespace bmo {

FiniteSHT::FiniteSHT(std::size_t n, std::vector<double> dist, double kappa, std::vector<double> weights, double gamma)
    : n_(n), dist_(std::move(dist)), kappa_(kappa), weights_(std::move(weights)), gamma_(gamma) {
    if (n_ == 0) throw ContractError("space needs at least one point");
    if (dist_.size() != n_ * n_) throw ContractError("distance matrix must be n x n");
    if (weights_.size() != n_) throw ContractError("one weight per point is required");
    for (double v : dist_)
        if (!std::isfinite(v)) throw ContractError("distance matrix must be finite");
    if (gamma_ == 0.0) gamma_ = 2.0 * kappa_;
}

std::vector<std::size_t> FiniteSHT::members(const Ball& b) const {
    std::vector<std::size_t> out;
    for (std::size_t y = 0; y < n_; ++y)
        if (contains(b, y)) out.push_back(y);
    return out;
}

double FiniteSHT::mass(const Ball& b) const {
    double m = 0.0;
    for (std::size_t y = 0; y < n_; ++y)
        if (contains(b, y)) m += weights_[y];
    return m;
}

std::vector<double> FiniteSHT::radii(std::size_t x) const {
    std::vector<double> ds(dist_.begin() + static_cast<std::ptrdiff_t>(x * n_),
                           dist_.begin() + static_cast<std::ptrdiff_t>((x + 1) * n_));
    ds.push_back(0.0);
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < ds.size(); ++k) out.push_back(0.5 * (ds[k] + ds[k + 1]));
    out.push_back(ds.back() > 0.0 ? 2.0 * ds.back() : 1.0);
    return out;
}

std::vector<Ball> ball_family(const FiniteSHT& s) {
    std::vector<Ball> out;
    for (std::size_t x = 0; x < s.size(); ++x)
        for (double r : s.radii(x)) out.push_back({x, r});
    return out;
}

ShtValidation validate_sht(const FiniteSHT& s) {
    ShtValidation v;
    const std::size_t n = s.size();
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) {
        if (s.d(x, x) != 0.0) {
            v.failures.emplace_back("nonzero diagonal");
            ok = false;
        }
        for (std::size_t y = 0; y < n && ok; ++y) {
            if (s.d(x, y) < 0.0) {
                v.failures.emplace_back("negative distance");
                ok = false;
            } else if (s.d(x, y) != s.d(y, x)) {
                v.failures.emplace_back("asymmetric distance matrix");
                ok = false;
            } else if (x != y && s.d(x, y) == 0.0) {
                v.failures.emplace_back("distinct points at distance 0");
                ok = false;
            }
        }
    }
    for (double w : s.weights())
        if (!(w > 0.0)) {
            v.failures.emplace_back("weights must be positive");
            ok = false;
            break;
        }
    if (!(s.kappa() >= 1.0)) {
        v.failures.emplace_back("kappa must be at least 1");
        ok = false;
    }
    if (!(s.gamma() > s.kappa())) {
        v.failures.emplace_back("gamma must exceed kappa");
        ok = false;
    }
    v.structural = ok;
    if (!ok) return v;

    double kmin = 0.0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z) {
                const double den = s.d(x, z) + s.d(z, y);
                if (den > 0.0) kmin = std::max(kmin, s.d(x, y) / den);
            }
    v.kappa_min = std::max(1.0, kmin);

    double c = 1.0;
    for (std::size_t x = 0; x < n; ++x)
        for (double r : s.radii(x)) c = std::max(c, s.mass({x, 2.0 * r}) / s.mass({x, r}));
    v.doubling_constant = c;
    v.doubling_order = std::log2(c);

    v.accepted = s.kappa() >= v.kappa_min * (1.0 - 1e-12);
    if (!v.accepted) v.failures.emplace_back("declared kappa below the minimal admissible kappa");
    return v;
}

VitaliSelection vitali_select(const std::vector<Ball>& balls, const FiniteSHT& s) {
    VitaliSelection out;
    out.dilation = vitali_factor(s.kappa());
    std::vector<std::size_t> order(balls.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return balls[a].radius > balls[b].radius; });

    std::vector<std::vector<std::size_t>> pts(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i) pts[i] = s.members(balls[i]);
    std::vector<int> owner(s.size(), -1);  // admitted ball holding each point
    std::vector<std::size_t> blocker(balls.size());
    for (std::size_t i : order) {
        int hit = -1;
        for (std::size_t y : pts[i])
            if (owner[y] >= 0) {
                hit = owner[y];
                break;
            }
        if (hit >= 0) {
            blocker[i] = static_cast<std::size_t>(hit);
            continue;
        }
        out.selected.push_back(i);
        blocker[i] = i;
        for (std::size_t y : pts[i]) owner[y] = static_cast<int>(i);
    }

    // Verification on point sets.
    std::vector<int> seen(s.size(), 0);
    for (std::size_t i : out.selected)
        for (std::size_t y : pts[i])
            if (++seen[y] > 1) out.disjoint = false;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        const Ball big = dilate(balls[blocker[i]], out.dilation);
        for (std::size_t y : pts[i])
            if (!s.contains(big, y)) out.covered = false;
    }
    std::sort(out.selected.begin(), out.selected.end());
    return out;
}

RadiusLemmaReport check_radius_lemma(const FiniteSHT& s, const Ball& B, double eps) {
    if (!(eps > 0.0)) throw ContractError("radius lemma needs eps > 0");
    RadiusLemmaReport rep;
    const double kappa = s.kappa();
    rep.eps_threshold = (s.gamma() / kappa - 1.0) / vitali_factor(kappa);
    const Ball tilde = dilate(B, s.gamma());
    const double tilde_mass = s.mass(tilde);
    double worst = 1.0;
    for (std::size_t x : s.members(B)) {
        for (double r : s.radii(x)) {
            const Ball P{x, r};
            ++rep.balls_scanned;
            if (r > eps * B.radius) {
                worst = std::max(worst, tilde_mass / s.mass(P));
                continue;
            }
            const Ball star = dilate(P, vitali_factor(kappa));
            for (std::size_t y = 0; y < s.size(); ++y)
                if (s.contains(star, y) && !s.contains(tilde, y)) rep.star_contained = false;
        }
    }
    // Strict: a large ball with mu(P) equal to mu(gamma B) / L must be excluded.
    rep.L = worst > 1.0 ? std::nextafter(worst, 2.0 * worst) : 1.0;
    return rep;
}

NormReport bmo_sht(const std::vector<double>& f, const FiniteSHT& s, const Gauge* g, Mode mode,
                   const NormOptions& opts) {
    if (f.size() != s.size()) throw ContractError("one value per point is required");
    const auto balls = ball_family(s);
    std::vector<Region> regions(balls.begin(), balls.end());
    const SampleSource source = [&](const Region& r) {
        const Ball& b = std::get<Ball>(r);
        std::vector<std::pair<double, double>> vw;
        for (std::size_t y : s.members(b)) vw.emplace_back(f[y], s.weight(y));
        return WeightedSample::from_pairs(std::move(vw));
    };
    auto rep = norm_sup(regions, source, g, mode, opts);
    rep.family = "balls";
    return rep;
}

ReiterationFit reiteration_fit(const FiniteSHT& s, double exponent) {
    ReiterationFit fit;
    fit.exponent = exponent;
    const auto balls = ball_family(s);
    const std::size_t words = (s.size() + 63) / 64;
    std::vector<std::uint64_t> bits(balls.size() * words, 0);
    std::vector<double> mass(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i) {
        for (std::size_t y : s.members(balls[i])) bits[i * words + y / 64] |= std::uint64_t{1} << (y % 64);
        mass[i] = s.mass(balls[i]);
    }
    auto subset = [&](std::size_t p, std::size_t b) {
        for (std::size_t w = 0; w < words; ++w)
            if (bits[p * words + w] & ~bits[b * words + w]) return false;
        return true;
    };
    for (std::size_t b = 0; b < balls.size(); ++b)
        for (std::size_t p = 0; p < balls.size(); ++p) {
            if (!(balls[p].radius < balls[b].radius) || !subset(p, b)) continue;
            ++fit.pairs;
            const double c = mass[b] / mass[p] / std::pow(balls[b].radius / balls[p].radius, exponent);
            fit.constant = std::max(fit.constant, c);
        }
    return fit;
}

}  // namespace bmo
