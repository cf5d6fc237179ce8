#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bmophi/gauge.hpp"
#include "bmophi/grid.hpp"

namespace bmo {

/// Ball of a finite quasi-metric space: points y with d(center, y) < radius.
struct Ball {
    std::size_t center = 0;
    double radius = 0.0;
    auto operator<=>(const Ball&) const = default;
};

/// A region a norm is taken over. Ordering is the canonical tie-break order.
using Region = std::variant<Rect, RealInterval, Ball>;

std::string describe(const Region& r);

/// Distinct values of f on a region, ascending, with their masses.
/// Zero-mass entries are dropped.
struct WeightedSample {
    std::vector<double> values;
    std::vector<double> weights;
    double total = 0.0;

    static WeightedSample from_pairs(std::vector<std::pair<double, double>> value_weight);

    bool empty() const { return values.empty(); }
    bool constant() const { return values.size() == 1; }
    double min() const { return values.front(); }
    double max() const { return values.back(); }
    double mean() const;
    /// Lower weighted median: the first value whose cumulative mass reaches total / 2.
    double median() const;
    /// (1/total) * sum_i w_i phi(|v_i - shift| / lambda).
    double gauge_average(const Gauge& g, double shift, double lambda) const;
};

WeightedSample sample(const GridFunction& f, const Rect& r, const CellMeasure& m);
WeightedSample sample(const GridFunction& f, const RealInterval& iv, const CellMeasure& m);

struct LuxemburgResult {
    double lambda = 0.0;
    int iterations = 0;
};

/// inf{lambda > 0 : avg phi(|v - shift| / lambda) <= 1}, by bracket doubling
/// and a bracketing root solve to relative width 1e-10. Returns the lower end
/// of the final bracket, so the constraint holds at lambda * (1 + 1e-10).
LuxemburgResult luxemburg(const WeightedSample& s, const Gauge& g, double shift = 0.0);

double luxemburg_norm(const GridFunction& f, const Rect& r, const Gauge& g, const CellMeasure& m);
double luxemburg_norm(const GridFunction& f, const RealInterval& iv, const Gauge& g, const CellMeasure& m);

enum class Centering { AtMean, InfC };

struct Oscillation {
    double value = 0.0;
    double center = 0.0;
};

/// AtMean: avg |f - f_r| with center f_r. InfC: min over c of avg |f - c|,
/// attained at the weighted median.
Oscillation osc_l1(const WeightedSample& s, Centering centering);

struct GaugeOscillation {
    double value = 0.0;
    double center = 0.0;
    std::size_t candidates = 0;
    std::size_t solves = 0;
    /// Largest gap between consecutive scanned centers.
    double scan_resolution = 0.0;
};

/// min over c of the Luxemburg average of |f - c|. Scans every sample value
/// plus 64 uniform fill points, then refines by golden section between the
/// neighbours of the best scanned center to width 1e-9 * range.
GaugeOscillation osc_gauge_infc(const WeightedSample& s, const Gauge& g);

enum class Mode { MeanCentered, InfC, GaugeInfC, CzCenter, KPhi };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Per-region value for one mode; `lambda` is the Luxemburg value when a
/// gauge is involved.
struct RegionValue {
    double value = 0.0;
    double center = 0.0;
    double lambda = 0.0;
    std::size_t solves = 0;
    std::size_t candidates = 0;
    double scan_resolution = 0.0;
};

RegionValue evaluate(const WeightedSample& s, const Gauge* g, Mode mode);

class RegionFamily {
public:
    enum class Kind { DyadicCubes, AllGridCubes, AllGridRects, MuDyadic };

    static RegionFamily dyadic(const GridDomain& d, const DyadicCube& base = {});
    /// Every grid-aligned cube inside `base` (every interval in 1-D).
    static RegionFamily all_cubes(const GridDomain& d, std::optional<Rect> base = std::nullopt);
    static RegionFamily all_rects(const GridDomain& d, std::optional<Rect> base = std::nullopt);
    static RegionFamily mu_dyadic(const MuDyadicTree& tree);

    Kind kind() const { return kind_; }
    const std::vector<Region>& regions() const { return regions_; }
    std::size_t size() const { return regions_.size(); }

private:
    Kind kind_ = Kind::DyadicCubes;
    std::vector<Region> regions_;
};

std::string to_string(RegionFamily::Kind k);

using SampleSource = std::function<WeightedSample(const Region&)>;

/// Sample source for grid regions (Rect or RealInterval).
SampleSource grid_source(const GridFunction& f, const CellMeasure& m);

struct NormReport {
    double value = 0.0;
    Region witness = Rect{};
    double c_opt = 0.0;
    double lambda_opt = 0.0;
    Mode mode = Mode::InfC;
    std::string family;
    std::string gauge;
    struct Diagnostics {
        std::size_t regions = 0;
        std::size_t evaluated = 0;
        std::size_t pruned = 0;
        std::size_t luxemburg_solves = 0;
        std::size_t scan_candidates = 0;
        double max_scan_resolution = 0.0;
    } diagnostics;
};

struct NormOptions {
    /// Skip a region when a direct evaluation of the defining inequality at
    /// its median already shows its value is strictly below the running max.
    bool prune = true;
};

/// Supremum of the chosen per-region oscillation over `regions`; ties go to
/// the lexicographically smallest region.
NormReport norm_sup(const std::vector<Region>& regions, const SampleSource& source, const Gauge* g, Mode mode,
                    const NormOptions& opts = {});

NormReport norm_sup(const GridFunction& f, const RegionFamily& fam, const Gauge* g, const CellMeasure& m, Mode mode,
                    const NormOptions& opts = {});

/// sup over grid-aligned subcubes J of base of avg_J phi(|f - f_J|).
double k_phi(const GridFunction& f, const Rect& base, const Gauge& g, const CellMeasure& m);

}  // namespace bmo
