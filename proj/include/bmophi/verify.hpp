#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bmophi/decomposition.hpp"
#include "bmophi/gauge.hpp"
#include "bmophi/grid.hpp"
#include "bmophi/io.hpp"
#include "bmophi/oscillation.hpp"
#include "bmophi/sht.hpp"

namespace bmo {

// ---------------------------------------------------------------------------
// corpora

enum class Generator { StepDyadic, LogCusp, RandomBounded, CheckerRect };

std::string to_string(Generator g);
Generator generator_from_string(const std::string& s);

struct GeneratorParams {
    /// Cusp location as a fraction of the domain side (both axes in 2-D).
    double x0 = 1.0 / 3.0;
    double x1 = 1.0 / 3.0;
    double amplitude = 1.0;
};

/// Seeded test functions:
///   StepDyadic    random Haar martingale, coefficients N(0, 1) at every scale
///   LogCusp       log(1 / |x - x0|) at cell centers
///   RandomBounded iid uniform in [-amplitude, amplitude]
///   CheckerRect   sum of a few long thin rectangles (2-D; 1-D gets short steps)
GridFunction generate(Generator gen, const GridDomain& d, std::uint64_t seed, const GeneratorParams& p = {});

enum class MeasureKind { Uniform, Random, NonDoubling, Density2x };

std::string to_string(MeasureKind k);
MeasureKind measure_kind_from_string(const std::string& s);

/// Random: log-uniform weights with max/min <= range. NonDoubling: log-uniform
/// weights with max/min == range exactly and neighbouring cells far apart.
/// Density2x: 1-D density 2x on [0, 1) with exact in-cell profile.
CellMeasure generate_measure(MeasureKind k, const GridDomain& d, std::uint64_t seed, double range = 1e6);

struct Instance {
    std::string name;
    Generator generator = Generator::RandomBounded;
    MeasureKind measure = MeasureKind::Uniform;
    std::uint64_t seed = 0;
    GridFunction f;
    CellMeasure m;
};

struct CorpusSpec {
    int dim = 1;
    std::size_t cells = 1024;
    std::size_t count = 8;
    std::uint64_t seed = 1;
    /// Measures are cycled; an empty list means uniform only.
    std::vector<MeasureKind> measures;
    double range = 1e6;
    /// Generators are cycled; an empty list means every generator.
    std::vector<Generator> generators;
};

std::vector<Instance> make_corpus(const CorpusSpec& spec);

/// n random points of the unit square with d = |x - y|^p and kappa = 2^(p - 1);
/// log-uniform weights with max/min <= weight_range.
FiniteSHT random_plane_sht(std::size_t n, double p, std::uint64_t seed, double weight_range = 100.0);

struct SpaceInstance {
    std::string name;
    FiniteSHT space;
    std::vector<double> f;
};

/// Sizes drawn from [8, max_points], exponents from [1, 2].
std::vector<SpaceInstance> make_sht_corpus(std::size_t count, std::size_t max_points, std::uint64_t seed);

// ---------------------------------------------------------------------------
// constants

/// 2 phi^-1(4) + phi^-1(2 + 2^(n + 2)).
double main_constant(const Gauge& g, int dim);
/// 2 phi^-1(4) + phi^-1(10).
double nondoubling_constant(const Gauge& g);
/// 2 phi^-1(2B) + phi^-1(4B + 2).
double besicovitch_constant(const Gauge& g, double B);
/// 2 phi^-1(L) + max(t0, phi^-1(phi(2 t0) + 2^(n + 1) L + 4)) at L = 4, for a
/// gauge vanishing on [0, t0] and concave after it.
double general_threshold(const EventuallyConcaveGauge& phi, int dim);

// ---------------------------------------------------------------------------
// reports

struct ReportRow {
    std::string instance;
    std::string check;
    /// Theorem-backed inequality (true) or labelled diagnostic (false).
    bool asserted = true;
    double lhs = 0.0;
    double rhs = 0.0;
    std::optional<double> constant;
    std::optional<double> ratio;
    /// (rhs - lhs) / scale for lhs <= rhs checks; the failure margin otherwise.
    double slack = 0.0;
    bool pass = true;
    std::string note;
};

struct TheoremReport {
    std::string suite;
    double tolerance = 1e-7;
    Json params = Json::object();
    std::vector<ReportRow> rows;

    /// lhs <= rhs up to tol * max(|lhs|, |rhs|).
    ReportRow& leq(const std::string& instance, const std::string& check, double lhs, double rhs,
                   std::optional<double> tol = std::nullopt);
    /// lhs < rhs, strictly.
    ReportRow& less(const std::string& instance, const std::string& check, double lhs, double rhs);
    /// |lhs - rhs| <= tol * max(1, |lhs|, |rhs|).
    ReportRow& equal(const std::string& instance, const std::string& check, double lhs, double rhs, double tol);
    ReportRow& holds(const std::string& instance, const std::string& check, bool ok, const std::string& note = {});
    ReportRow& diagnostic(const std::string& instance, const std::string& check, double lhs, double rhs,
                          const std::string& note = {});

    bool passed() const;
    std::size_t asserted_count() const;
    std::size_t violations() const;
    /// Largest ratio among rows with the given check name (0 when none).
    double max_ratio(const std::string& check) const;
    std::size_t count(const std::string& check) const;
    bool passed(const std::string& check) const;
    /// Rows sorted by instance name; insertion order within an instance.
    void canonicalize();
    void merge(const TheoremReport& other);

    Json to_json() const;
    std::string to_csv() const;
};

struct VerifyOptions {
    /// Additive slack for the upper bounds, relative to the larger side.
    double tol = 1e-7;
    /// Slack for the Jensen (lower) sides.
    double lower_tol = 1e-8;
    /// Skip the all-cubes diagnostic when the family exceeds this size.
    std::size_t diagnostic_family_limit = 50000;
};

/// Lower bound per dyadic region, upper bound for the dyadic-restricted norms.
TheoremReport verify_thm_main(const std::vector<Instance>& corpus, const Gauge& g, const VerifyOptions& o = {});

struct GeneralOptions {
    std::size_t levels = 12;
    double delta = 1.0;
    std::size_t domination_samples = 10000;
};

/// Concave minorant phi of psi, phi-norm <= psi-norm, and the dyadic upper
/// bound for phi with the proof-following threshold.
TheoremReport verify_thm_general(const GaugeProbe& probe, const std::vector<Instance>& corpus,
                                 const VerifyOptions& o = {}, const GeneralOptions& go = {});

/// mu-dyadic family on 1-D instances with arbitrary cell measures.
TheoremReport verify_thm_nondoubling_1d(const std::vector<Instance>& corpus, const Gauge& g,
                                        const VerifyOptions& o = {});

/// Rectangles in 2-D. A ceiling of 0 selects main_constant(g, 2).
TheoremReport verify_thm_rect(const std::vector<Instance>& corpus, const Gauge& g, double ceiling = 0.0,
                              const VerifyOptions& o = {});

TheoremReport verify_sht(const std::vector<SpaceInstance>& corpus, const Gauge& g, const VerifyOptions& o = {});

/// cz_dyadic on every instance, rising_sun_1d on 1-D instances and bcz_2d on
/// 2-D instances, at every height of the schedule. g = phi(|f - c_Q| / ||f - c_Q||),
/// so the root phi-average is at most 1.
TheoremReport verify_decompositions(const std::vector<Instance>& corpus, const Gauge& g,
                                    const std::vector<double>& schedule, const VerifyOptions& o = {});

/// Random ball families on random plane spaces.
TheoremReport verify_vitali(std::size_t families, std::size_t max_points, std::uint64_t seed);

/// Equal-mass children on random densities, density-2x split points, and
/// the 2L bound of CZ over the tree.
TheoremReport verify_mu_grid(std::size_t densities, std::uint64_t seed);

/// Luxemburg closed forms on random (f, region) pairs and the gauge infimum
/// against a brute-force (c, lambda) scan.
TheoremReport verify_solvers(std::size_t pairs, std::size_t scans, std::uint64_t seed);

// ---------------------------------------------------------------------------
// checkers shared by the suites

/// Bullet properties of a dyadic CZ result; `lebesgue` adds the 2^n L cap.
void check_cz(TheoremReport& rep, const std::string& instance, const GridFunction& g, const CellMeasure& m,
              double L, const CZResult& r, bool lebesgue, bool brute_force);
void check_rising_sun(TheoremReport& rep, const std::string& instance, const GridFunction& h,
                      const RealInterval& R, double lambda, const CellMeasure& m, const CZResult& r);
void check_bcz(TheoremReport& rep, const std::string& instance, const GridFunction& g, const CellMeasure& m,
               double L, const BczResult& r);

/// Maximal dyadic subcubes with average > L, by enumerating every dyadic cube.
std::vector<Rect> brute_force_cz(const GridFunction& g, const CellMeasure& m, double L);

/// min over c of inf{lambda : avg psi(|v - c| / lambda) <= 1} for an arbitrary
/// psi: c over every sample value plus 64 fill points, lambda over a geometric
/// grid (ratio 1.035) followed by bisection. Reports the best feasible point.
double probe_oscillation(const WeightedSample& s, const GaugeProbe& probe);

/// Brute-force oracle for osc_gauge_infc: 4000 uniform centers plus every
/// sample value, each solved by plain bisection in lambda.
double gauge_infc_scan(const WeightedSample& s, const Gauge& g);

}  // namespace bmo
