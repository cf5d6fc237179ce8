#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bmo {

/// A cube of side `side` at `origin`, split into cells_per_side^dim equal cells.
/// Cell (i0, i1) has flat index i0 * n + i1; axis 0 is the row axis.
class GridDomain {
public:
    GridDomain() = default;
    GridDomain(int dim, std::size_t cells_per_side, double side = 1.0, std::array<double, 2> origin = {0.0, 0.0});

    int dim() const { return dim_; }
    std::size_t n() const { return n_; }
    std::size_t cell_count() const { return dim_ == 1 ? n_ : n_ * n_; }
    /// log2(cells_per_side).
    int levels() const { return levels_; }
    double side() const { return side_; }
    double cell_width() const { return side_ / static_cast<double>(n_); }
    const std::array<double, 2>& origin() const { return origin_; }
    std::size_t index(std::size_t i0, std::size_t i1 = 0) const { return dim_ == 1 ? i0 : i0 * n_ + i1; }

    bool operator==(const GridDomain&) const = default;

private:
    int dim_ = 1;
    std::size_t n_ = 2;
    int levels_ = 1;
    double side_ = 1.0;
    std::array<double, 2> origin_{0.0, 0.0};
};

/// Axis-parallel block of whole cells, half-open ranges [lo, hi) per axis.
/// In 1-D only axis 0 is used and axis 1 is fixed to [0, 1).
struct Rect {
    std::array<std::size_t, 2> lo{0, 0};
    std::array<std::size_t, 2> hi{1, 1};

    std::size_t extent(int axis) const { return hi[axis] - lo[axis]; }
    std::size_t cell_count() const { return extent(0) * extent(1); }
    bool contains(const Rect& o) const {
        return lo[0] <= o.lo[0] && o.hi[0] <= hi[0] && lo[1] <= o.lo[1] && o.hi[1] <= hi[1];
    }
    bool is_cube() const { return extent(0) == extent(1); }
    auto operator<=>(const Rect&) const = default;

    static Rect interval(std::size_t lo, std::size_t hi) { return Rect{{lo, 0}, {hi, 1}}; }
    static Rect box(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) { return Rect{{r0, c0}, {r1, c1}}; }
    static Rect whole(const GridDomain& d);
};

/// Dyadic cube of the domain: level l has 2^l cubes per axis.
struct DyadicCube {
    int level = 0;
    std::array<std::size_t, 2> index{0, 0};

    Rect rect(const GridDomain& d) const;
    std::vector<DyadicCube> children(int dim) const;
    auto operator<=>(const DyadicCube&) const = default;
};

/// All dyadic cubes of `base` down to single cells, parents before children.
std::vector<DyadicCube> dyadic_subcubes(const GridDomain& d, const DyadicCube& base = {});

class CellMeasure {
public:
    CellMeasure() = default;
    CellMeasure(GridDomain domain, std::vector<double> weights);
    /// 1-D only: density inside cell k is proportional to 1 + slopes[k] * (u - 1/2),
    /// u in [0, 1] the local coordinate, |slope| <= 2. The cell mass is still weights[k].
    CellMeasure(GridDomain domain, std::vector<double> weights, std::vector<double> slopes);

    /// Lebesgue measure: every cell weighs its volume.
    static CellMeasure uniform(const GridDomain& d);

    const GridDomain& domain() const { return domain_; }
    const std::vector<double>& weights() const { return weights_; }
    double weight(std::size_t cell) const { return weights_[cell]; }
    double total() const { return total_; }
    bool piecewise_constant() const { return slopes_.empty(); }
    double slope(std::size_t cell) const { return slopes_.empty() ? 0.0 : slopes_[cell]; }

    /// Mass of the local piece [u, v] of cell `cell` (1-D).
    double piece_mass(std::size_t cell, double u, double v) const;
    /// Local coordinate u with piece_mass(cell, 0, u) == m; flat cells map to 0.
    double locate(std::size_t cell, double m) const;

private:
    GridDomain domain_;
    std::vector<double> weights_;
    std::vector<double> slopes_;
    double total_ = 0.0;
};

class GridFunction {
public:
    GridFunction() = default;
    GridFunction(GridDomain domain, std::vector<double> values);

    const GridDomain& domain() const { return domain_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t cell) const { return values_[cell]; }

private:
    GridDomain domain_;
    std::vector<double> values_;
};

/// Summed-area table over the cells of a domain: O(1) block sums.
class PrefixTable {
public:
    PrefixTable() = default;
    PrefixTable(const GridDomain& d, std::span<const double> cell_values);

    double sum(const Rect& r) const;
    /// Cumulative integral up to the real point (x0, x1) in cell units; the
    /// bilinear interpolant of the table, exact for piecewise-constant data.
    double cumulative(double x0, double x1 = 0.0) const;
    /// Sum over a real box [a0, b0) x [a1, b1) in cell units.
    double sum(double a0, double b0, double a1 = 0.0, double b1 = 1.0) const;

private:
    double at(std::size_t i0, std::size_t i1) const { return table_[i0 * stride_ + i1]; }
    int dim_ = 1;
    std::size_t n_ = 0;
    std::size_t stride_ = 1;
    std::vector<double> table_;
};

/// Exact integrals of a GridFunction against a CellMeasure over cell blocks.
class Integrator {
public:
    Integrator(const GridFunction& f, const CellMeasure& m);

    double integral(const Rect& r) const { return fw_.sum(r); }
    double mass(const Rect& r) const { return w_.sum(r); }
    double average(const Rect& r) const;
    const PrefixTable& integral_table() const { return fw_; }
    const PrefixTable& mass_table() const { return w_; }

private:
    PrefixTable fw_;
    PrefixTable w_;
};

double integrate(const GridFunction& f, const Rect& r, const CellMeasure& m);

/// A point of a 1-D domain in cell-local form: cell index plus local offset
/// in [0, 1). The right end of the domain is {n, 0}. Local form keeps deep
/// mu-dyadic splits accurate inside heavy cells.
struct CellPoint {
    std::int64_t cell = 0;
    double frac = 0.0;

    double position() const { return static_cast<double>(cell) + frac; }
    auto operator<=>(const CellPoint&) const = default;
};

struct RealInterval {
    CellPoint lo;
    CellPoint hi;

    static RealInterval cells(std::size_t lo, std::size_t hi) {
        return {{static_cast<std::int64_t>(lo), 0.0}, {static_cast<std::int64_t>(hi), 0.0}};
    }
    /// Both endpoints inside one cell (or the right end on its boundary).
    bool single_cell() const { return lo.cell == hi.cell || (hi.cell == lo.cell + 1 && hi.frac == 0.0); }
    auto operator<=>(const RealInterval&) const = default;
};

/// Normalize a position given in cell units into cell-local form.
CellPoint to_cell_point(double position, std::size_t n);

double mass(const CellMeasure& m, const RealInterval& iv);
double integrate(const GridFunction& f, const RealInterval& iv, const CellMeasure& m);

/// Point x splitting iv into halves of equal measure. On a half-mass plateau
/// the rightmost admissible point is returned (the left child is longest).
CellPoint mu_dyadic_split(const RealInterval& iv, const CellMeasure& m);

class MuDyadicTree {
public:
    struct Node {
        RealInterval interval;
        double mass = 0.0;
        int depth = 0;
        int left = -1;
        int right = -1;
        int parent = -1;
        bool leaf() const { return left < 0; }
    };

    /// Full binary tree of the given depth (root = depth 0). With
    /// stop_at_single_cell, nodes lying inside one cell are not split further:
    /// every descendant would carry the same cell value.
    static MuDyadicTree build(const RealInterval& root, const CellMeasure& m, int depth,
                              bool stop_at_single_cell = false);

    static constexpr int kMaxDepth = 40;

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    const Node& root() const { return nodes_.front(); }
    int depth() const { return depth_; }
    std::size_t size() const { return nodes_.size(); }

private:
    std::vector<Node> nodes_;
    int depth_ = 0;
};

}  // namespace bmo
