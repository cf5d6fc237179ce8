#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "bmophi/grid.hpp"

namespace bmo {

/// Axis-parallel box with real corners in cell units: [lo0, hi0] x [lo1, hi1].
struct RealBox {
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};

    double side(int axis) const { return hi[axis] - lo[axis]; }
    double area() const { return side(0) * side(1); }
    /// Interiors intersect.
    bool overlaps(const RealBox& o) const;
    bool covers_cell(std::size_t i0, std::size_t i1) const;
    auto operator<=>(const RealBox&) const = default;
};

using Piece = std::variant<Rect, RealInterval, RealBox>;

struct SelectedRegion {
    Piece region;
    double average = 0.0;
    double mass = 0.0;
};

struct CZResult {
    std::vector<SelectedRegion> selected;
    /// Per domain cell: 1 when part of the cell inside the base lies outside
    /// every selected region (and outside unresolved tree leaves).
    std::vector<std::uint8_t> good_mask;
    double height = 0.0;
    Piece base;
    double base_mass = 0.0;
    double base_average = 0.0;
    double selected_mass = 0.0;
    /// sum of mu(selected) / mu(base).
    double mass_ratio = 0.0;
    /// max over selected regions of average / height.
    double max_ratio = 0.0;
    /// Mass of leaves that straddle cells and were never resolved (tree variant only).
    double unresolved_mass = 0.0;
};

/// Dyadic Calderon-Zygmund decomposition of g >= 0 inside `base` at height L:
/// the maximal dyadic subcubes with average > L, down to single cells.
/// Throws PreconditionError when the base average exceeds L.
CZResult cz_dyadic(const GridFunction& g, const DyadicCube& base, double L, const CellMeasure& m);

/// Same stopping time over the nodes of a mu-dyadic tree (1-D); selected
/// averages are at most 2L because children carry half the parent mass.
CZResult cz_mu_dyadic(const GridFunction& g, const MuDyadicTree& tree, double L, const CellMeasure& m);

/// Rising sun: maximal disjoint closed intervals of R on which h averages
/// exactly lambda, with h <= lambda off their union. Requires lambda > avg_R h.
CZResult rising_sun_1d(const GridFunction& h, const RealInterval& R, double lambda, const CellMeasure& m);

struct BesicovitchFamilies {
    /// Indices into CZResult::selected; each inner list is pairwise disjoint.
    std::vector<std::vector<std::size_t>> families;
    std::size_t family_count() const { return families.size(); }
    /// Largest number of selected cubes sharing an interior point (sampled
    /// at cell centers and cube corners).
    std::size_t max_overlap = 0;
    std::size_t bound = 0;
    bool within_bound() const { return families.size() <= bound; }
};

struct BczResult {
    CZResult cz;
    BesicovitchFamilies families;
};

/// Besicovitch-Calderon-Zygmund decomposition of g >= 0 on a grid-aligned
/// square `base` (2-D) at height L: cubes inside the base around bad cells,
/// each with average exactly L, split into disjoint families.
BczResult bcz_2d(const GridFunction& g, const Rect& base, double L, const CellMeasure& m,
                 std::size_t family_bound = 20);

/// Average of g over a real box (cell units) under m.
double box_average(const GridFunction& g, const RealBox& b, const CellMeasure& m);

}  // namespace bmo
