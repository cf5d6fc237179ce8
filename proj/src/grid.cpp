#include "bmophi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bmophi/errors.hpp"

namespace bmo {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// domain, regions

GridDomain::GridDomain(int dim, std::size_t cells_per_side, double side, std::array<double, 2> origin)
    : dim_(dim), n_(cells_per_side), side_(side), origin_(origin) {
    if (dim != 1 && dim != 2) throw ContractError("grid dimension must be 1 or 2");
    if (cells_per_side < 2 || !is_power_of_two(cells_per_side))
        throw ContractError("cells per side must be a power of two >= 2");
    if (!(side > 0.0)) throw ContractError("grid side length must be positive");
    levels_ = 0;
    while ((std::size_t{1} << levels_) < n_) ++levels_;
}

Rect Rect::whole(const GridDomain& d) {
    return d.dim() == 1 ? interval(0, d.n()) : box(0, d.n(), 0, d.n());
}

Rect DyadicCube::rect(const GridDomain& d) const {
    const std::size_t side = d.n() >> level;
    if (d.dim() == 1) return Rect::interval(index[0] * side, (index[0] + 1) * side);
    return Rect::box(index[0] * side, (index[0] + 1) * side, index[1] * side, (index[1] + 1) * side);
}

std::vector<DyadicCube> DyadicCube::children(int dim) const {
    std::vector<DyadicCube> out;
    if (dim == 1) {
        for (std::size_t a = 0; a < 2; ++a) out.push_back({level + 1, {2 * index[0] + a, 0}});
    } else {
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) out.push_back({level + 1, {2 * index[0] + a, 2 * index[1] + b}});
    }
    return out;
}

std::vector<DyadicCube> dyadic_subcubes(const GridDomain& d, const DyadicCube& base) {
    if (base.level > d.levels()) throw ContractError("dyadic cube finer than a single cell");
    std::vector<DyadicCube> out{base};
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].level == d.levels()) continue;
        for (const auto& c : out[i].children(d.dim())) out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// measure and function

CellMeasure::CellMeasure(GridDomain domain, std::vector<double> weights)
    : domain_(domain), weights_(std::move(weights)) {
    if (weights_.size() != domain_.cell_count()) throw ContractError("measure: one weight per cell expected");
    total_ = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ContractError("measure: weights must be finite and nonnegative");
        total_ += w;
    }
    if (!(total_ > 0.0)) throw ContractError("measure: total mass must be positive");
}

CellMeasure::CellMeasure(GridDomain domain, std::vector<double> weights, std::vector<double> slopes)
    : CellMeasure(domain, std::move(weights)) {
    if (domain_.dim() != 1) throw ContractError("measure: in-cell slopes are supported in 1-D only");
    if (slopes.size() != weights_.size()) throw ContractError("measure: one slope per cell expected");
    for (double s : slopes)
        if (!(std::abs(s) <= 2.0)) throw ContractError("measure: in-cell slope must lie in [-2, 2]");
    if (std::any_of(slopes.begin(), slopes.end(), [](double s) { return s != 0.0; })) slopes_ = std::move(slopes);
}

CellMeasure CellMeasure::uniform(const GridDomain& d) {
    const double vol = d.dim() == 1 ? d.cell_width() : d.cell_width() * d.cell_width();
    return CellMeasure(d, std::vector<double>(d.cell_count(), vol));
}

double CellMeasure::piece_mass(std::size_t cell, double u, double v) const {
    const double w = weights_[cell];
    if (slopes_.empty()) return w * (v - u);
    return w * (v - u) * (1.0 + slopes_[cell] * (0.5 * (u + v) - 0.5));
}

double CellMeasure::locate(std::size_t cell, double m) const {
    const double w = weights_[cell];
    if (!(w > 0.0)) return 0.0;
    const double q = m / w;
    double u;
    const double s = slope(cell);
    if (s == 0.0) {
        u = q;
    } else {
        // (s/2) u^2 + (1 - s/2) u - q = 0, root in [0, 1], cancellation-free form.
        const double b = 1.0 - 0.5 * s;
        u = 2.0 * q / (b + std::sqrt(b * b + 2.0 * s * q));
    }
    return std::clamp(u, 0.0, 1.0);
}

GridFunction::GridFunction(GridDomain domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
    if (values_.size() != domain_.cell_count()) throw ContractError("grid function: one value per cell expected");
    for (double v : values_)
        if (!std::isfinite(v)) throw ContractError("grid function: values must be finite");
}

// ---------------------------------------------------------------------------
// prefix sums

PrefixTable::PrefixTable(const GridDomain& d, std::span<const double> cell_values)
    : dim_(d.dim()), n_(d.n()) {
    if (cell_values.size() != d.cell_count()) throw ContractError("prefix table: size mismatch");
    if (dim_ == 1) {
        stride_ = 1;
        table_.assign(n_ + 1, 0.0);
        for (std::size_t i = 0; i < n_; ++i) table_[i + 1] = table_[i] + cell_values[i];
    } else {
        stride_ = n_ + 1;
        table_.assign((n_ + 1) * (n_ + 1), 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                row += cell_values[i * n_ + j];
                table_[(i + 1) * stride_ + (j + 1)] = table_[i * stride_ + (j + 1)] + row;
            }
        }
    }
}

double PrefixTable::sum(const Rect& r) const {
    if (dim_ == 1) return table_[r.hi[0]] - table_[r.lo[0]];
    return at(r.hi[0], r.hi[1]) - at(r.lo[0], r.hi[1]) - at(r.hi[0], r.lo[1]) + at(r.lo[0], r.lo[1]);
}

double PrefixTable::cumulative(double x0, double x1) const {
    const double nn = static_cast<double>(n_);
    x0 = std::clamp(x0, 0.0, nn);
    const auto i = std::min(static_cast<std::size_t>(x0), n_ - 1);
    const double fx = x0 - static_cast<double>(i);
    if (dim_ == 1) return (1.0 - fx) * table_[i] + fx * table_[i + 1];
    x1 = std::clamp(x1, 0.0, nn);
    const auto j = std::min(static_cast<std::size_t>(x1), n_ - 1);
    const double fy = x1 - static_cast<double>(j);
    return (1.0 - fx) * (1.0 - fy) * at(i, j) + fx * (1.0 - fy) * at(i + 1, j) + (1.0 - fx) * fy * at(i, j + 1) +
           fx * fy * at(i + 1, j + 1);
}

double PrefixTable::sum(double a0, double b0, double a1, double b1) const {
    if (dim_ == 1) return cumulative(b0) - cumulative(a0);
    return cumulative(b0, b1) - cumulative(a0, b1) - cumulative(b0, a1) + cumulative(a0, a1);
}

Integrator::Integrator(const GridFunction& f, const CellMeasure& m) {
    if (!(f.domain() == m.domain())) throw ContractError("integrator: function and measure live on different grids");
    std::vector<double> fw(f.values().size());
    for (std::size_t i = 0; i < fw.size(); ++i) fw[i] = f[i] * m.weight(i);
    fw_ = PrefixTable(f.domain(), fw);
    w_ = PrefixTable(f.domain(), m.weights());
}

double Integrator::average(const Rect& r) const {
    const double mu = mass(r);
    if (!(mu > 0.0)) throw ContractError("average over a region of zero measure");
    return integral(r) / mu;
}

double integrate(const GridFunction& f, const Rect& r, const CellMeasure& m) {
    if (r.cell_count() == 0) throw ContractError("integrate: empty region");
    const auto& d = f.domain();
    double s = 0.0;
    if (d.dim() == 1) {
        for (std::size_t i = r.lo[0]; i < r.hi[0]; ++i) s += f[i] * m.weight(i);
    } else {
        for (std::size_t i = r.lo[0]; i < r.hi[0]; ++i)
            for (std::size_t j = r.lo[1]; j < r.hi[1]; ++j) s += f[d.index(i, j)] * m.weight(d.index(i, j));
    }
    return s;
}

// ---------------------------------------------------------------------------
// real intervals (1-D)

CellPoint to_cell_point(double position, std::size_t n) {
    const double nn = static_cast<double>(n);
    position = std::clamp(position, 0.0, nn);
    if (position >= nn) return {static_cast<std::int64_t>(n), 0.0};
    const double c = std::floor(position);
    return {static_cast<std::int64_t>(c), position - c};
}

namespace {

struct Piece {
    std::size_t cell;
    double u;
    double v;
};

template <class Fn>
void for_each_piece(const RealInterval& iv, Fn&& fn) {
    if (iv.hi <= iv.lo) return;
    const std::int64_t last = iv.hi.frac > 0.0 ? iv.hi.cell : iv.hi.cell - 1;
    for (std::int64_t c = iv.lo.cell; c <= last; ++c) {
        const double u = c == iv.lo.cell ? iv.lo.frac : 0.0;
        const double v = c == iv.hi.cell ? iv.hi.frac : 1.0;
        fn(Piece{static_cast<std::size_t>(c), u, v});
    }
}

void check_interval(const RealInterval& iv, const CellMeasure& m) {
    if (m.domain().dim() != 1) throw ContractError("real intervals live on 1-D grids");
    const auto n = static_cast<std::int64_t>(m.domain().n());
    if (iv.lo.cell < 0 || iv.hi.cell > n || (iv.hi.cell == n && iv.hi.frac != 0.0))
        throw ContractError("interval outside the domain");
    if (!(iv.lo < iv.hi)) throw ContractError("empty interval");
}

CellPoint normalized(std::size_t cell, double u) {
    if (u >= 1.0) return {static_cast<std::int64_t>(cell) + 1, 0.0};
    return {static_cast<std::int64_t>(cell), u};
}

}  // namespace

double mass(const CellMeasure& m, const RealInterval& iv) {
    check_interval(iv, m);
    double s = 0.0;
    for_each_piece(iv, [&](const Piece& p) { s += m.piece_mass(p.cell, p.u, p.v); });
    return s;
}

double integrate(const GridFunction& f, const RealInterval& iv, const CellMeasure& m) {
    check_interval(iv, m);
    double s = 0.0;
    for_each_piece(iv, [&](const Piece& p) { s += f[p.cell] * m.piece_mass(p.cell, p.u, p.v); });
    return s;
}

CellPoint mu_dyadic_split(const RealInterval& iv, const CellMeasure& m) {
    const double total = mass(m, iv);
    if (!(total > 0.0)) throw ContractError("mu-dyadic split of an interval with zero mass");
    const double target = 0.5 * total;
    const double tol = 1e-15 * total;
    const std::int64_t last = iv.hi.frac > 0.0 ? iv.hi.cell : iv.hi.cell - 1;
    double acc = 0.0;
    for (std::int64_t c = iv.lo.cell; c <= last; ++c) {
        const auto cell = static_cast<std::size_t>(c);
        const double u = c == iv.lo.cell ? iv.lo.frac : 0.0;
        const double v = c == iv.hi.cell ? iv.hi.frac : 1.0;
        const double pm = m.piece_mass(cell, u, v);
        if (acc + pm < target - tol) {
            acc += pm;
            continue;
        }
        if (acc + pm <= target + tol) {
            // Half mass reached at the end of this piece: walk across the
            // massless stretch that follows and return its right end.
            CellPoint x = normalized(cell, v);
            for (std::int64_t k = c + 1; k <= last; ++k) {
                const auto kc = static_cast<std::size_t>(k);
                const double kv = k == iv.hi.cell ? iv.hi.frac : 1.0;
                if (m.piece_mass(kc, 0.0, kv) > 0.0) break;
                x = normalized(kc, kv);
            }
            return std::min(x, iv.hi);
        }
        const double before = m.piece_mass(cell, 0.0, u);
        const double x = m.locate(cell, before + (target - acc));
        return normalized(cell, std::clamp(x, u, v));
    }
    return iv.hi;
}

MuDyadicTree MuDyadicTree::build(const RealInterval& root, const CellMeasure& m, int depth,
                                 bool stop_at_single_cell) {
    if (depth < 0 || depth > kMaxDepth) {
        std::ostringstream os;
        os << "mu-dyadic tree depth must lie in [0, " << kMaxDepth << "]";
        throw ContractError(os.str());
    }
    MuDyadicTree t;
    t.depth_ = depth;
    const double root_mass = mass(m, root);
    if (!(root_mass > 0.0)) throw ContractError("mu-dyadic tree over an interval with zero mass");
    t.nodes_.push_back(Node{root, root_mass, 0, -1, -1, -1});
    for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
        const Node cur = t.nodes_[i];
        if (cur.depth >= depth) continue;
        if (stop_at_single_cell && cur.interval.single_cell()) continue;
        const CellPoint x = mu_dyadic_split(cur.interval, m);
        const RealInterval li{cur.interval.lo, x};
        const RealInterval ri{x, cur.interval.hi};
        if (!(li.lo < li.hi) || !(ri.lo < ri.hi))
            throw std::logic_error("mu-dyadic tree: degenerate child; the node has no interior mass split");
        const double lm = mass(m, li);
        const double rm = mass(m, ri);
        if (!(lm > 0.0) || !(rm > 0.0)) throw std::logic_error("mu-dyadic tree: zero-mass node before target depth");
        const int li_idx = static_cast<int>(t.nodes_.size());
        t.nodes_.push_back(Node{li, lm, cur.depth + 1, -1, -1, static_cast<int>(i)});
        t.nodes_.push_back(Node{ri, rm, cur.depth + 1, -1, -1, static_cast<int>(i)});
        t.nodes_[i].left = li_idx;
        t.nodes_[i].right = li_idx + 1;
    }
    return t;
}

}  // namespace bmo
