#include "bmophi/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bmophi/errors.hpp"

namespace bmo {

bool RealBox::overlaps(const RealBox& o) const {
    return lo[0] < o.hi[0] && o.lo[0] < hi[0] && lo[1] < o.hi[1] && o.lo[1] < hi[1];
}

bool RealBox::covers_cell(std::size_t i0, std::size_t i1) const {
    return lo[0] <= static_cast<double>(i0) && static_cast<double>(i0 + 1) <= hi[0] &&
           lo[1] <= static_cast<double>(i1) && static_cast<double>(i1 + 1) <= hi[1];
}

namespace {

void require_nonnegative(const GridFunction& g) {
    for (double v : g.values())
        if (v < 0.0) throw ContractError("decomposition input must be nonnegative");
}

void require_positive_height(double L) {
    if (!(L > 0.0)) throw ContractError("decomposition height must be positive");
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Pieces [u, v] of cell-local coordinates covering one cell.
using CellCover = std::vector<std::pair<double, double>>;

void add_cover(std::vector<CellCover>& cover, const RealInterval& iv) {
    const std::int64_t last = iv.hi.frac > 0.0 ? iv.hi.cell : iv.hi.cell - 1;
    for (std::int64_t c = iv.lo.cell; c <= last; ++c) {
        const double u = c == iv.lo.cell ? iv.lo.frac : 0.0;
        const double v = c == iv.hi.cell ? iv.hi.frac : 1.0;
        if (v > u) cover[static_cast<std::size_t>(c)].emplace_back(u, v);
    }
}

// True when the pieces chain from a to b without a gap.
bool chain_covers(CellCover pieces, double a, double b) {
    std::sort(pieces.begin(), pieces.end());
    double reach = a;
    for (const auto& [u, v] : pieces) {
        if (u > reach) return false;
        reach = std::max(reach, v);
        if (reach >= b) return true;
    }
    return reach >= b;
}

// Good cells of a 1-D base interval given the union of bad intervals.
std::vector<std::uint8_t> good_cells_1d(const GridDomain& d, const RealInterval& base,
                                        const std::vector<RealInterval>& bad) {
    std::vector<CellCover> cover(d.cell_count());
    for (const auto& iv : bad) add_cover(cover, iv);
    std::vector<std::uint8_t> good(d.cell_count(), 0);
    const std::int64_t last = base.hi.frac > 0.0 ? base.hi.cell : base.hi.cell - 1;
    for (std::int64_t c = base.lo.cell; c <= last; ++c) {
        const auto cell = static_cast<std::size_t>(c);
        const double a = c == base.lo.cell ? base.lo.frac : 0.0;
        const double b = c == base.hi.cell ? base.hi.frac : 1.0;
        good[cell] = chain_covers(cover[cell], a, b) ? 0 : 1;
    }
    return good;
}

void finish(CZResult& r) {
    r.selected_mass = 0.0;
    r.max_ratio = 0.0;
    for (const auto& s : r.selected) {
        r.selected_mass += s.mass;
        r.max_ratio = std::max(r.max_ratio, s.average / r.height);
    }
    r.mass_ratio = r.base_mass > 0.0 ? r.selected_mass / r.base_mass : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// dyadic

CZResult cz_dyadic(const GridFunction& g, const DyadicCube& base, double L, const CellMeasure& m) {
    require_nonnegative(g);
    require_positive_height(L);
    const auto& d = g.domain();
    const Integrator integ(g, m);
    const Rect root = base.rect(d);

    CZResult r;
    r.height = L;
    r.base = root;
    r.base_mass = integ.mass(root);
    if (!(r.base_mass > 0.0)) throw ContractError("decomposition base has zero measure");
    r.base_average = integ.integral(root) / r.base_mass;
    if (r.base_average > L)
        throw PreconditionError("dyadic decomposition needs avg_Q g <= L, got avg_Q g = " + fmt(r.base_average) +
                                " > L = " + fmt(L));

    r.good_mask.assign(d.cell_count(), 0);
    for (std::size_t i = root.lo[0]; i < root.hi[0]; ++i)
        for (std::size_t j = root.lo[1]; j < root.hi[1]; ++j) r.good_mask[d.index(i, j)] = 1;

    std::vector<DyadicCube> stack{base};
    while (!stack.empty()) {
        const DyadicCube q = stack.back();
        stack.pop_back();
        if (q.level >= d.levels()) continue;
        auto kids = q.children(d.dim());
        // Depth-first in canonical order: push in reverse.
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            const Rect rr = it->rect(d);
            const double mu = integ.mass(rr);
            if (!(mu > 0.0)) continue;
            const double avg = integ.integral(rr) / mu;
            if (avg > L) {
                r.selected.push_back({rr, avg, mu});
                for (std::size_t i = rr.lo[0]; i < rr.hi[0]; ++i)
                    for (std::size_t j = rr.lo[1]; j < rr.hi[1]; ++j) r.good_mask[d.index(i, j)] = 0;
            } else {
                stack.push_back(*it);
            }
        }
    }
    std::sort(r.selected.begin(), r.selected.end(),
              [](const auto& a, const auto& b) { return a.region < b.region; });
    finish(r);
    return r;
}

CZResult cz_mu_dyadic(const GridFunction& g, const MuDyadicTree& tree, double L, const CellMeasure& m) {
    require_nonnegative(g);
    require_positive_height(L);
    const auto& d = g.domain();
    if (d.dim() != 1) throw ContractError("mu-dyadic decomposition is 1-D");

    CZResult r;
    r.height = L;
    const auto& root = tree.root();
    r.base = root.interval;
    r.base_mass = root.mass;
    r.base_average = integrate(g, root.interval, m) / root.mass;
    if (r.base_average > L)
        throw PreconditionError("mu-dyadic decomposition needs avg_I g <= L, got avg_I g = " + fmt(r.base_average) +
                                " > L = " + fmt(L));

    std::vector<RealInterval> bad;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const auto& node = tree.node(static_cast<std::size_t>(stack.back()));
        stack.pop_back();
        if (node.leaf()) {
            if (!node.interval.single_cell()) {
                r.unresolved_mass += node.mass;
                bad.push_back(node.interval);
            }
            continue;
        }
        for (int child : {node.right, node.left}) {
            const auto& c = tree.node(static_cast<std::size_t>(child));
            const double avg = integrate(g, c.interval, m) / c.mass;
            if (avg > L) {
                r.selected.push_back({c.interval, avg, c.mass});
                bad.push_back(c.interval);
            } else {
                stack.push_back(child);
            }
        }
    }
    std::sort(r.selected.begin(), r.selected.end(),
              [](const auto& a, const auto& b) { return a.region < b.region; });
    r.good_mask = good_cells_1d(d, root.interval, bad);
    finish(r);
    return r;
}

// ---------------------------------------------------------------------------
// rising sun

namespace {

// One cell-piece of R with the primitive G = int (h - lambda) dmu at its ends.
struct SunPiece {
    std::size_t cell;
    double u, v;
    double g_start, g_end;
    double rate;  // h - lambda; G is linear in mass with this slope
    bool flat;
};

struct Span {
    CellPoint a, b;
};

}  // namespace

CZResult rising_sun_1d(const GridFunction& h, const RealInterval& R, double lambda, const CellMeasure& m) {
    const auto& d = h.domain();
    if (d.dim() != 1) throw ContractError("rising sun is 1-D");

    CZResult r;
    r.height = lambda;
    r.base = R;
    r.base_mass = mass(m, R);
    if (!(r.base_mass > 0.0)) throw ContractError("rising sun over an interval with zero mass");
    r.base_average = integrate(h, R, m) / r.base_mass;
    if (!(lambda > r.base_average))
        throw PreconditionError("rising sun needs lambda > avg_R h, got lambda = " + fmt(lambda) +
                                " <= avg_R h = " + fmt(r.base_average));

    std::vector<SunPiece> pieces;
    double G = 0.0;
    const std::int64_t last = R.hi.frac > 0.0 ? R.hi.cell : R.hi.cell - 1;
    for (std::int64_t c = R.lo.cell; c <= last; ++c) {
        const auto cell = static_cast<std::size_t>(c);
        const double u = c == R.lo.cell ? R.lo.frac : 0.0;
        const double v = c == R.hi.cell ? R.hi.frac : 1.0;
        const double mu = m.piece_mass(cell, u, v);
        const double rate = h[cell] - lambda;
        const bool flat = !(mu > 0.0) || rate == 0.0;
        const double next = flat ? G : G + rate * mu;
        pieces.push_back({cell, u, v, G, next, rate, flat});
        G = next;
    }
    const std::size_t P = pieces.size();
    auto start = [&](std::size_t k) { return CellPoint{static_cast<std::int64_t>(pieces[k].cell), pieces[k].u}; };
    auto end = [&](std::size_t k) {
        return pieces[k].v >= 1.0 ? CellPoint{static_cast<std::int64_t>(pieces[k].cell) + 1, 0.0}
                                  : CellPoint{static_cast<std::int64_t>(pieces[k].cell), pieces[k].v};
    };
    // Point inside piece k where G equals `level` (G strictly decreasing there).
    auto root_in = [&](std::size_t k, double level) {
        const auto& p = pieces[k];
        const double q = (level - p.g_start) / p.rate;
        const double before = m.piece_mass(p.cell, 0.0, p.u);
        const double x = std::clamp(m.locate(p.cell, before + q), p.u, p.v);
        return x >= 1.0 ? CellPoint{static_cast<std::int64_t>(p.cell) + 1, 0.0}
                        : CellPoint{static_cast<std::int64_t>(p.cell), x};
    };

    // future[k] = max of G over vertices k..P (vertex k starts piece k).
    std::vector<double> future(P + 1);
    future[P] = P ? pieces[P - 1].g_end : 0.0;
    for (std::size_t k = P; k-- > 0;) future[k] = std::max(future[k + 1], pieces[k].g_start);

    // Points x with G(x) < sup_{y > x} G(y), piece by piece.
    std::vector<Span> spans;
    auto push = [&](CellPoint a, CellPoint b) {
        if (!(a < b)) return;
        if (!spans.empty() && spans.back().b == a) {
            spans.back().b = b;
        } else {
            spans.push_back({a, b});
        }
    };
    for (std::size_t k = 0; k < P; ++k) {
        const auto& p = pieces[k];
        const double later = future[k + 1];
        if (p.flat) {
            if (p.g_start < later) push(start(k), end(k));
        } else if (p.rate > 0.0) {
            push(start(k), end(k));
        } else if (later > p.g_start) {
            push(start(k), end(k));
        } else if (later > p.g_end) {
            push(root_in(k, later), end(k));
        }
    }

    // A span starting at the left end with G rising above 0 has mean > lambda;
    // replace it by [lo, sup{x : G(x) >= 0}], which has mean exactly lambda.
    if (!spans.empty() && spans.front().a == R.lo && P > 0) {
        std::size_t k = P;
        for (std::size_t j = P; j-- > 0;)
            if (pieces[j].g_start >= 0.0) {
                k = j;
                break;
            }
        CellPoint b = start(k);
        if (!pieces[k].flat && pieces[k].g_start > 0.0) b = root_in(k, 0.0);
        std::vector<Span> merged{{R.lo, b}};
        for (const auto& s : spans)
            if (b < s.b) merged.push_back({std::max(s.a, b), s.b});
        spans.clear();
        for (const auto& s : merged) push(s.a, s.b);
    }

    // Extend endpoints across flat stretches and merge what touches.
    auto piece_starting_at = [&](const CellPoint& x) -> std::ptrdiff_t {
        for (std::size_t k = 0; k < P; ++k)
            if (start(k) == x) return static_cast<std::ptrdiff_t>(k);
        return -1;
    };
    auto piece_ending_at = [&](const CellPoint& x) -> std::ptrdiff_t {
        for (std::size_t k = 0; k < P; ++k)
            if (end(k) == x) return static_cast<std::ptrdiff_t>(k);
        return -1;
    };
    std::vector<Span> grown;
    for (auto s : spans) {
        for (auto k = piece_ending_at(s.a); k >= 0 && pieces[static_cast<std::size_t>(k)].flat;
             k = piece_ending_at(s.a))
            s.a = start(static_cast<std::size_t>(k));
        for (auto k = piece_starting_at(s.b); k >= 0 && pieces[static_cast<std::size_t>(k)].flat;
             k = piece_starting_at(s.b))
            s.b = end(static_cast<std::size_t>(k));
        if (!grown.empty() && !(grown.back().b < s.a)) {
            grown.back().b = std::max(grown.back().b, s.b);
        } else {
            grown.push_back(s);
        }
    }

    std::vector<RealInterval> bad;
    for (const auto& s : grown) {
        const RealInterval iv{s.a, s.b};
        const double mu = mass(m, iv);
        if (!(mu > 0.0)) continue;
        r.selected.push_back({iv, integrate(h, iv, m) / mu, mu});
        bad.push_back(iv);
    }
    r.good_mask = good_cells_1d(d, R, bad);
    finish(r);
    return r;
}

// ---------------------------------------------------------------------------
// Besicovitch-CZ

double box_average(const GridFunction& g, const RealBox& b, const CellMeasure& m) {
    const Integrator integ(g, m);
    const double mu = integ.mass_table().sum(b.lo[0], b.hi[0], b.lo[1], b.hi[1]);
    return integ.integral_table().sum(b.lo[0], b.hi[0], b.lo[1], b.hi[1]) / mu;
}

namespace {

// Cube of side s containing the point c, shifted as little as needed to stay in base.
RealBox clamped_cube(std::array<double, 2> c, double s, const Rect& base) {
    RealBox b;
    for (int a = 0; a < 2; ++a) {
        const double lo = static_cast<double>(base.lo[a]);
        const double hi = static_cast<double>(base.hi[a]);
        b.lo[a] = std::clamp(c[a] - 0.5 * s, lo, hi - s);
        b.hi[a] = b.lo[a] + s;
    }
    return b;
}

// Largest root in [a, b] of the quadratic through (a, fa), (mid, fm), (b, fb),
// with the quadratic positive just below it. Returns NaN when none exists.
double largest_down_crossing(double a, double fa, double fm, double b, double fb) {
    const double h = 0.5 * (b - a);
    // q(t) = fa + B t + A t^2 in t = s - a.
    const double A = (fa - 2.0 * fm + fb) / (2.0 * h * h);
    const double B = (4.0 * fm - 3.0 * fa - fb) / (2.0 * h);
    const double len = b - a;
    std::vector<double> roots;
    if (std::abs(A) * len * len <= 1e-14 * (std::abs(B) * len + std::abs(fa))) {
        if (B != 0.0) roots.push_back(-fa / B);
    } else {
        const double disc = B * B - 4.0 * A * fa;
        if (disc >= 0.0) {
            const double qq = -0.5 * (B + std::copysign(std::sqrt(disc), B));
            roots.push_back(qq / A);
            roots.push_back(qq != 0.0 ? fa / qq : qq / A);
        }
    }
    double best = std::numeric_limits<double>::quiet_NaN();
    for (double t : roots) {
        if (t < -1e-12 * len || t > len * (1.0 + 1e-12)) continue;
        t = std::clamp(t, 0.0, len);
        // Positive just below the root.
        const double probe = std::max(0.0, t - 1e-7 * len);
        const double below = fa + B * probe + A * probe * probe;
        if (!(below > 0.0) && t > 0.0) continue;
        if (std::isnan(best) || t > best) best = t;
    }
    return std::isnan(best) ? best : a + best;
}

bool cell_covered(const std::vector<RealBox>& boxes, std::size_t i0, std::size_t i1) {
    const double x0 = static_cast<double>(i0), x1 = x0 + 1.0;
    const double y0 = static_cast<double>(i1), y1 = y0 + 1.0;
    std::vector<RealBox> clip;
    for (const auto& b : boxes) {
        if (b.covers_cell(i0, i1)) return true;
        RealBox c{{std::max(b.lo[0], x0), std::max(b.lo[1], y0)}, {std::min(b.hi[0], x1), std::min(b.hi[1], y1)}};
        if (c.lo[0] < c.hi[0] && c.lo[1] < c.hi[1]) clip.push_back(c);
    }
    if (clip.empty()) return false;
    std::vector<double> xs{x0, x1}, ys{y0, y1};
    for (const auto& c : clip) {
        xs.push_back(c.lo[0]);
        xs.push_back(c.hi[0]);
        ys.push_back(c.lo[1]);
        ys.push_back(c.hi[1]);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    for (std::size_t a = 0; a + 1 < xs.size(); ++a)
        for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
            const double mx = 0.5 * (xs[a] + xs[a + 1]);
            const double my = 0.5 * (ys[b] + ys[b + 1]);
            const bool in = std::any_of(clip.begin(), clip.end(), [&](const RealBox& c) {
                return c.lo[0] <= mx && mx <= c.hi[0] && c.lo[1] <= my && my <= c.hi[1];
            });
            if (!in) return false;
        }
    return true;
}

}  // namespace

BczResult bcz_2d(const GridFunction& g, const Rect& base, double L, const CellMeasure& m, std::size_t family_bound) {
    require_nonnegative(g);
    require_positive_height(L);
    const auto& d = g.domain();
    if (d.dim() != 2) throw ContractError("Besicovitch decomposition is 2-D");
    if (!base.is_cube()) throw ContractError("Besicovitch decomposition needs a square base");

    const Integrator integ(g, m);
    const auto& N = integ.integral_table();
    const auto& D = integ.mass_table();

    BczResult out;
    CZResult& r = out.cz;
    r.height = L;
    r.base = base;
    r.base_mass = integ.mass(base);
    if (!(r.base_mass > 0.0)) throw ContractError("decomposition base has zero measure");
    r.base_average = integ.integral(base) / r.base_mass;
    if (!(r.base_average < L))
        throw PreconditionError("Besicovitch decomposition needs avg_Q g < L, got avg_Q g = " +
                                fmt(r.base_average) + " >= L = " + fmt(L));

    const double side = static_cast<double>(base.extent(0));
    auto excess = [&](std::array<double, 2> c, double s) {
        const RealBox b = clamped_cube(c, s, base);
        return N.sum(b.lo[0], b.hi[0], b.lo[1], b.hi[1]) - L * D.sum(b.lo[0], b.hi[0], b.lo[1], b.hi[1]);
    };

    struct Candidate {
        double side;
        std::size_t cell;
        RealBox box;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = base.lo[0]; i < base.hi[0]; ++i)
        for (std::size_t j = base.lo[1]; j < base.hi[1]; ++j) {
            const std::size_t cell = d.index(i, j);
            const std::array<double, 2> c{static_cast<double>(i) + 0.5, static_cast<double>(j) + 0.5};
            // Between integer sides the clamped cube's edges move linearly
            // across fixed cells, so the excess is quadratic in s there.
            double found = std::numeric_limits<double>::quiet_NaN();
            double hi_val = excess(c, side);
            for (double k = side - 1.0; k >= 1.0; k -= 1.0) {
                const double lo_val = excess(c, k);
                const double mid_val = excess(c, k + 0.5);
                found = largest_down_crossing(k, lo_val, mid_val, k + 1.0, hi_val);
                if (!std::isnan(found)) break;
                hi_val = lo_val;
            }
            if (std::isnan(found)) continue;
            cands.push_back({found, cell, clamped_cube(c, found, base)});
        }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.side > b.side || (a.side == b.side && a.cell < b.cell);
    });

    // Admission: skip a candidate whose own cell the selection already covers.
    std::vector<std::vector<std::size_t>> touching(d.cell_count());
    std::vector<RealBox> boxes;
    auto boxes_at = [&](std::size_t cell) {
        std::vector<RealBox> v;
        for (std::size_t k : touching[cell]) v.push_back(boxes[k]);
        return v;
    };
    for (const auto& c : cands) {
        const std::size_t i0 = c.cell / d.n(), i1 = c.cell % d.n();
        if (cell_covered(boxes_at(c.cell), i0, i1)) continue;
        const std::size_t k = boxes.size();
        boxes.push_back(c.box);
        const auto lo0 = static_cast<std::size_t>(std::floor(c.box.lo[0]));
        const auto lo1 = static_cast<std::size_t>(std::floor(c.box.lo[1]));
        const auto hi0 = std::min(d.n(), static_cast<std::size_t>(std::ceil(c.box.hi[0])));
        const auto hi1 = std::min(d.n(), static_cast<std::size_t>(std::ceil(c.box.hi[1])));
        for (std::size_t a = lo0; a < hi0; ++a)
            for (std::size_t b = lo1; b < hi1; ++b) touching[d.index(a, b)].push_back(k);
        const double mu = D.sum(c.box.lo[0], c.box.hi[0], c.box.lo[1], c.box.hi[1]);
        r.selected.push_back({c.box, N.sum(c.box.lo[0], c.box.hi[0], c.box.lo[1], c.box.hi[1]) / mu, mu});
    }

    r.good_mask.assign(d.cell_count(), 0);
    for (std::size_t i = base.lo[0]; i < base.hi[0]; ++i)
        for (std::size_t j = base.lo[1]; j < base.hi[1]; ++j) {
            const std::size_t cell = d.index(i, j);
            r.good_mask[cell] = cell_covered(boxes_at(cell), i, j) ? 0 : 1;
        }

    // Greedy colouring into pairwise disjoint families.
    auto& fam = out.families;
    fam.bound = family_bound;
    for (std::size_t k = 0; k < boxes.size(); ++k) {
        bool placed = false;
        for (auto& f : fam.families) {
            if (std::none_of(f.begin(), f.end(), [&](std::size_t o) { return boxes[o].overlaps(boxes[k]); })) {
                f.push_back(k);
                placed = true;
                break;
            }
        }
        if (!placed) fam.families.push_back({k});
    }
    std::vector<std::array<double, 2>> probes;
    for (std::size_t i = base.lo[0]; i < base.hi[0]; ++i)
        for (std::size_t j = base.lo[1]; j < base.hi[1]; ++j)
            probes.push_back({static_cast<double>(i) + 0.5, static_cast<double>(j) + 0.5});
    for (const auto& b : boxes)
        for (double x : {b.lo[0], b.hi[0]})
            for (double y : {b.lo[1], b.hi[1]}) {
                // Nudge corners inward so the probe is interior to this box.
                const double e = 1e-9 * b.side(0);
                probes.push_back({x == b.lo[0] ? x + e : x - e, y == b.lo[1] ? y + e : y - e});
            }
    for (const auto& p : probes) {
        std::size_t count = 0;
        for (const auto& b : boxes)
            if (b.lo[0] < p[0] && p[0] < b.hi[0] && b.lo[1] < p[1] && p[1] < b.hi[1]) ++count;
        fam.max_overlap = std::max(fam.max_overlap, count);
    }
    finish(r);
    return out;
}

}  // namespace bmo
