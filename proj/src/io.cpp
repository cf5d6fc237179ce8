#include "bmophi/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "bmophi/errors.hpp"

namespace bmo {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

std::vector<std::vector<double>> parse_csv(const std::string& text, const std::string& origin) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line.front() == '#') continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            std::size_t a = pos, b = end;
            while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
            while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
            double v = 0.0;
            const auto res = std::from_chars(line.data() + a, line.data() + b, v);
            if (a == b || res.ec != std::errc() || res.ptr != line.data() + b || !std::isfinite(v)) {
                std::ostringstream os;
                os << origin << ":" << line_no << ":" << (a + 1) << ": expected a finite number, got '"
                   << line.substr(a, b - a) << "'";
                throw ParseError(os.str());
            }
            row.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(origin + ": no data");
    return rows;
}

std::vector<std::vector<double>> read_csv(const std::string& path) { return parse_csv(read_file(path), path); }

GridFunction grid_function_from_rows(const std::vector<std::vector<double>>& rows, double side) {
    std::vector<double> flat;
    int dim = 1;
    if (rows.size() == 1) {
        flat = rows.front();
    } else if (std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.size() == 1; })) {
        for (const auto& r : rows) flat.push_back(r.front());
    } else {
        dim = 2;
        for (const auto& r : rows) {
            if (r.size() != rows.size())
                throw ParseError("2-D data must be square: " + std::to_string(rows.size()) + " rows but a row of " +
                                 std::to_string(r.size()) + " values");
            flat.insert(flat.end(), r.begin(), r.end());
        }
    }
    const std::size_t n = dim == 1 ? flat.size() : rows.size();
    if (!is_pow2(n)) throw ParseError("cells per side must be a power of two >= 2, got " + std::to_string(n));
    return {GridDomain(dim, n, side), std::move(flat)};
}

GridFunction load_grid_function(const std::string& path, double side) {
    try {
        return grid_function_from_rows(read_csv(path), side);
    } catch (const ParseError& e) {
        const std::string what = e.what();
        if (what.rfind(path, 0) == 0) throw;
        throw ParseError(path + ": " + what);
    }
}

GridFunction grid_function_from_json(const Json& j, double side) {
    if (!j.is_array() || j.empty()) throw ParseError("inline function must be a nonempty JSON array");
    std::vector<std::vector<double>> rows;
    if (j.front().is_array()) {
        for (const auto& r : j) rows.push_back(r.get<std::vector<double>>());
        if (rows.size() == 1 || std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.size() == 1; })) {
            return grid_function_from_rows(rows, side);
        }
    } else {
        rows.push_back(j.get<std::vector<double>>());
    }
    return grid_function_from_rows(rows, side);
}

CellMeasure load_measure(const std::string& path, const GridDomain& d) {
    const auto f = load_grid_function(path, d.side());
    if (f.domain().dim() != d.dim() || f.domain().n() != d.n())
        throw ParseError(path + ": measure grid does not match the function grid");
    for (double w : f.values())
        if (w < 0.0) throw ParseError(path + ": weights must be nonnegative");
    return {d, f.values()};
}

std::string to_csv(const GridDomain& d, const std::vector<double>& cells) {
    std::ostringstream os;
    os.precision(17);
    if (d.dim() == 1) {
        for (double v : cells) os << v << "\n";
    } else {
        for (std::size_t i = 0; i < d.n(); ++i) {
            for (std::size_t j = 0; j < d.n(); ++j) os << (j ? "," : "") << cells[d.index(i, j)];
            os << "\n";
        }
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << text;
}

Json read_json(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// gauges

Gauge gauge_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ParseError("gauge spec needs a \"kind\"");
    const auto kind = j.at("kind").get<std::string>();
    auto known = [&](std::initializer_list<const char*> keys) {
        for (const auto& [k, v] : j.items()) {
            bool ok = k == "kind";
            for (const char* key : keys) ok |= k == key;
            if (!ok) throw ParseError("gauge spec: unknown key '" + k + "' for kind '" + kind + "'");
        }
    };
    if (kind == "id" || kind == "identity") {
        known({});
        return Gauge::identity();
    }
    if (kind == "power") {
        known({"p"});
        return Gauge::power(j.at("p").get<double>());
    }
    if (kind == "log1p") {
        known({"a"});
        return Gauge::log1p(j.value("a", 1.0));
    }
    if (kind == "polygonal") {
        known({"vertices", "final_slope"});
        std::vector<Vertex> vs;
        for (const auto& v : j.at("vertices")) {
            if (!v.is_array() || v.size() != 2) throw ParseError("polygonal vertices are [t, y] pairs");
            vs.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        return Gauge::polygonal(std::move(vs), j.at("final_slope").get<double>());
    }
    throw ParseError("unknown gauge kind '" + kind + "'");
}

Gauge parse_gauge(const std::string& spec) {
    const auto first = spec.find_first_not_of(" \t");
    if (first != std::string::npos && spec[first] == '{') {
        try {
            return gauge_from_json(Json::parse(spec));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("gauge spec: ") + e.what());
        }
    }
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    double param = 1.0;
    if (colon != std::string::npos) {
        const std::string p = spec.substr(colon + 1);
        const auto res = std::from_chars(p.data(), p.data() + p.size(), param);
        if (res.ec != std::errc() || res.ptr != p.data() + p.size())
            throw ParseError("gauge spec '" + spec + "': bad parameter");
    }
    if (kind == "id" || kind == "identity") return Gauge::identity();
    if (kind == "power") {
        if (colon == std::string::npos) throw ParseError("gauge spec 'power' needs an exponent, e.g. power:0.5");
        return Gauge::power(param);
    }
    if (kind == "log1p") return Gauge::log1p(param);
    throw ParseError("unknown gauge '" + spec + "'");
}

// ---------------------------------------------------------------------------
// reports

namespace {

double coord(const GridDomain* d, int axis, double cells) {
    if (!d) return cells;
    return d->origin()[axis] + cells * d->cell_width();
}

Json piece_json(const Piece& p, const GridDomain& d) {
    return std::visit(
        [&](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Rect>) {
                return region_json(Region{x}, &d);
            } else if constexpr (std::is_same_v<T, RealInterval>) {
                return region_json(Region{x}, &d);
            } else {
                Json j;
                j["kind"] = "cube";
                j["lo"] = {coord(&d, 0, x.lo[0]), coord(&d, 1, x.lo[1])};
                j["hi"] = {coord(&d, 0, x.hi[0]), coord(&d, 1, x.hi[1])};
                j["side"] = x.side(0) * d.cell_width();
                return j;
            }
        },
        p);
}

}  // namespace

Json region_json(const Region& r, const GridDomain* d) {
    return std::visit(
        [&](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            Json j;
            if constexpr (std::is_same_v<T, Rect>) {
                if (d && d->dim() == 1) {
                    j["kind"] = "interval";
                    j["cells"] = {x.lo[0], x.hi[0]};
                    j["lo"] = coord(d, 0, static_cast<double>(x.lo[0]));
                    j["hi"] = coord(d, 0, static_cast<double>(x.hi[0]));
                } else {
                    j["kind"] = x.is_cube() ? "cube" : "rect";
                    j["rows"] = {x.lo[0], x.hi[0]};
                    j["cols"] = {x.lo[1], x.hi[1]};
                }
            } else if constexpr (std::is_same_v<T, RealInterval>) {
                j["kind"] = "interval";
                j["lo"] = coord(d, 0, x.lo.position());
                j["hi"] = coord(d, 0, x.hi.position());
            } else {
                j["kind"] = "ball";
                j["center"] = x.center;
                j["radius"] = x.radius;
            }
            return j;
        },
        r);
}

Json to_json(const NormReport& r, const GridDomain* d) {
    Json j;
    j["value"] = r.value;
    j["witness"] = region_json(r.witness, d);
    j["c_opt"] = r.c_opt;
    j["lambda_opt"] = r.lambda_opt;
    j["mode"] = to_string(r.mode);
    j["family"] = r.family;
    j["gauge"] = r.gauge;
    j["diagnostics"] = {{"regions", r.diagnostics.regions},
                        {"evaluated", r.diagnostics.evaluated},
                        {"pruned", r.diagnostics.pruned},
                        {"luxemburg_solves", r.diagnostics.luxemburg_solves},
                        {"scan_candidates", r.diagnostics.scan_candidates},
                        {"max_scan_resolution", r.diagnostics.max_scan_resolution}};
    return j;
}

Json to_json(const CZResult& r, const GridDomain& d) {
    Json j;
    j["height"] = r.height;
    j["base"] = piece_json(r.base, d);
    j["base_average"] = r.base_average;
    j["mass_ratio"] = r.mass_ratio;
    j["max_ratio"] = r.max_ratio;
    j["unresolved_mass"] = r.unresolved_mass;
    Json regions = Json::array();
    for (const auto& s : r.selected) {
        Json e = piece_json(s.region, d);
        e["average"] = s.average;
        e["mass"] = s.mass;
        regions.push_back(std::move(e));
    }
    j["regions"] = std::move(regions);
    return j;
}

Json to_json(const BesicovitchFamilies& f) {
    Json j;
    j["family_count"] = f.family_count();
    j["bound"] = f.bound;
    j["within_bound"] = f.within_bound();
    j["max_overlap"] = f.max_overlap;
    j["families"] = f.families;
    return j;
}

Json to_json(const MuDyadicTree& t, const GridDomain& d) {
    std::function<Json(std::size_t)> node = [&](std::size_t i) {
        const auto& n = t.node(i);
        Json j;
        j["interval"] = {coord(&d, 0, n.interval.lo.position()), coord(&d, 0, n.interval.hi.position())};
        j["mass"] = n.mass;
        if (!n.leaf()) {
            j["split"] = coord(&d, 0, t.node(static_cast<std::size_t>(n.left)).interval.hi.position());
            j["left"] = node(static_cast<std::size_t>(n.left));
            j["right"] = node(static_cast<std::size_t>(n.right));
        }
        return j;
    };
    return node(0);
}

FiniteSHT sht_from_json(const Json& j) {
    for (const auto& [k, v] : j.items())
        if (k != "points" && k != "dist" && k != "kappa" && k != "weights" && k != "gamma")
            throw ParseError("space spec: unknown key '" + k + "'");
    const auto n = j.at("points").get<std::size_t>();
    std::vector<double> dist;
    const auto& rows = j.at("dist");
    if (rows.size() != n) throw ParseError("space spec: dist must have " + std::to_string(n) + " rows");
    for (const auto& r : rows) {
        if (r.size() != n) throw ParseError("space spec: dist rows must have " + std::to_string(n) + " entries");
        for (const auto& v : r) dist.push_back(v.get<double>());
    }
    return {n, std::move(dist), j.at("kappa").get<double>(), j.at("weights").get<std::vector<double>>(),
            j.value("gamma", 0.0)};
}

FiniteSHT load_sht(const std::string& path) {
    try {
        return sht_from_json(read_json(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Json to_json(const FiniteSHT& s) {
    Json j;
    j["points"] = s.size();
    Json rows = Json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        Json r = Json::array();
        for (std::size_t k = 0; k < s.size(); ++k) r.push_back(s.d(i, k));
        rows.push_back(std::move(r));
    }
    j["dist"] = std::move(rows);
    j["kappa"] = s.kappa();
    j["weights"] = s.weights();
    j["gamma"] = s.gamma();
    return j;
}

}  // namespace bmo
