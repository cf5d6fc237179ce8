#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "bmophi/errors.hpp"
#include "bmophi/io.hpp"
#include "bmophi/verify.hpp"

using namespace bmo;

namespace {

// Everything a run can be configured with; command-line flags win over --config.
struct RunConfig {
    std::string command;
    std::string func;
    std::string measure;
    std::string space;
    double side = 1.0;
    std::string gauge = "id";
    std::string family = "dyadic";
    std::string mode = "infc";
    std::vector<double> L;
    double lambda = 0.0;
    std::optional<double> lo, hi;
    std::string tree = "standard";
    int depth = 20;
    std::size_t bound = 20;
    bool no_prune = false;
    std::string mask;
    std::string suite = "all";
    std::string probe;
    std::size_t count = 0;
    std::size_t cells = 0;
    int dim = 0;
    double range = 1e6;
    double x0 = 1.0 / 3.0;
    std::size_t points = 40;
    std::string generator;
    std::uint64_t seed = 7;
    double tol = 1e-7;
    int threads = 1;
    std::string out;
    bool json = false;
};

struct ConfigKey {
    std::vector<CLI::Option*> opts;
    std::function<void(const Json&)> set;
};

class ConfigTable {
public:
    // The same key may back options of several subcommands.
    template <class T>
    void bind(const std::string& key, CLI::Option* opt, T& field) {
        auto& k = keys_[key];
        k.opts.push_back(opt);
        k.set = [&field](const Json& j) { field = j.get<T>(); };
    }
    void bind_optional(const std::string& key, CLI::Option* opt, std::optional<double>& field) {
        auto& k = keys_[key];
        k.opts.push_back(opt);
        k.set = [&field](const Json& j) { field = j.get<double>(); };
    }
    void apply(const Json& j, const std::string& origin) {
        if (!j.is_object()) throw ParseError(origin + ": config must be a JSON object");
        for (const auto& [k, v] : j.items()) {
            auto it = keys_.find(k);
            if (it == keys_.end()) throw ParseError(origin + ": unknown config key '" + k + "'");
            const auto& opts = it->second.opts;
            if (std::any_of(opts.begin(), opts.end(), [](const CLI::Option* o) { return o->count() > 0; })) continue;
            try {
                it->second.set(v);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(origin + ": bad value for '" + k + "': " + e.what());
            }
        }
    }

private:
    std::map<std::string, ConfigKey> keys_;
};

struct Loaded {
    GridFunction f;
    CellMeasure m;
};

Loaded load_inputs(const RunConfig& c) {
    if (c.func.empty()) throw ParseError("--func is required");
    Loaded in;
    in.f = load_grid_function(c.func, c.side);
    in.m = c.measure.empty() ? CellMeasure::uniform(in.f.domain()) : load_measure(c.measure, in.f.domain());
    return in;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void emit(const RunConfig& c, const Json& j, const std::string& text) {
    const std::string body = c.json ? j.dump(2) + "\n" : text;
    if (c.out.empty())
        std::cout << body;
    else
        write_text(c.out, body);
}

std::string mask_csv(const GridDomain& d, const std::vector<std::uint8_t>& good) {
    std::vector<double> v(good.size());
    for (std::size_t i = 0; i < good.size(); ++i) v[i] = good[i] ? 0.0 : 1.0;
    return to_csv(d, v);
}

double single_L(const RunConfig& c, const char* what) {
    if (c.L.size() != 1) throw ContractError(std::string(what) + " needs exactly one --L value");
    return c.L.front();
}

// ---------------------------------------------------------------------------
// commands

int cmd_norm(const RunConfig& c) {
    const auto in = load_inputs(c);
    const auto& d = in.f.domain();
    const Mode mode = mode_from_string(c.mode);
    std::optional<Gauge> g;
    if (mode == Mode::GaugeInfC || mode == Mode::CzCenter || mode == Mode::KPhi) g = parse_gauge(c.gauge);
    RegionFamily fam;
    if (c.family == "dyadic")
        fam = RegionFamily::dyadic(d);
    else if (c.family == "cubes")
        fam = RegionFamily::all_cubes(d);
    else if (c.family == "rects")
        fam = RegionFamily::all_rects(d);
    else if (c.family == "mu-dyadic")
        fam = RegionFamily::mu_dyadic(MuDyadicTree::build(RealInterval::cells(0, d.n()), in.m, c.depth, true));
    else
        throw ContractError("unknown family '" + c.family + "' (dyadic, cubes, rects, mu-dyadic)");
    const auto rep = norm_sup(in.f, fam, g ? &*g : nullptr, in.m, mode, {!c.no_prune});
    std::ostringstream os;
    os << "value " << fmt(rep.value) << "\nwitness " << region_json(rep.witness, &d).dump() << "\nc_opt " << fmt(rep.c_opt)
       << "\nlambda_opt " << fmt(rep.lambda_opt) << "\n";
    emit(c, to_json(rep, &d), os.str());
    return 0;
}

std::string regions_text(const CZResult& r, const GridDomain& d) {
    std::ostringstream os;
    os.precision(17);
    os << "selected " << r.selected.size() << "\nmass_ratio " << r.mass_ratio << "\n";
    const auto j = to_json(r, d);
    for (const auto& e : j["regions"]) os << e.dump() << "\n";
    return os.str();
}

int cmd_cz(const RunConfig& c) {
    const auto in = load_inputs(c);
    const auto& d = in.f.domain();
    const double L = single_L(c, "cz");
    CZResult r;
    if (c.tree == "standard") {
        r = cz_dyadic(in.f, {}, L, in.m);
    } else if (c.tree == "mu") {
        const auto t = MuDyadicTree::build(RealInterval::cells(0, d.n()), in.m, c.depth, true);
        r = cz_mu_dyadic(in.f, t, L, in.m);
    } else {
        throw ContractError("unknown tree '" + c.tree + "' (standard, mu)");
    }
    if (!c.mask.empty()) write_text(c.mask, mask_csv(d, r.good_mask));
    emit(c, to_json(r, d), regions_text(r, d));
    return 0;
}

int cmd_sun(const RunConfig& c) {
    const auto in = load_inputs(c);
    const auto& d = in.f.domain();
    if (d.dim() != 1) throw ContractError("sun needs 1-D data");
    const double w = d.cell_width();
    const double lo = c.lo.value_or(d.origin()[0]), hi = c.hi.value_or(d.origin()[0] + d.side());
    const RealInterval R{to_cell_point((lo - d.origin()[0]) / w, d.n()), to_cell_point((hi - d.origin()[0]) / w, d.n())};
    const auto r = rising_sun_1d(in.f, R, c.lambda, in.m);
    if (!c.mask.empty()) write_text(c.mask, mask_csv(d, r.good_mask));
    emit(c, to_json(r, d), regions_text(r, d));
    return 0;
}

int cmd_bcz(const RunConfig& c) {
    const auto in = load_inputs(c);
    const auto& d = in.f.domain();
    if (d.dim() != 2) throw ContractError("bcz needs 2-D data");
    const auto r = bcz_2d(in.f, Rect::whole(d), single_L(c, "bcz"), in.m, c.bound);
    if (!c.mask.empty()) write_text(c.mask, mask_csv(d, r.cz.good_mask));
    Json j = to_json(r.cz, d);
    j["families"] = to_json(r.families);
    std::ostringstream os;
    os << regions_text(r.cz, d) << "families " << r.families.family_count() << " (bound " << r.families.bound
       << ")\nmax_overlap " << r.families.max_overlap << "\n";
    emit(c, j, os.str());
    return r.families.within_bound() ? 0 : 1;
}

int cmd_grid(const RunConfig& c) {
    CellMeasure m;
    if (!c.measure.empty()) {
        const auto w = load_grid_function(c.measure, c.side);
        m = CellMeasure(w.domain(), w.values());
    } else {
        const std::size_t n = c.cells ? c.cells : 16;
        m = generate_measure(c.generator.empty() ? MeasureKind::Uniform : measure_kind_from_string(c.generator),
                             GridDomain(1, n, c.side), c.seed, c.range);
    }
    const auto& d = m.domain();
    if (d.dim() != 1) throw ContractError("grid builds 1-D mu-dyadic trees");
    const auto t = MuDyadicTree::build(RealInterval::cells(0, d.n()), m, c.depth, false);
    std::ostringstream os;
    os.precision(17);
    for (const auto& node : t.nodes())
        if (!node.leaf())
            os << node.depth << " " << d.origin()[0] + t.node(static_cast<std::size_t>(node.left)).interval.hi.position() *
                                                      d.cell_width()
               << "\n";
    emit(c, to_json(t, d), os.str());
    return 0;
}

int cmd_sht(const RunConfig& c) {
    if (c.space.empty()) throw ParseError("--space is required");
    const auto s = load_sht(c.space);
    const auto v = validate_sht(s);
    Json j;
    j["validation"] = {{"accepted", v.accepted},
                       {"structural", v.structural},
                       {"failures", v.failures},
                       {"kappa_min", v.kappa_min},
                       {"doubling_constant", v.doubling_constant},
                       {"doubling_order", v.doubling_order}};
    std::ostringstream os;
    os << "accepted " << (v.accepted ? "yes" : "no") << "\nkappa_min " << fmt(v.kappa_min) << "\ndoubling_constant "
       << fmt(v.doubling_constant) << "\n";
    for (const auto& f : v.failures) os << "failure " << f << "\n";
    if (!c.func.empty() && v.structural) {
        const auto rows = read_csv(c.func);
        std::vector<double> f;
        for (const auto& r : rows) f.insert(f.end(), r.begin(), r.end());
        const Mode mode = mode_from_string(c.mode);
        std::optional<Gauge> g;
        if (mode != Mode::InfC && mode != Mode::MeanCentered) g = parse_gauge(c.gauge);
        const auto rep = bmo_sht(f, s, g ? &*g : nullptr, mode, {!c.no_prune});
        j["norm"] = to_json(rep);
        os << "value " << fmt(rep.value) << "\nwitness " << describe(rep.witness) << "\n";
    }
    emit(c, j, os.str());
    return v.accepted ? 0 : 1;
}

std::vector<Instance> corpus_for(const RunConfig& c, int dim, std::size_t default_cells, std::size_t default_count,
                                 std::vector<MeasureKind> measures, std::uint64_t salt) {
    CorpusSpec spec;
    spec.dim = dim;
    spec.cells = c.cells ? c.cells : default_cells;
    spec.count = c.count ? c.count : default_count;
    spec.seed = c.seed * 1000003ULL + salt;
    spec.measures = std::move(measures);
    spec.range = c.range;
    return make_corpus(spec);
}

TheoremReport run_suite(const RunConfig& c, const std::string& suite) {
    VerifyOptions o;
    o.tol = c.tol;
    const Gauge g = parse_gauge(c.gauge);
    auto dims = [&](std::initializer_list<int> all) {
        std::vector<int> out;
        for (int d : all)
            if (c.dim == 0 || c.dim == d) out.push_back(d);
        return out;
    };
    TheoremReport rep;
    if (suite == "main") {
        rep.suite = suite;
        for (int d : dims({1, 2})) {
            auto r = verify_thm_main(corpus_for(c, d, d == 1 ? 256 : 16, 6, {}, 11 + d), g, o);
            rep.params = r.params;
            rep.merge(r);
        }
    } else if (suite == "general") {
        rep.suite = suite;
        std::vector<std::string> probes{"oscillating", "log2-step", "floor"};
        if (!c.probe.empty()) probes = {c.probe};
        for (const auto& p : probes) {
            const double horizon = p == "log2-step" ? 65536.0 : 100.0;
            const auto probe = named_probe(p, horizon, 200000);
            for (int d : dims({1, 2})) {
                auto r = verify_thm_general(probe, corpus_for(c, d, d == 1 ? 128 : 16, 3, {}, 21 + d), o);
                rep.params[p] = r.params;
                rep.merge(r);
            }
        }
    } else if (suite == "nondoubling1d") {
        rep = verify_thm_nondoubling_1d(
            corpus_for(c, 1, 256, 6, {MeasureKind::NonDoubling, MeasureKind::Random, MeasureKind::Density2x}, 31), g, o);
    } else if (suite == "rect") {
        rep = verify_thm_rect(corpus_for(c, 2, 8, 4, {MeasureKind::Random}, 41), g, 0.0, o);
    } else if (suite == "sht") {
        rep = verify_sht(make_sht_corpus(c.count ? c.count : 6, c.points, c.seed * 1000003ULL + 51), g, o);
    } else if (suite == "decomp") {
        std::vector<double> schedule = c.L.empty() ? std::vector<double>{2.0, 4.0, 8.0} : c.L;
        rep.suite = suite;
        for (int d : dims({1, 2})) {
            auto r = verify_decompositions(
                corpus_for(c, d, d == 1 ? 256 : 16, 6, {MeasureKind::Uniform, MeasureKind::Random}, 61 + d), g,
                schedule, o);
            rep.params = r.params;
            rep.merge(r);
        }
    } else if (suite == "vitali") {
        rep = verify_vitali(c.count ? c.count : 100, std::min<std::size_t>(c.points, 200), c.seed);
    } else if (suite == "mugrid") {
        rep = verify_mu_grid(c.count ? c.count : 20, c.seed);
    } else if (suite == "solvers") {
        rep = verify_solvers(c.count ? c.count : 200, 20, c.seed);
    } else {
        throw ContractError("unknown suite '" + suite +
                            "' (main, general, sht, nondoubling1d, rect, decomp, vitali, mugrid, solvers, all)");
    }
    rep.tolerance = c.tol;
    rep.params["seed"] = c.seed;
    rep.canonicalize();
    return rep;
}

int cmd_verify(const RunConfig& c) {
    std::vector<std::string> suites{c.suite};
    if (c.suite == "all") suites = {"main", "general", "sht", "nondoubling1d", "rect", "decomp"};
    Json j = Json::object();
    std::string csv;
    std::ostringstream text;
    bool ok = true;
    for (const auto& name : suites) {
        const auto rep = run_suite(c, name);
        ok &= rep.passed();
        j[name] = rep.to_json();
        const auto body = rep.to_csv();
        csv += csv.empty() ? body : body.substr(body.find('\n') + 1);
        text << name << ": " << rep.asserted_count() << " asserted rows, " << rep.violations() << " violations, "
             << (rep.passed() ? "PASS" : "FAIL") << "\n";
        for (const auto& r : rep.rows)
            if (r.asserted && !r.pass)
                text << "  violation " << r.instance << " " << r.check << " lhs " << fmt(r.lhs) << " rhs " << fmt(r.rhs)
                     << (r.note.empty() ? "" : " (" + r.note + ")") << "\n";
    }
    const std::string prefix = c.out.empty() ? "report" : c.out;
    write_text(prefix + ".json", j.dump(2) + "\n");
    write_text(prefix + ".csv", csv);
    std::cout << (c.json ? j.dump(2) + "\n" : text.str());
    return ok ? 0 : 1;
}

int cmd_gen(const RunConfig& c) {
    const std::string& name = c.generator;
    const std::string out = c.out.empty() ? name + ".csv" : c.out;
    Json manifest;
    manifest["generator"] = name;
    manifest["seed"] = c.seed;
    manifest["file"] = out;
    if (name == "sht") {
        const auto s = random_plane_sht(c.points, 1.5, c.seed);
        write_text(out, to_json(s).dump(2) + "\n");
        manifest["points"] = c.points;
    } else {
        const int dim = c.dim ? c.dim : 1;
        const std::size_t cells = c.cells ? c.cells : 256;
        const GridDomain d(dim, cells, c.side);
        manifest["dim"] = dim;
        manifest["cells"] = cells;
        if (name.rfind("weights-", 0) == 0 || name == "density2x") {
            const std::string kind = name == "density2x" ? name : name.substr(8);
            const auto m = generate_measure(measure_kind_from_string(kind), d, c.seed, c.range);
            write_text(out, to_csv(d, m.weights()));
            manifest["range"] = c.range;
            if (!m.piecewise_constant()) manifest["note"] = "cell masses only; the in-cell profile is linear";
        } else {
            GeneratorParams p;
            p.x0 = p.x1 = c.x0;
            write_text(out, to_csv(d, generate(generator_from_string(name), d, c.seed, p).values()));
            if (name == "logcusp") manifest["x0"] = c.x0;
        }
    }
    write_text(out + ".manifest.json", manifest.dump(2) + "\n");
    std::cout << (c.json ? manifest.dump(2) + "\n" : "wrote " + out + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig c;
    ConfigTable table;
    std::string config_path;
    CLI::App app{"Bounded mean oscillation toolkit: norms, decompositions and inequality checks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    table.bind("json", app.add_flag("--json", c.json, "Print JSON instead of text"), c.json);
    table.bind("seed", app.add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str(), c.seed);
    table.bind("tol", app.add_option("--tol", c.tol, "Relative slack for asserted upper bounds")->capture_default_str(),
               c.tol);
    table.bind("threads",
               app.add_option("--threads", c.threads, "Worker threads (evaluation is single-threaded)")
                   ->check(CLI::PositiveNumber)
                   ->capture_default_str(),
               c.threads);
    table.bind("out", app.add_option("--out", c.out, "Output file (verify: path prefix for .json/.csv)"), c.out);
    app.add_option("--config", config_path, "JSON file with any of the options; flags take precedence")
        ->check(CLI::ExistingFile);

    auto inputs = [&](CLI::App* sub) {
        table.bind("func", sub->add_option("--func", c.func, "Function CSV (one row or column: 1-D; square: 2-D)"),
                   c.func);
        table.bind("measure", sub->add_option("--measure", c.measure, "Cell weights CSV (default Lebesgue)"),
                   c.measure);
        table.bind("side", sub->add_option("--side", c.side, "Side length of the domain")->capture_default_str(),
                   c.side);
    };

    auto* norm = app.add_subcommand("norm", "Supremum of an oscillation over a region family");
    inputs(norm);
    table.bind("gauge", norm->add_option("--gauge", c.gauge, "id, power:p, log1p:a or a JSON gauge")->capture_default_str(), c.gauge);
    table.bind("family", norm->add_option("--family", c.family, "dyadic, cubes, rects or mu-dyadic")->capture_default_str(), c.family);
    table.bind("mode", norm->add_option("--mode", c.mode, "at-mean, infc, gauge-infc, cz-center or k-phi")->capture_default_str(), c.mode);
    table.bind("depth", norm->add_option("--depth", c.depth, "mu-dyadic tree depth")->capture_default_str(), c.depth);
    table.bind("no_prune", norm->add_flag("--no-prune", c.no_prune, "Evaluate every region"), c.no_prune);

    auto* cz = app.add_subcommand("cz", "Dyadic Calderon-Zygmund decomposition");
    inputs(cz);
    table.bind("L", cz->add_option("--L", c.L, "Height"), c.L);
    table.bind("tree", cz->add_option("--tree", c.tree, "standard or mu")->capture_default_str(), c.tree);
    table.bind("depth", cz->add_option("--depth", c.depth, "mu-dyadic tree depth")->capture_default_str(), c.depth);
    table.bind("mask", cz->add_option("--mask", c.mask, "Write a cell mask CSV (1 = selected)"), c.mask);

    auto* sun = app.add_subcommand("sun", "Rising-sun intervals at level lambda (1-D)");
    inputs(sun);
    table.bind("lambda", sun->add_option("--lambda", c.lambda, "Level")->required(), c.lambda);
    table.bind_optional("lo", sun->add_option("--lo", c.lo, "Left end of R (default: domain start)"), c.lo);
    table.bind_optional("hi", sun->add_option("--hi", c.hi, "Right end of R (default: domain end)"), c.hi);
    table.bind("mask", sun->add_option("--mask", c.mask, "Write a cell mask CSV"), c.mask);

    auto* bcz = app.add_subcommand("bcz", "Besicovitch-Calderon-Zygmund cubes (2-D)");
    inputs(bcz);
    table.bind("L", bcz->add_option("--L", c.L, "Height"), c.L);
    table.bind("bound", bcz->add_option("--bound", c.bound, "Allowed number of disjoint families")->capture_default_str(), c.bound);
    table.bind("mask", bcz->add_option("--mask", c.mask, "Write a cell mask CSV"), c.mask);

    auto* grid = app.add_subcommand("grid", "Dump a mu-dyadic tree");
    table.bind("measure", grid->add_option("--measure", c.measure, "Cell weights CSV"), c.measure);
    table.bind("side", grid->add_option("--side", c.side, "Side length of the domain"), c.side);
    table.bind("cells", grid->add_option("--cells", c.cells, "Cells when generating a measure"), c.cells);
    table.bind("generator", grid->add_option("--kind", c.generator, "Generated measure: uniform, random, nondoubling, density2x"), c.generator);
    table.bind("depth", grid->add_option("--depth", c.depth, "Tree depth")->capture_default_str(), c.depth);
    table.bind("range", grid->add_option("--range", c.range, "Weight dynamic range"), c.range);

    auto* sht = app.add_subcommand("sht", "Validate a finite quasi-metric space and take its norm");
    table.bind("space", sht->add_option("--space", c.space, "Space JSON"), c.space);
    table.bind("func", sht->add_option("--func", c.func, "Values per point (CSV)"), c.func);
    table.bind("gauge", sht->add_option("--gauge", c.gauge, "Gauge for gauge modes"), c.gauge);
    table.bind("mode", sht->add_option("--mode", c.mode, "Oscillation mode"), c.mode);
    table.bind("no_prune", sht->add_flag("--no-prune", c.no_prune, "Evaluate every ball"), c.no_prune);

    auto* verify = app.add_subcommand("verify", "Run inequality suites; exit status 1 on any violation");
    table.bind("suite", verify->add_option("--suite", c.suite, "main, general, sht, nondoubling1d, rect, decomp or all")->capture_default_str(), c.suite);
    table.bind("gauge", verify->add_option("--gauge", c.gauge, "Gauge")->capture_default_str(), c.gauge);
    table.bind("L", verify->add_option("--L", c.L, "Height schedule for decomp"), c.L);
    table.bind("probe", verify->add_option("--probe", c.probe, "Single probe for general"), c.probe);
    table.bind("count", verify->add_option("--count", c.count, "Instances per corpus"), c.count);
    table.bind("cells", verify->add_option("--cells", c.cells, "Cells per side"), c.cells);
    table.bind("dim", verify->add_option("--dim", c.dim, "Restrict to one dimension")->check(CLI::Range(1, 2)), c.dim);
    table.bind("range", verify->add_option("--range", c.range, "Weight dynamic range")->capture_default_str(), c.range);
    table.bind("points", verify->add_option("--points", c.points, "Largest space size")->capture_default_str(), c.points);

    auto* gen = app.add_subcommand("gen", "Write generated functions, weights or spaces");
    table.bind("generator",
               gen->add_option("generator", c.generator,
                               "stepdyadic, logcusp, random, checkerrect, weights-uniform, weights-random, "
                               "weights-nondoubling, density2x or sht (plane points, d = |x - y|^1.5)")
                   ->required(),
               c.generator);
    table.bind("cells", gen->add_option("--cells", c.cells, "Cells per side"), c.cells);
    table.bind("dim", gen->add_option("--dim", c.dim, "Dimension")->check(CLI::Range(1, 2)), c.dim);
    table.bind("range", gen->add_option("--range", c.range, "Weight dynamic range"), c.range);
    table.bind("x0", gen->add_option("--x0", c.x0, "Cusp location"), c.x0);
    table.bind("points", gen->add_option("--points", c.points, "Points for sht"), c.points);
    table.bind("side", gen->add_option("--side", c.side, "Side length of the domain"), c.side);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) table.apply(read_json(config_path), config_path);
        const auto* sub = app.get_subcommands().front();
        c.command = sub->get_name();
        if (c.command == "norm") return cmd_norm(c);
        if (c.command == "cz") return cmd_cz(c);
        if (c.command == "sun") return cmd_sun(c);
        if (c.command == "bcz") return cmd_bcz(c);
        if (c.command == "grid") return cmd_grid(c);
        if (c.command == "sht") return cmd_sht(c);
        if (c.command == "verify") return cmd_verify(c);
        if (c.command == "gen") return cmd_gen(c);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
