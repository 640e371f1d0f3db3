// okdrop command-line front end. Exit codes: 0 success, 1 domain error, 2 usage or schema error.

#include "okdrop/acceptance.hpp"
#include "okdrop/balls.hpp"
#include "okdrop/errors.hpp"
#include "okdrop/green.hpp"
#include "okdrop/io.hpp"
#include "okdrop/numerics.hpp"
#include "okdrop/okenergy.hpp"
#include "okdrop/optimizer.hpp"
#include "okdrop/renorm.hpp"
#include "okdrop/shapes.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace okdrop;

namespace {

constexpr double unset = std::numeric_limits<double>::quiet_NaN();
constexpr double pi = std::numbers::pi;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string input;
    std::string output;
    std::string format = "json";
    double tol = 1e-10;
    int threads = 0;
    std::uint64_t seed = 42;
    double epsilon = unset, kappa = unset, delta_bar = unset, gamma = unset, ell = unset;
    double c1 = unset, c2 = unset, c3 = unset, eps0 = unset;
    std::vector<double> tau;
    double density = unset;
    bool paper_normalization = false;
};

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void add_common(CLI::App *app, Common &c) {
    app->add_option("--input", c.input, "input JSON file, '-' for stdin, or inline JSON")->envname("OKDROP_INPUT");
    app->add_option("--output", c.output, "output file (default stdout)");
    app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->envname("OKDROP_FORMAT");
    app->add_option("--tol", c.tol, "kernel summation tolerance")->envname("OKDROP_TOL");
    app->add_option("--threads", c.threads, "worker threads (0: machine parallelism)")->envname("OKDROP_THREADS");
    app->add_option("--seed", c.seed, "random seed")->envname("OKDROP_SEED");
    app->add_option("--epsilon", c.epsilon)->envname("OKDROP_EPSILON");
    app->add_option("--kappa", c.kappa)->envname("OKDROP_KAPPA");
    app->add_option("--delta-bar", c.delta_bar)->envname("OKDROP_DELTA_BAR");
    app->add_option("--gamma", c.gamma)->envname("OKDROP_GAMMA");
    app->add_option("--ell", c.ell, "torus side")->envname("OKDROP_ELL");
    app->add_option("--c1", c.c1)->envname("OKDROP_C1");
    app->add_option("--c2", c.c2)->envname("OKDROP_C2");
    app->add_option("--c3", c.c3)->envname("OKDROP_C3");
    app->add_option("--eps0", c.eps0, "smallness guard on epsilon")->envname("OKDROP_EPS0");
    app->add_option("--tau", c.tau, "lattice modulus A B (tau = A + iB)")->expected(2);
    app->add_option("--density", c.density)->envname("OKDROP_DENSITY");
    app->add_flag("--paper-normalization", c.paper_normalization, "unit density, cell area 2 pi per point");
}

Json read_input(const Common &c, bool required) {
    if (c.input.empty()) {
        if (required)
            throw UsageError("--input is required");
        return Json();
    }
    std::string text;
    const auto first = c.input.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (c.input[first] == '{' || c.input[first] == '[')) {
        text = c.input;
    } else if (c.input == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream in(c.input);
        if (!in)
            throw UsageError("cannot open input file " + c.input);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
}

ModelParams apply(ModelParams p, const Common &c) {
    const std::pair<double, double *> overrides[] = {{c.epsilon, &p.epsilon}, {c.kappa, &p.kappa}, {c.delta_bar, &p.delta_bar},
                                                     {c.gamma, &p.gamma},     {c.ell, &p.ell},     {c.c1, &p.c1},
                                                     {c.c2, &p.c2},           {c.c3, &p.c3},       {c.eps0, &p.eps0}};
    for (const auto &[v, dst] : overrides)
        if (!std::isnan(v))
            *dst = v;
    return p;
}

DropletConfig droplet_input(const Common &c) {
    DropletConfig cfg = droplet_config_from_json(read_input(c, true));
    cfg.params = apply(cfg.params, c);
    return cfg;
}

LatticeSpec lattice_from_flags(const Common &c) {
    LatticeSpec s;
    if (!c.tau.empty())
        s.tau = {c.tau[0], c.tau[1]};
    if (!std::isnan(c.density))
        s.density = c.density;
    if (c.paper_normalization)
        s.density = 1.0;
    return s;
}

PointConfig point_input(const Common &c) {
    const Json j = read_input(c, false);
    if (j.is_null())
        return lattice_config(lattice_from_flags(c));
    return point_config_from_json(j);
}

void emit(const Common &c, const Json &j, const Csv *csv) {
    std::string text;
    if (c.format == "csv") {
        if (!csv)
            throw UsageError("this subcommand emits JSON only; CSV is for traces and tables");
        std::ostringstream os;
        for (std::size_t i = 0; i < csv->header.size(); ++i)
            os << (i ? "," : "") << csv->header[i];
        os << "\n";
        for (const auto &row : csv->rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << row[i];
            os << "\n";
        }
        text = os.str();
    } else {
        text = j.dump(2) + "\n";
    }
    if (c.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(c.output);
        if (!out)
            throw UsageError("cannot open output file " + c.output);
        out << text;
    }
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s)
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

// ---- subcommands ----

struct GreenArgs {
    double side = 1.0;
    std::vector<double> points;
};

void cmd_green(const Common &c, const GreenArgs &a) {
    const Json in = read_input(c, false);
    double side = a.side;
    double screening = std::isnan(c.kappa) ? 0.0 : c.kappa;
    std::vector<Vec2> pts;
    if (!in.is_null()) {
        if (!in.is_object())
            throw SchemaError("", "expected an object");
        if (in.contains("side"))
            side = vec2_from_json(Json::array({in["side"], 0.0}), "/side").x;
        if (in.contains("screening"))
            screening = vec2_from_json(Json::array({in["screening"], 0.0}), "/screening").x;
        if (in.contains("points")) {
            if (!in["points"].is_array())
                throw SchemaError("/points", "expected an array");
            for (std::size_t i = 0; i < in["points"].size(); ++i)
                pts.push_back(vec2_from_json(in["points"][i], "/points/" + std::to_string(i)));
        }
    }
    if (a.points.size() % 2 != 0)
        throw UsageError("--points takes x y pairs");
    for (std::size_t i = 0; i + 1 < a.points.size(); i += 2)
        pts.push_back({a.points[i], a.points[i + 1]});
    if (pts.empty())
        throw UsageError("no evaluation points (use --points or an input with \"points\")");
    const TorusGeometry geom{side, screening};
    geom.validate();
    const PeriodicGreen g(geom, c.tol);
    const KernelSplit split = g.split();
    Json vals = Json::array();
    Csv csv{{"x", "y", "G", "S", "grad_x", "grad_y"}, {}};
    for (const auto &x : pts) {
        const double v = g.value(x);
        const double s = g.regular_part(x);
        const Vec2 gr = g.gradient(x);
        vals.push_back({{"x", to_json(x)}, {"G", v}, {"S", s}, {"grad", to_json(gr)}});
        csv.rows.push_back({num(x.x), num(x.y), num(v), num(s), num(gr.x), num(gr.y)});
    }
    const Json out{{"side", side},
                   {"screening", screening},
                   {"split",
                    {{"singular_coefficient", split.singular_coefficient},
                     {"regular_part_at_zero", split.regular_part_at_zero},
                     {"alpha", split.truncation.alpha},
                     {"images", split.truncation.image_count},
                     {"modes", split.truncation.mode_count}}},
                   {"values", vals}};
    emit(c, out, &csv);
}

void cmd_w_lattice(const Common &c) {
    const LatticeSpec s = lattice_from_flags(c);
    const WEstimate w = w_simple_lattice(s);
    Json j = to_json(w);
    j["tau"] = Json::array({s.tau.real(), s.tau.imag()});
    j["density"] = s.density;
    emit(c, j, nullptr);
}

void cmd_w_config(const Common &c) {
    const PointConfig cfg = point_input(c);
    Json j = to_json(w_periodic_config(cfg));
    j["n"] = cfg.size();
    j["config"] = to_json(cfg);
    emit(c, j, nullptr);
}

struct DirectArgs {
    std::vector<double> radii;
    std::vector<double> etas{0.02, 0.01, 0.005};
};

void cmd_w_direct(const Common &c, DirectArgs a) {
    const PointConfig cfg = point_input(c);
    if (a.radii.empty())
        for (int i = 0; i < 12; ++i)
            a.radii.push_back(30.0 + 0.25 * i);
    const WEstimate w = w_direct(cfg, a.radii, a.etas);
    Csv csv{{"R", "W"}, {}};
    for (std::size_t i = 0; i < w.radii.size(); ++i)
        csv.rows.push_back({num(w.radii[i]), num(w.per_radius[i])});
    Json j = to_json(w);
    j["periodic_formula"] = w_periodic_config(cfg).value;
    emit(c, j, &csv);
}

void cmd_ok_energy(const Common &c) {
    const DropletConfig cfg = droplet_input(c);
    const ModelParams &p = cfg.params;
    const EnergyBreakdown eb = ebar_energy(cfg);
    const Json out{{"params", to_json(p)},
                   {"n_droplets", cfg.droplets.size()},
                   {"background_constant", p.delta_bar * p.delta_bar * p.ell * p.ell / (2.0 * p.kappa * p.kappa)},
                   {"Ebar", to_json(eb)},
                   {"E_eps", to_json(e_eps_energy(cfg))},
                   {"F_eps", to_json(f_eps_from_ebar(eb, p))}};
    emit(c, out, nullptr);
}

void cmd_expansion(const Common &c, double w_min) {
    const Json in = read_input(c, false);
    ModelParams p;
    if (!in.is_null())
        p = in.contains("params") ? params_from_json(in["params"], p, "/params") : params_from_json(in, p);
    p = apply(p, c);
    p.validate();
    const double m = p.m_limit();
    if (std::isnan(w_min))
        w_min = w_scaling(w_simple_lattice({}).value, m);
    const ExpansionTerms t = expansion_min_energy(p, w_min);
    const auto mc = min_corrected(p);
    const Json out{{"params", to_json(p)},
                   {"m", m},
                   {"w_min", w_min},
                   {"leading", t.leading},
                   {"log_correction", t.log_correction},
                   {"renormalized", t.renormalized},
                   {"total", t.total},
                   {"mu_bar", p.mu_bar()},
                   {"mu_bar_eps", mc.mu_bar_eps},
                   {"min_corrected", mc.min_value},
                   {"leading_order_min", leading_order_energy(p.mu_bar(), p)}};
    emit(c, out, nullptr);
}

void cmd_m_eps(const Common &c) {
    const DropletConfig cfg = droplet_input(c);
    const MEpsBreakdown m = m_eps(cfg);
    emit(c,
         {{"isoperimetric", m.isoperimetric}, {"large", m.large}, {"mid", m.mid}, {"small", m.small}, {"total", m.total}},
         nullptr);
}

void cmd_shape_metrics(const Common &c) {
    const Json in = read_input(c, true);
    std::vector<Shape> shapes;
    if (in.is_object() && in.contains("droplets")) {
        for (const auto &d : droplet_config_from_json(in).droplets)
            shapes.push_back(d.shape);
    } else if (in.is_object() && in.contains("shapes")) {
        if (!in["shapes"].is_array())
            throw SchemaError("/shapes", "expected an array");
        for (std::size_t i = 0; i < in["shapes"].size(); ++i)
            shapes.push_back(shape_from_json(in["shapes"][i], "/shapes/" + std::to_string(i)));
    } else {
        shapes.push_back(shape_from_json(in));
    }
    Json arr = Json::array();
    for (const auto &s : shapes) {
        validate_shape(s);
        const FraenkelResult f = fraenkel_asymmetry(s);
        const BonnesenRecord b = bonnesen_check(s);
        arr.push_back({{"shape", to_json(s)},
                       {"area", shape_area(s)},
                       {"perimeter", shape_perimeter(s)},
                       {"D", isoperimetric_deficit(s)},
                       {"alpha", f.alpha},
                       {"best_ball", {{"center", to_json(f.best_ball.center)}, {"radius", f.best_ball.radius}}},
                       {"bonnesen",
                        {{"circumradius", b.circumradius}, {"fraenkel_radius", b.fraenkel_radius}, {"ratio", b.ratio}}}});
    }
    emit(c, {{"shapes", arr}}, nullptr);
}

struct BallArgs {
    double beta = unset;
    double r0 = unset;
    double target = unset;
    double c = unset;
    int angular = 32;
    int radial = 8;
};

void cmd_ball_construct(const Common &c, const BallArgs &a) {
    const DropletConfig cfg = droplet_input(c);
    const double beta = std::isnan(a.beta) ? cfg.params.beta() : a.beta;
    const BallCollection init = initial_cover(cfg, beta);
    const BallCollection merged = merge_to_disjoint(init);
    Json out{{"beta", beta}, {"initial", to_json(init)}, {"merged", to_json(merged)}};
    if (!std::isnan(a.target))
        out["grown"] = to_json(grow(init, a.target, std::isnan(a.r0) ? -1.0 : a.r0));
    emit(c, out, nullptr);
}

void cmd_ball_verify(const Common &c, const BallArgs &a) {
    const DropletConfig cfg = droplet_input(c);
    BallVerifyOptions o;
    if (!std::isnan(a.beta))
        o.beta = a.beta;
    if (!std::isnan(a.r0))
        o.r0 = a.r0;
    if (!std::isnan(a.c))
        o.c = a.c;
    o.angular_nodes = a.angular;
    o.radial_order = a.radial;
    const double r = std::isnan(a.target) ? (std::isnan(a.r0) ? default_r0(cfg.params.ell_eps()) : a.r0) : a.target;
    const VerifyReport rep = verify_lower_bound(cfg, r, o);
    Csv csv{{"cx", "cy", "radius", "lhs", "bound", "gap", "log_prediction", "violation"}, {}};
    for (const auto &b : rep.balls)
        csv.rows.push_back({num(b.ball.center.x), num(b.ball.center.y), num(b.ball.radius), num(b.lhs), num(b.bound),
                            num(b.gap), num(b.log_prediction), b.violation ? "1" : "0"});
    emit(c, to_json(rep), &csv);
}

struct OptimizeArgs {
    int restarts = 1;
    int points = 2;
    DescentOptions descent;
};

void cmd_optimize(const Common &c, OptimizeArgs a) {
    a.descent.seed = c.seed;
    const Json in = read_input(c, false);
    Cell cell;
    std::vector<PointConfig> starts;
    if (!in.is_null()) {
        const PointConfig p = point_config_from_json(in);
        cell = p.cell;
        starts.push_back(p);
    } else {
        // Default: the sqrt(3)-aspect rectangle holding a triangular lattice of `points` at unit density.
        const double w = std::sqrt(2.0 * pi * a.points / std::sqrt(3.0));
        cell = Cell::rectangle(w, std::sqrt(3.0) * w);
        for (int i = 0; i < std::max(1, a.restarts); ++i)
            starts.push_back(random_points(cell, static_cast<std::size_t>(a.points), c.seed + static_cast<std::uint64_t>(i)));
    }
    std::vector<DescentResult> runs(starts.size());
    parallel_for(runs.size(), [&](std::size_t i) { runs[i] = minimize_points(starts[i], a.descent); });
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].w.value < runs[best].w.value)
            best = i;
    const double target = w_simple_lattice({{0.5, std::sqrt(3.0) / 2.0}, starts[0].background}).value;
    Json j = to_json(runs[best]);
    j["target"] = target;
    j["gap"] = runs[best].w.value - target;
    Json finals = Json::array();
    for (std::size_t i = 0; i < runs.size(); ++i)
        finals.push_back({{"seed", c.seed + i}, {"final_W", runs[i].w.value}, {"iterations", runs[i].iterations}});
    j["restarts"] = finals;
    Csv csv{{"iteration", "W"}, {}};
    for (std::size_t i = 0; i < runs[best].trace.size(); ++i)
        csv.rows.push_back({std::to_string(i), num(runs[best].trace[i])});
    emit(c, j, &csv);
}

struct TestConfigArgs {
    int half_area = 14; // R^2 / (2 pi)
    std::string pattern = "triangular";
    int cols = 7;
    int rows = 8;
    std::vector<double> epsilons{1e-4, 1e-6, 1e-8};
    bool per_ball = false;
    std::string emit_config = "none";
};

void cmd_test_config(const Common &c, const TestConfigArgs &a) {
    TestConfigSpec spec;
    spec.R = std::sqrt(2.0 * pi * a.half_area);
    ModelParams p;
    p.ell = 1000.0;
    const Json in = read_input(c, false);
    if (!in.is_null())
        p = in.contains("params") ? params_from_json(in["params"], p, "/params") : params_from_json(in, p);
    spec.params = apply(p, c);
    spec.pattern = a.pattern == "square" ? square_pattern(spec.R) : triangular_pattern(spec.R, a.cols, a.rows);
    const double w_unit = w_periodic_config(spec.pattern).value;
    UpperBoundOptions o;
    o.epsilons = a.epsilons;
    o.per_ball = a.per_ball;
    const double w_target = a.pattern == "square" ? w_simple_lattice({{0.0, 1.0}, 1.0}).value : w_simple_lattice({}).value;
    const UpperBoundReport rep = upper_bound_energy(spec, w_target, o);
    Json j = to_json(rep);
    j["R"] = spec.R;
    j["pattern_W"] = w_unit;
    j["params"] = to_json(spec.params);
    const TestTiling t = test_tiling(spec);
    j["tiling"] = {{"epsilon", spec.params.epsilon}, {"tiles_per_side", t.tiles_per_side}, {"m", t.m}, {"droplet_count", std::llround(t.droplet_count)}};
    if (a.emit_config == "tile")
        j["config"] = to_json(build_test_tile(spec));
    else if (a.emit_config == "full")
        j["config"] = to_json(build_test_config(spec));
    Csv csv{{"epsilon", "F_eps", "m", "tiles_per_side", "interior", "annulus", "annulus_bound"}, {}};
    for (const auto &pt : rep.points)
        csv.rows.push_back({num(pt.epsilon), num(pt.f_eps), num(pt.m), std::to_string(pt.tiles_per_side), num(pt.interior),
                            num(pt.annulus), num(pt.annulus_bound)});
    emit(c, j, &csv);
}

int cmd_reproduce(const Common &c, const std::vector<int> &ids) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = run_acceptance(ids);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json arr = Json::array();
    Csv csv{{"criterion", "name", "paper_value", "computed", "tolerance", "result"}, {}};
    int failed = 0;
    std::fprintf(stderr, "%-4s %-32s %-28s %-44s %-30s %s\n", "#", "criterion", "paper value", "computed", "tolerance", "result");
    for (const auto &r : rows) {
        failed += r.pass ? 0 : 1;
        arr.push_back({{"criterion", r.id},
                       {"name", r.name},
                       {"paper_value", r.reference},
                       {"computed", r.computed},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass},
                       {"details", r.details}});
        csv.rows.push_back({std::to_string(r.id), csv_field(r.name), csv_field(r.reference), csv_field(r.computed),
                            csv_field(r.tolerance), r.pass ? "pass" : "fail"});
        std::fprintf(stderr, "%-4d %-32s %-28s %-44s %-30s %s\n", r.id, r.name.c_str(), r.reference.c_str(),
                     r.computed.c_str(), r.tolerance.c_str(), r.pass ? "pass" : "FAIL");
    }
    std::fprintf(stderr, "%d/%zu passed in %.1f s\n", static_cast<int>(rows.size()) - failed, rows.size(), secs);
    emit(c, {{"rows", arr}, {"passed", static_cast<int>(rows.size()) - failed}, {"failed", failed}}, &csv);
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"okdrop: Ohta-Kawasaki droplet energies, renormalized energy and ball construction"};
    app.require_subcommand(1);
    Common common;

    auto *green = app.add_subcommand("green-eval", "periodic Green's function, regular part and gradient");
    GreenArgs ga;
    green->add_option("--side", ga.side, "torus side")->envname("OKDROP_SIDE");
    green->add_option("--points", ga.points, "evaluation points x1 y1 x2 y2 ...");

    auto *wl = app.add_subcommand("w-lattice", "renormalized energy of a simple lattice (closed form)");
    auto *wc = app.add_subcommand("w-config", "renormalized energy of a periodic point configuration");
    auto *wd = app.add_subcommand("w-direct", "renormalized energy from its defining limit");
    DirectArgs da;
    wd->add_option("--radii", da.radii, "cutoff half-widths R");
    wd->add_option("--etas", da.etas, "decreasing excision radii");

    auto *ok = app.add_subcommand("ok-energy", "Ebar, E_eps and F_eps breakdowns of a droplet configuration");
    auto *ex = app.add_subcommand("expansion", "three-term expansion of the minimal energy");
    double w_min = unset;
    ex->add_option("--w-min", w_min, "minimal W at density m (default: triangular value)");
    auto *me = app.add_subcommand("m-eps", "discrepancy functional M_eps");
    auto *sm = app.add_subcommand("shape-metrics", "isoperimetric deficit, Fraenkel asymmetry, Bonnesen check");

    BallArgs ba;
    auto *bc = app.add_subcommand("ball-construct", "initial cover, merge, and optional growth");
    auto *bv = app.add_subcommand("ball-verify", "compare per-ball field energy with the lower bound");
    for (auto *sub : {bc, bv}) {
        sub->add_option("--beta", ba.beta, "area threshold for the initial cover")->envname("OKDROP_BETA");
        sub->add_option("--r0", ba.r0, "growth limit")->envname("OKDROP_R0");
    }
    bc->add_option("--target-r", ba.target, "grow to this total radius");
    bv->add_option("--r", ba.target, "total radius to grow to (default r0)");
    bv->add_option("--ball-c", ba.c, "constant c of the bound (default kappa^4)")->envname("OKDROP_BALL_C");
    bv->add_option("--angular", ba.angular, "angular nodes of the field quadrature")->envname("OKDROP_ANGULAR");
    bv->add_option("--radial", ba.radial, "radial Gauss order per panel")->envname("OKDROP_RADIAL");

    auto *op = app.add_subcommand("optimize", "gradient descent of W over periodic point configurations");
    OptimizeArgs oa;
    op->add_option("--restarts", oa.restarts, "random starts (without --input)");
    op->add_option("--points", oa.points, "points per cell (without --input)");
    op->add_option("--max-iters", oa.descent.max_iters)->envname("OKDROP_MAX_ITERS");
    op->add_option("--step", oa.descent.step)->envname("OKDROP_STEP");
    op->add_option("--grad-tol", oa.descent.grad_tol)->envname("OKDROP_GRAD_TOL");

    auto *tc = app.add_subcommand("test-config", "upper-bound test configuration and its F_eps trend");
    TestConfigArgs ta;
    tc->add_option("--half-area", ta.half_area, "R^2 / (2 pi)");
    tc->add_option("--pattern", ta.pattern)->check(CLI::IsMember({"triangular", "square"}));
    tc->add_option("--cols", ta.cols);
    tc->add_option("--rows", ta.rows);
    tc->add_option("--epsilons", ta.epsilons);
    tc->add_flag("--per-ball", ta.per_ball, "field energy in and around one droplet");
    tc->add_option("--emit-config", ta.emit_config, "none, tile or full")->check(CLI::IsMember({"none", "tile", "full"}));

    auto *rp = app.add_subcommand("reproduce", "run the acceptance suite and print the summary table");
    std::vector<int> ids;
    rp->add_option("--criteria", ids, "subset of criteria 1..12");

    for (auto *sub : app.get_subcommands({}))
        add_common(sub, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (common.threads > 0)
            set_thread_count(common.threads);
        if (common.tau.size() != 0 && common.tau.size() != 2)
            throw UsageError("--tau takes two numbers");
        if (*green)
            cmd_green(common, ga);
        else if (*wl)
            cmd_w_lattice(common);
        else if (*wc)
            cmd_w_config(common);
        else if (*wd)
            cmd_w_direct(common, da);
        else if (*ok)
            cmd_ok_energy(common);
        else if (*ex)
            cmd_expansion(common, w_min);
        else if (*me)
            cmd_m_eps(common);
        else if (*sm)
            cmd_shape_metrics(common);
        else if (*bc)
            cmd_ball_construct(common, ba);
        else if (*bv)
            cmd_ball_verify(common, ba);
        else if (*op)
            cmd_optimize(common, oa);
        else if (*tc)
            cmd_test_config(common, ta);
        else if (*rp)
            return cmd_reproduce(common, ids);
    } catch (const SchemaError &e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
