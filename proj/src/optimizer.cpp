#include "okdrop/optimizer.hpp"

#include "okdrop/errors.hpp"
#include "okdrop/green.hpp"
#include "okdrop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace okdrop {

namespace {

constexpr double pi = std::numbers::pi;

double grad_norm(const std::vector<Vec2> &g) {
    CompensatedSum s;
    for (const auto &v : g)
        s += norm2(v);
    return std::sqrt(s.value());
}

double w_of(const PeriodicGreen &g0, const std::vector<Vec2> &pts, double area) {
    CompensatedSum s;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            s += g0.value(pts[i] - pts[j]);
    s += 0.5 * static_cast<double>(pts.size()) * g0.regular_part_at_zero();
    return 4.0 * pi * pi * s.value() / area;
}

std::vector<Vec2> grad_of(const PeriodicGreen &g0, const std::vector<Vec2> &pts, double area) {
    const std::size_t n = pts.size();
    std::vector<Vec2> g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec2 f = g0.gradient(pts[i] - pts[j]);
            g[i] += f;
            g[j] -= f;
        }
    for (auto &v : g)
        v *= 4.0 * pi * pi / area;
    return g;
}

double min_pair_distance(const Cell &cell, const std::vector<Vec2> &pts) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = std::min(d, norm(cell.minimal_image(pts[i] - pts[j])));
    return d;
}

} // namespace

void DescentOptions::validate() const {
    if (max_iters <= 0 || !(step > 0.0) || !(backtracking > 0.0 && backtracking < 1.0) || !(armijo > 0.0 && armijo < 1.0) ||
        !(grad_tol > 0.0))
        throw DomainError("DescentOptions: max_iters, step, grad_tol must be positive and backtracking, armijo in (0, 1)");
}

std::vector<Vec2> w_gradient(const PointConfig &config) {
    config.validate();
    if (config.min_separation() <= 0.0)
        throw SingularEvaluation("w_gradient: coincident points");
    const PeriodicGreen g0(config.cell, 0.0);
    return grad_of(g0, config.points, config.cell.area());
}

DescentResult minimize_points(const PointConfig &start, const DescentOptions &opts) {
    opts.validate();
    start.validate();
    const Cell &cell = start.cell;
    const double guard = 1e-6 * cell.scale();
    if (min_pair_distance(cell, start.points) < guard)
        throw SingularEvaluation("minimize_points: start has colliding points");
    const PeriodicGreen g0(cell, 0.0);
    const double area = cell.area();

    DescentResult res;
    std::vector<Vec2> x = start.points;
    double w = w_of(g0, x, area);
    std::vector<Vec2> g = grad_of(g0, x, area);
    double gn = grad_norm(g);
    res.trace.push_back(w);
    double t = opts.step;
    std::vector<Vec2> trial(x.size());
    while (gn >= opts.grad_tol && res.iterations < opts.max_iters) {
        t = std::min(opts.step, 2.0 * t);
        bool accepted = false;
        double w_trial = w;
        while (t > 1e-16 * opts.step) {
            for (std::size_t i = 0; i < x.size(); ++i)
                trial[i] = cell.wrap(x[i] - g[i] * t);
            if (min_pair_distance(cell, trial) >= guard) {
                w_trial = w_of(g0, trial, area);
                if (w_trial <= w - opts.armijo * t * gn * gn) {
                    accepted = true;
                    break;
                }
            }
            t *= opts.backtracking;
        }
        if (!accepted) {
            res.diagnostic = "line search failed: step underflow at |grad| = " + std::to_string(gn);
            break;
        }
        x = trial;
        w = w_trial;
        g = grad_of(g0, x, area);
        gn = grad_norm(g);
        res.trace.push_back(w);
        ++res.iterations;
    }
    res.config = PointConfig::neutral(cell, x);
    res.w.value = w;
    res.w.method = WMethod::periodic_formula;
    res.grad_norm = gn;
    res.converged = gn < opts.grad_tol;
    return res;
}

PointConfig random_points(const Cell &cell, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double fx = u(rng);
        const double fy = u(rng);
        pts.push_back(cell.from_fractional({fx, fy}));
    }
    return PointConfig::neutral(cell, pts);
}

RestartSummary multistart(const Cell &cell, std::size_t n, int count, double w_target, double tol,
                          const DescentOptions &opts) {
    RestartSummary out;
    out.runs.resize(static_cast<std::size_t>(count));
    parallel_for(out.runs.size(), [&](std::size_t i) {
        DescentOptions o = opts;
        o.seed = opts.seed + i;
        out.runs[i] = minimize_points(random_points(cell, n, o.seed), o);
    });
    for (const auto &r : out.runs) {
        const bool ok = std::abs(r.w.value - w_target) <= tol;
        out.reached.push_back(ok);
        out.successes += ok ? 1 : 0;
    }
    return out;
}

void TestConfigSpec::validate() const {
    params.validate();
    pattern.validate();
    if (!(R > 0.0))
        throw DomainError("TestConfigSpec: R must be positive");
    const double q = R * R / (2.0 * pi);
    if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, q) || std::round(q) < 1.0)
        throw DomainError("TestConfigSpec: R^2 must lie in 2 pi N");
    const double side = 2.0 * R;
    const Cell &c = pattern.cell;
    if (std::abs(c.a().x - side) > 1e-9 * side || std::abs(c.a().y) > 1e-9 * side ||
        std::abs(c.b().x) > 1e-9 * side || std::abs(c.b().y - side) > 1e-9 * side)
        throw DomainError("TestConfigSpec: pattern cell must be the square of side 2R");
    if (std::abs(pattern.background - 1.0) > 1e-9)
        throw DomainError("TestConfigSpec: pattern must have unit density");
}

PointConfig triangular_pattern(double R, int cols, int rows) {
    if (cols <= 0 || rows <= 0 || rows % 2 != 0)
        throw DomainError("triangular_pattern: need positive cols and an even row count");
    const double side = 2.0 * R;
    const double dx = side / cols, dy = side / rows;
    std::vector<Vec2> pts;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            pts.push_back({(c + 0.5 * (r % 2)) * dx, r * dy});
    const PointConfig p = PointConfig::neutral(Cell::square(side), pts);
    if (std::abs(p.background - 1.0) > 1e-9)
        throw DomainError("triangular_pattern: rows * cols must equal 2 R^2 / pi");
    return p;
}

PointConfig square_pattern(double R) {
    const double n = 2.0 * R * R / pi;
    const long k = std::lround(std::sqrt(n));
    if (std::abs(static_cast<double>(k * k) - n) > 1e-9 * n)
        throw DomainError("square_pattern: 2 R^2 / pi must be a perfect square");
    const double h = 2.0 * R / static_cast<double>(k);
    std::vector<Vec2> pts;
    for (long i = 0; i < k; ++i)
        for (long j = 0; j < k; ++j)
            pts.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
    return PointConfig::neutral(Cell::square(2.0 * R), pts);
}

TestTiling test_tiling(const TestConfigSpec &spec) {
    spec.validate();
    const ModelParams &p = spec.params;
    const double mu = p.mu_bar_eps();
    if (!(mu > 0.0))
        throw DomainError("test_tiling: corrected density must be positive");
    const double le = p.ell_eps();
    const double k = std::floor(le * std::sqrt(2.0 * mu) / (2.0 * spec.R * p.rbar_eps()));
    if (k < 1.0)
        throw DomainError("test_tiling: torus too small for one tile of side 2R at density m_{eps,R}");
    TestTiling t;
    t.tiles_per_side = static_cast<long>(k);
    t.m = 4.0 * spec.R * spec.R * k * k / (le * le);
    t.droplet_count = t.m * le * le / (2.0 * pi);
    return t;
}

namespace {

DropletConfig tiled(const TestConfigSpec &spec, long tiles) {
    const ModelParams &p = spec.params;
    const TestTiling t = test_tiling(spec);
    const double L = p.log_eps();
    // Pattern coordinates to physical: divide by sqrt(m) into blown-up units, then by sqrt|ln eps|.
    const double s = 1.0 / std::sqrt(t.m * L);
    const double tile = 2.0 * spec.R * s;
    const double radius = p.r_prime_eps() / std::sqrt(L);
    DropletConfig c;
    c.params = p;
    c.params.ell = tile * static_cast<double>(tiles);
    for (long i = 0; i < tiles; ++i)
        for (long j = 0; j < tiles; ++j)
            for (const auto &q : spec.pattern.points)
                c.droplets.push_back({q * s + Vec2{static_cast<double>(i), static_cast<double>(j)} * tile, Disk{radius}});
    c.validate();
    return c;
}

} // namespace

DropletConfig build_test_config(const TestConfigSpec &spec) {
    const TestTiling t = test_tiling(spec);
    DropletConfig c = tiled(spec, t.tiles_per_side);
    c.params.ell = spec.params.ell;
    return c;
}

DropletConfig build_test_tile(const TestConfigSpec &spec) { return tiled(spec, 1); }

UpperBoundReport upper_bound_energy(const TestConfigSpec &spec, double w_target, const UpperBoundOptions &opts) {
    UpperBoundReport rep;
    rep.w_target = w_target;
    const ModelParams &p0 = spec.params;
    const double m = p0.m_limit();
    rep.target = std::pow(3.0, 4.0 / 3.0) * w_scaling(w_target, m) +
                 std::pow(3.0, 2.0 / 3.0) * (p0.delta_bar - p0.delta_c()) / 8.0;
    for (double eps : opts.epsilons) {
        TestConfigSpec s = spec;
        s.params.epsilon = eps;
        const TestTiling t = test_tiling(s);
        const DropletConfig tile = build_test_tile(s);
        UpperBoundPoint pt;
        pt.epsilon = eps;
        pt.m = t.m;
        pt.tiles_per_side = t.tiles_per_side;
        pt.f_eps = f_eps_energy(tile).total;
        const double rbar = s.params.rbar_eps();
        pt.interior_limit = std::pow(3.0, 4.0 / 3.0) * pi / 8.0;
        pt.interior_exact = pi * std::pow(rbar, 4) / 8.0;
        pt.annulus_bound = 0.5 * pi * std::pow(rbar, 4) * std::log(opts.eta / s.params.rho_eps());
        if (opts.per_ball) {
            const HField h(tile);
            const Vec2 a = h.droplets().front().center;
            const double rp = s.params.r_prime_eps();
            pt.interior = h.annulus_energy(a, 0.0, rp, 0.0, {}, opts.angular_nodes, opts.radial_order);
            pt.annulus = h.annulus_energy(a, rp, opts.eta, 0.0, {}, opts.angular_nodes, opts.radial_order);
        }
        rep.points.push_back(pt);
    }
    rep.decreasing_in_eps = rep.gap_shrinking = rep.points.size() > 1;
    for (std::size_t i = 1; i < rep.points.size(); ++i) {
        const auto &prev = rep.points[i - 1], &cur = rep.points[i];
        const bool smaller = cur.epsilon < prev.epsilon;
        rep.decreasing_in_eps = rep.decreasing_in_eps && smaller && cur.f_eps > prev.f_eps;
        rep.gap_shrinking = rep.gap_shrinking && smaller &&
                            std::abs(cur.f_eps - rep.target) < std::abs(prev.f_eps - rep.target);
    }
    if (!rep.points.empty())
        rep.final_gap = rep.points.back().f_eps - rep.target;
    return rep;
}

} // namespace okdrop
