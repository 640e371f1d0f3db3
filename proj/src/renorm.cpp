#include "okdrop/renorm.hpp"

#include "okdrop/errors.hpp"
#include "okdrop/green.hpp"
#include "okdrop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace okdrop {

namespace {
constexpr double pi = std::numbers::pi;

// C^3 partition profile: 1 on [0, 1/2], 0 from 1 on.
double ball_profile(double t) {
    if (t <= 0.5)
        return 1.0;
    if (t >= 1.0)
        return 0.0;
    const double u = 2.0 * t - 1.0;
    return 1.0 - u * u * u * u * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
}
} // namespace

void LatticeSpec::validate() const {
    if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag()))
        throw DomainError("lattice modulus must satisfy Im(tau) > 0");
    if (!(density > 0.0) || !std::isfinite(density))
        throw DomainError("lattice density must be positive");
}

PointConfig PointConfig::neutral(const Cell &cell, std::vector<Vec2> points) {
    PointConfig c;
    c.cell = cell;
    c.points = std::move(points);
    c.background = 2.0 * pi * static_cast<double>(c.points.size()) / cell.area();
    return c;
}

void PointConfig::validate() const {
    if (points.empty())
        throw DomainError("point configuration has no points");
    for (const auto &p : points)
        if (!is_finite(p))
            throw DomainError("point configuration has a non-finite point");
    if (!(background > 0.0) || !std::isfinite(background))
        throw DomainError("background density must be positive");
    const double charge = 2.0 * pi * static_cast<double>(points.size());
    if (std::abs(charge - background * cell.area()) > 1e-9 * charge)
        throw DomainError("configuration is not neutral: 2 pi n must equal m |cell|");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (norm(cell.minimal_image(points[i] - points[j])) < 1e-14 * cell.scale())
                throw DomainError("coincident points (modulo the cell)");
}

double PointConfig::min_separation() const {
    double best = INFINITY;
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j)
            if (i != 0 || j != 0)
                best = std::min(best, norm(cell.a() * i + cell.b() * j));
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, norm(cell.minimal_image(points[i] - points[j])));
    return best;
}

std::string to_string(WMethod m) {
    switch (m) {
    case WMethod::lattice_closed_form:
        return "lattice_closed_form";
    case WMethod::periodic_formula:
        return "periodic_formula";
    case WMethod::direct_definition:
        return "direct_definition";
    }
    return "unknown";
}

std::complex<double> dedekind_eta(std::complex<double> tau, int terms) {
    if (!(tau.imag() > 0.0))
        throw DomainError("dedekind_eta: Im(tau) must be positive");
    if (terms < 1)
        throw DomainError("dedekind_eta: terms must be positive");
    const std::complex<double> i2pi(0.0, 2.0 * pi);
    const std::complex<double> q = std::exp(i2pi * tau);
    std::complex<double> prod = 1.0, qn = 1.0;
    for (int n = 1; n <= terms; ++n) {
        qn *= q;
        prod *= 1.0 - qn;
    }
    return std::exp(i2pi * tau / 24.0) * prod;
}

PointConfig lattice_config(const LatticeSpec &spec) {
    spec.validate();
    // Dual basis u1 = (1, 0)/s, u2 = (a, b)/s with s^2 = 2 pi b; the lattice
    // basis v_i satisfies v_i . u_j = delta_ij and spans area 2 pi.
    const double a = spec.tau.real(), b = spec.tau.imag();
    const double s = std::sqrt(2.0 * pi * b);
    const Vec2 v1{s, -s * a / b};
    const Vec2 v2{0.0, s / b};
    const double k = 1.0 / std::sqrt(spec.density);
    PointConfig c;
    c.cell = Cell(v1 * k, v2 * k);
    c.points = {Vec2{0.0, 0.0}};
    c.background = spec.density;
    return c;
}

WEstimate w_simple_lattice(const LatticeSpec &spec) {
    spec.validate();
    const double b = spec.tau.imag();
    const double eta = std::abs(dedekind_eta(spec.tau, 80));
    const double w1 = -0.5 * std::log(std::sqrt(2.0 * pi * b) * eta * eta);
    WEstimate est;
    est.value = w_scaling(w1, spec.density);
    est.method = WMethod::lattice_closed_form;
    return est;
}

double w_scaling(double w_unit, double m) {
    if (!(m > 0.0))
        throw DomainError("w_scaling: density must be positive");
    return m * (w_unit - 0.25 * std::log(m));
}

double potential_from_points(const PointConfig &config, Vec2 x) {
    config.validate();
    const PeriodicGreen g0(config.cell, 0.0);
    CompensatedSum s;
    for (const auto &p : config.points)
        s += g0.value(x - p);
    return 2.0 * pi * s.value();
}

WEstimate w_periodic_config(const PointConfig &config) {
    config.validate();
    const PeriodicGreen g0(config.cell, 0.0);
    const std::size_t n = config.points.size();
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            s += g0.value(config.points[i] - config.points[j]);
    s += 0.5 * static_cast<double>(n) * g0.regular_part_at_zero();
    WEstimate est;
    est.value = 4.0 * pi * pi * s.value() / config.cell.area();
    est.method = WMethod::periodic_formula;
    return est;
}

double cutoff_ramp(double t) {
    if (t <= 0.0)
        return 0.0;
    if (t >= 1.0)
        return 1.0;
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double cutoff_chi(double R, Vec2 x) {
    return cutoff_ramp(R - std::abs(x.x)) * cutoff_ramp(R - std::abs(x.y));
}

namespace {

struct Node {
    Vec2 x;
    double weight; // includes the integrand value
};

// Linear least squares y = c0 + c1 t; returns (c0, c1).
std::pair<double, double> fit_line(const std::vector<double> &t, const std::vector<double> &y) {
    const double n = static_cast<double>(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double den = n * stt - st * st;
    const double c1 = (n * sty - st * sy) / den;
    return {(sy - c1 * st) / n, c1};
}

} // namespace

WEstimate w_direct(const PointConfig &config, const std::vector<double> &radii,
                   const std::vector<double> &eta_seq, const DirectOptions &opts) {
    config.validate();
    if (radii.empty())
        throw DomainError("w_direct: no radii supplied");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 1.0))
            throw DomainError("w_direct: radii must exceed the ramp width 1");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw DomainError("w_direct: radii must be increasing");
    }
    if (eta_seq.size() < 2)
        throw DomainError("w_direct: at least two eta values are required");
    for (std::size_t i = 0; i < eta_seq.size(); ++i) {
        if (!(eta_seq[i] > 0.0))
            throw DomainError("w_direct: eta values must be positive");
        if (i > 0 && !(eta_seq[i] < eta_seq[i - 1]))
            throw DomainError("w_direct: eta sequence must be decreasing");
    }
    const double sep = config.min_separation();
    if (!(eta_seq.front() <= sep / 10.0))
        throw DomainError("w_direct: eta must stay below a tenth of the minimal point separation");

    const Cell &cell = config.cell;
    const PeriodicGreen g0(cell, 0.0);
    const std::size_t npts = config.points.size();
    std::vector<Vec2> pts;
    for (const auto &p : config.points)
        pts.push_back(cell.wrap(p));
    const double rho0 = 0.4 * sep;

    auto energy_density = [&](Vec2 x) {
        Vec2 g{0.0, 0.0};
        for (const auto &p : pts)
            g += g0.gradient(x - p);
        g *= 2.0 * pi;
        return 0.5 * norm2(g);
    };

    const auto &gl = gauss_legendre(opts.gl_order);
    const int q = opts.gl_order;

    // Smooth part over the fundamental parallelogram: f (1 - sum psi).
    const double side = std::max(norm(cell.a()), norm(cell.b()));
    const int panels =
        opts.panels > 0 ? opts.panels : std::max(8, static_cast<int>(std::ceil(4.0 * side / rho0)));
    const std::size_t n_smooth = static_cast<std::size_t>(panels) * panels * q * q;
    std::vector<Node> smooth(n_smooth);
    parallel_for((n_smooth + 255) / 256, [&](std::size_t chunk) {
        const std::size_t end = std::min(n_smooth, (chunk + 1) * 256);
        for (std::size_t idx = chunk * 256; idx < end; ++idx) {
            std::size_t r = idx;
            const int j = static_cast<int>(r % q);
            r /= q;
            const int i = static_cast<int>(r % q);
            r /= q;
            const int pv = static_cast<int>(r % panels);
            const int pu = static_cast<int>(r / panels);
            const double u = (pu + 0.5 + 0.5 * gl.nodes[i]) / panels;
            const double v = (pv + 0.5 + 0.5 * gl.nodes[j]) / panels;
            const Vec2 x = cell.from_fractional({u, v});
            double psi = 0.0;
            for (const auto &p : pts)
                psi += ball_profile(norm(cell.minimal_image(x - p)) / rho0);
            const double w = gl.weights[i] * gl.weights[j] * 0.25 / (double(panels) * panels) * cell.area();
            smooth[idx] = {x, psi >= 1.0 ? 0.0 : w * (1.0 - psi) * energy_density(x)};
        }
    });

    // Annuli around each point in s = ln r, split at the eta values.
    std::vector<double> cuts(eta_seq.rbegin(), eta_seq.rend());
    cuts.push_back(rho0);
    const int ang = opts.angular_nodes;
    struct Piece {
        std::vector<Node> nodes;
    };
    // pieces[k] covers [eta_k, eta_{k-1}] (k >= 1) or [eta_0, rho0] (k = 0).
    std::vector<Piece> pieces(eta_seq.size());
    for (std::size_t k = 0; k < eta_seq.size(); ++k) {
        const double lo = std::log(eta_seq[k]);
        const double hi = std::log(k == 0 ? rho0 : eta_seq[k - 1]);
        const int np = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.5)));
        const double h = (hi - lo) / np;
        auto &nodes = pieces[k].nodes;
        nodes.resize(npts * np * q * ang);
        parallel_for(npts * np, [&](std::size_t job) {
            const std::size_t pj = job / np;
            const int pan = static_cast<int>(job % np);
            for (int i = 0; i < q; ++i) {
                const double s = lo + (pan + 0.5 + 0.5 * gl.nodes[i]) * h;
                const double r = std::exp(s);
                const double psi = ball_profile(r / rho0);
                for (int t = 0; t < ang; ++t) {
                    const double th = 2.0 * pi * t / ang;
                    const Vec2 off{r * std::cos(th), r * std::sin(th)};
                    const Vec2 x = pts[pj] + off;
                    const double w = 0.5 * h * gl.weights[i] * (2.0 * pi / ang) * r * r;
                    nodes[((pj * np + pan) * q + i) * ang + t] = {x, w * psi * energy_density(x)};
                }
            }
        });
    }

    // Translations L whose copy of the (slightly enlarged) cell meets K_R.
    auto translations = [&](double R) {
        const double reach = R + side + rho0;
        const Vec2 corners[4] = {{-reach, -reach}, {reach, -reach}, {-reach, reach}, {reach, reach}};
        double umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
        for (const auto &c : corners) {
            const Vec2 f = cell.to_fractional(c);
            umin = std::min(umin, f.x);
            umax = std::max(umax, f.x);
            vmin = std::min(vmin, f.y);
            vmax = std::max(vmax, f.y);
        }
        std::vector<Vec2> out;
        for (int i = static_cast<int>(std::floor(umin)) - 1; i <= static_cast<int>(std::ceil(umax)) + 1; ++i)
            for (int j = static_cast<int>(std::floor(vmin)) - 1; j <= static_cast<int>(std::ceil(vmax)) + 1;
                 ++j)
                out.push_back(cell.a() * i + cell.b() * j);
        return out;
    };

    WEstimate est;
    est.method = WMethod::direct_definition;
    est.radii = radii;
    double worst_slope = 0.0;
    std::ostringstream partial;
    for (double R : radii) {
        const auto shifts = translations(R);
        auto periodized = [&](Vec2 x) {
            double X = 0.0;
            for (const auto &L : shifts) {
                const Vec2 y = x + L;
                if (std::abs(y.x) < R && std::abs(y.y) < R)
                    X += cutoff_chi(R, y);
            }
            return X;
        };
        auto weighted = [&](const std::vector<Node> &nodes) {
            return parallel_sum(nodes.size(), [&](std::size_t i) {
                return nodes[i].weight == 0.0 ? 0.0 : nodes[i].weight * periodized(nodes[i].x);
            });
        };
        const double base = weighted(smooth);
        double point_mass = 0.0;
        for (const auto &p : pts)
            point_mass += periodized(p);
        const double norm_R = opts.normalize_by_cutoff_mass ? (2.0 * R - 1.0) * (2.0 * R - 1.0) : 4.0 * R * R;

        std::vector<double> vals, etas, logs;
        double annulus = 0.0;
        for (std::size_t k = 0; k < eta_seq.size(); ++k) {
            annulus += weighted(pieces[k].nodes);
            const double total = base + annulus + pi * std::log(eta_seq[k]) * point_mass;
            vals.push_back(total / norm_R);
            etas.push_back(eta_seq[k]);
            logs.push_back(std::log(eta_seq[k]));
        }
        const auto [c0, c1] = fit_line(etas, vals);
        (void)c1;
        const double slope = fit_line(logs, vals).second;
        worst_slope = std::max(worst_slope, std::abs(slope));
        est.per_radius.push_back(c0);
        partial << " R=" << R << ":" << c0;
    }
    est.eta_slope = worst_slope;
    if (worst_slope > opts.slope_tolerance)
        throw ConvergenceError("w_direct: eta sequence did not stabilise (slope " + std::to_string(worst_slope) +
                               "); partial estimates" + partial.str());
    CompensatedSum mean;
    for (double v : est.per_radius)
        mean += v;
    est.value = mean.value() / static_cast<double>(est.per_radius.size());
    const auto [mn, mx] = std::minmax_element(est.per_radius.begin(), est.per_radius.end());
    est.error_bar = *mx - *mn;
    return est;
}

} // namespace okdrop
