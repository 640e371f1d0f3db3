#include "okdrop/okenergy.hpp"

#include "okdrop/errors.hpp"
#include "okdrop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace okdrop {

namespace {

constexpr double pi = std::numbers::pi;
const double cbrt3 = std::cbrt(3.0);

const Disk *as_disk(const Shape &s) { return std::get_if<Disk>(&s); }

void require(bool ok, const char *what) {
    if (!ok)
        throw DomainError(what);
}

} // namespace

void ModelParams::validate() const {
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    require(epsilon < eps0, "epsilon is above the smallness guard eps0");
    require(std::isfinite(ell) && ell > 0.0, "ell must be positive");
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be positive");
    require(std::isfinite(delta_bar) && delta_bar > 0.0, "delta_bar must be positive");
    require(gamma > 0.0 && gamma < 1.0 / 6.0, "gamma must lie in (0, 1/6)");
    require(c1 >= 0.0 && c2 >= 0.0 && c3 >= 0.0, "M_eps constants must be non-negative");
    require(rho_eps() < 1.0, "rho_eps >= 1: epsilon too large");
}

double ModelParams::log_eps() const { return -std::log(epsilon); }
double ModelParams::delta_c() const { return 0.5 * cbrt3 * cbrt3 * kappa * kappa; }
double ModelParams::rho_eps() const {
    return cbrt3 * std::cbrt(epsilon) * std::pow(log_eps(), 1.0 / 6.0);
}
double ModelParams::rbar_eps() const { return std::cbrt(log_eps() / -std::log(rho_eps())); }
double ModelParams::mu_bar() const { return 0.5 * (delta_bar - delta_c()); }
double ModelParams::mu_bar_eps() const {
    return 0.5 * (delta_bar - 3.0 * kappa * kappa / (2.0 * rbar_eps()));
}
double ModelParams::beta() const { return cbrt3 * cbrt3 * pi * gamma; }
double ModelParams::m_limit() const { return (delta_bar - delta_c()) / (cbrt3 * cbrt3); }
double ModelParams::u_bar_eps() const {
    return -1.0 + std::pow(epsilon, 2.0 / 3.0) * std::cbrt(log_eps()) * delta_bar;
}
double ModelParams::r_prime_eps() const {
    return std::cbrt(epsilon) * std::pow(log_eps(), 1.0 / 6.0) * rbar_eps();
}
double ModelParams::ell_eps() const { return ell * std::sqrt(log_eps()); }
double ModelParams::area_scale() const {
    return std::pow(epsilon, -2.0 / 3.0) * std::pow(log_eps(), 2.0 / 3.0);
}
double ModelParams::perimeter_scale() const {
    return std::pow(epsilon, -1.0 / 3.0) * std::cbrt(log_eps());
}
double ModelParams::truncation_threshold() const { return cbrt3 * cbrt3 * pi / gamma; }

namespace {

bool droplets_overlap(const Droplet &a, const Droplet &b, const Cell &cell) {
    const Vec2 d = cell.minimal_image(a.center - b.center); // center of a relative to b
    const Disk *da = as_disk(a.shape);
    const Disk *db = as_disk(b.shape);
    if (da && db)
        return norm(d) < da->radius + db->radius;
    const Circle ca = bounding_circle(a.shape);
    const Circle cb = bounding_circle(b.shape);
    if (norm(d + ca.center - cb.center) >= ca.radius + cb.radius)
        return false;
    for (const auto &q : boundary_quadrature(a.shape, 64))
        if (shape_contains(b.shape, q.p + d))
            return true;
    for (const auto &q : boundary_quadrature(b.shape, 64))
        if (shape_contains(a.shape, q.p - d))
            return true;
    return false;
}

} // namespace

void DropletConfig::validate() const {
    params.validate();
    const Cell cell = Cell::square(params.ell);
    for (const auto &d : droplets) {
        require(is_finite(d.center), "droplet center is not finite");
        validate_shape(d.shape);
        const Circle c = bounding_circle(d.shape);
        if (norm(c.center) + c.radius >= params.ell / 8.0)
            throw DomainError("droplet too large for the torus (extent must stay below ell/8)");
    }
    for (std::size_t i = 0; i < droplets.size(); ++i)
        for (std::size_t j = i + 1; j < droplets.size(); ++j)
            if (droplets_overlap(droplets[i], droplets[j], cell))
                throw DomainError("droplets " + std::to_string(i) + " and " + std::to_string(j) +
                                  " overlap");
}

std::string to_string(EnergyLabel l) {
    switch (l) {
    case EnergyLabel::E_eps:
        return "E_eps";
    case EnergyLabel::Ebar:
        return "Ebar";
    case EnergyLabel::F_eps:
        return "F_eps";
    case EnergyLabel::E0:
        return "E0";
    case EnergyLabel::E0_eps:
        return "E0_eps";
    }
    return "unknown";
}

double truncated_area(double A, double gamma) {
    if (!(A > 0.0))
        throw DomainError("truncated_area: A must be positive");
    if (!(gamma > 0.0 && gamma < 1.0 / 6.0))
        throw DomainError("truncated_area: gamma must lie in (0, 1/6)");
    const double thr = cbrt3 * cbrt3 * pi / gamma;
    return A < thr ? A : std::sqrt(thr * A);
}

double rescaled_area(const Droplet &d, const ModelParams &p) { return p.area_scale() * shape_area(d.shape); }
double rescaled_perimeter(const Droplet &d, const ModelParams &p) {
    return p.perimeter_scale() * shape_perimeter(d.shape);
}

double disk_self_log_average(double rho) {
    if (!(rho > 0.0))
        throw DomainError("disk radius must be positive");
    return (std::log(1.0 / rho) + 0.25) / (2.0 * pi);
}

double disk_mean_factor(double t) {
    if (t < 1e-6)
        return 1.0 + t * t / 8.0;
    return 2.0 * std::cyl_bessel_i(1.0, t) / t;
}

// ---------------------------------------------------------------------------

DropletKernel::DropletKernel(double side, double screening, double tol, int smooth_order)
    : green_(Cell::square(side), screening, tol), smooth_order_(smooth_order) {}

double DropletKernel::regular_near(Vec2 z) const { return green_.regular_part_near(z); }

Vec2 DropletKernel::regular_gradient_near(Vec2 z) const {
    const double r2 = norm2(z);
    if (std::sqrt(r2) < green_.inradius())
        return green_.regular_gradient(z);
    return green_.gradient(z) + z / (2.0 * pi * r2);
}

double DropletKernel::potential(const Shape &s, Vec2 z) const {
    z = green_.cell().minimal_image(z);
    const double kappa = green_.screening();
    if (const Disk *d = as_disk(s); d && norm(z) >= d->radius) {
        if (kappa > 0.0)
            return green_.value(z) * disk_mean_factor(kappa * d->radius);
        return green_.value(z) + d->radius * d->radius / (8.0 * green_.cell().area());
    }
    const double area = shape_area(s);
    CompensatedSum reg;
    for (const auto &q : shape_quadrature(s, smooth_order_))
        reg += q.w * regular_near(z - q.p);
    return (-log_potential(s, z) / (2.0 * pi) + reg.value()) / area;
}

Vec2 DropletKernel::potential_gradient(const Shape &s, Vec2 z) const {
    z = green_.cell().minimal_image(z);
    const double kappa = green_.screening();
    if (const Disk *d = as_disk(s); d && norm(z) >= d->radius)
        return green_.gradient(z) * (kappa > 0.0 ? disk_mean_factor(kappa * d->radius) : 1.0);
    const double area = shape_area(s);
    Vec2 reg;
    for (const auto &q : shape_quadrature(s, smooth_order_))
        reg += regular_gradient_near(z - q.p) * q.w;
    return (log_potential_grad(s, z) * (-1.0 / (2.0 * pi)) + reg) / area;
}

std::pair<double, Vec2> DropletKernel::potential_and_gradient(const Shape &s, Vec2 z) const {
    z = green_.cell().minimal_image(z);
    const double kappa = green_.screening();
    if (const Disk *d = as_disk(s); d && norm(z) >= d->radius) {
        auto [v, g] = green_.value_and_gradient(z);
        if (kappa > 0.0) {
            const double f = disk_mean_factor(kappa * d->radius);
            return {v * f, g * f};
        }
        return {v + d->radius * d->radius / (8.0 * green_.cell().area()), g};
    }
    const double area = shape_area(s);
    CompensatedSum reg;
    Vec2 reg_grad;
    for (const auto &q : shape_quadrature(s, smooth_order_)) {
        const Vec2 w = z - q.p;
        const double r2 = norm2(w);
        if (std::sqrt(r2) < green_.inradius()) {
            const auto [v, g] = green_.regular_value_and_gradient(w);
            reg += q.w * v;
            reg_grad += g * q.w;
        } else {
            const auto [v, g] = green_.value_and_gradient(w);
            reg += q.w * (v + std::log(r2) / (4.0 * pi));
            reg_grad += (g + w / (2.0 * pi * r2)) * q.w;
        }
    }
    return {(-log_potential(s, z) / (2.0 * pi) + reg.value()) / area,
            (log_potential_grad(s, z) * (-1.0 / (2.0 * pi)) + reg_grad) / area};
}

double DropletKernel::disk_regular_self(double rho) const {
    // Distance density of two uniform points in a disk, in t = d / (2 rho),
    // with t = 1 - w^2 to smooth the (1 - t)^{3/2} edge behaviour.
    constexpr int angles = 16;
    const auto &gl = gauss_legendre(16);
    CompensatedSum sum;
    for (int p = 0; p < 2; ++p) {
        const double a = 0.5 * p, b = a + 0.5;
        for (int i = 0; i < 16; ++i) {
            const double w = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
            const double t = 1.0 - w * w;
            const double dens = 16.0 * t / pi * (std::acos(t) - t * std::sqrt(1.0 - t * t)) * 2.0 * w;
            const double d = 2.0 * rho * t;
            CompensatedSum ang;
            for (int k = 0; k < angles; ++k) {
                const double th = 2.0 * pi * (k + 0.5) / angles;
                ang += green_.regular_part({d * std::cos(th), d * std::sin(th)});
            }
            sum += 0.5 * (b - a) * gl.weights[i] * dens * ang.value() / angles;
        }
    }
    return sum.value();
}

double DropletKernel::self_average(const Shape &s) const {
    if (const Disk *d = as_disk(s))
        return disk_self_log_average(d->radius) + disk_regular_self(d->radius);
    const double area = shape_area(s);
    CompensatedSum logpart;
    for (const auto &q : shape_quadrature(s, 12))
        logpart += q.w * log_potential(s, q.p);
    const auto rule = shape_quadrature(s, smooth_order_);
    CompensatedSum reg;
    for (const auto &x : rule)
        for (const auto &y : rule)
            reg += x.w * y.w * green_.regular_part(x.p - y.p);
    return (-logpart.value() / (2.0 * pi) + reg.value()) / (area * area);
}

double DropletKernel::pair_average(const Shape &a, const Shape &b, Vec2 d) const {
    d = green_.cell().minimal_image(d);
    const double kappa = green_.screening();
    const Disk *da = as_disk(a);
    const Disk *db = as_disk(b);
    auto factor = [&](const Disk *disk) { return kappa > 0.0 ? disk_mean_factor(kappa * disk->radius) : 1.0; };
    auto shift = [&](const Disk *disk) {
        return kappa > 0.0 ? 0.0 : disk->radius * disk->radius / (8.0 * green_.cell().area());
    };
    if (da && db) {
        if (norm(d) < da->radius + db->radius)
            throw DomainError("pair_average: overlapping disks");
        if (kappa > 0.0)
            return green_.value(d) * factor(da) * factor(db);
        return green_.value(d) + shift(da) + shift(db);
    }
    if (db) // mean over a of the disk potential, which is G times a constant outside b
        return potential(a, -d) * factor(db) + shift(db);
    if (da)
        return potential(b, d) * factor(da) + shift(da);
    const double area_a = shape_area(a), area_b = shape_area(b);
    const auto ra = shape_quadrature(a, smooth_order_);
    const auto rb = shape_quadrature(b, smooth_order_);
    CompensatedSum logpart, reg;
    for (const auto &x : shape_quadrature(a, 12))
        logpart += x.w * log_potential(b, d + x.p);
    for (const auto &x : ra)
        for (const auto &y : rb)
            reg += x.w * y.w * regular_near(d + x.p - y.p);
    return -logpart.value() / (2.0 * pi * area_a * area_b) + reg.value() / (area_a * area_b);
}

// ---------------------------------------------------------------------------

EnergyBreakdown ebar_energy(const DropletConfig &config) {
    config.validate();
    const ModelParams &p = config.params;
    const double L = p.log_eps();
    const std::size_t n = config.droplets.size();
    EnergyBreakdown out;
    out.label = EnergyLabel::Ebar;
    if (n == 0)
        return out;
    std::vector<double> mu(n);
    CompensatedSum per, ar;
    for (std::size_t i = 0; i < n; ++i) {
        const double A = rescaled_area(config.droplets[i], p);
        per += rescaled_perimeter(config.droplets[i], p) / L;
        ar += -(2.0 * p.delta_bar / (p.kappa * p.kappa)) * A / L;
        mu[i] = A / L;
    }
    const DropletKernel kernel(p.ell, p.kappa);
    const Cell cell = Cell::square(p.ell);

    // Identical disks share one self average.
    std::map<double, double> disk_cache;
    std::vector<double> self_avg(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Shape &s = config.droplets[i].shape;
        if (const Disk *d = as_disk(s)) {
            auto it = disk_cache.find(d->radius);
            if (it == disk_cache.end())
                it = disk_cache.emplace(d->radius, kernel.self_average(s)).first;
            self_avg[i] = it->second;
        }
    }
    parallel_for(n, [&](std::size_t i) {
        if (!as_disk(config.droplets[i].shape))
            self_avg[i] = kernel.self_average(config.droplets[i].shape);
    });
    CompensatedSum self;
    for (std::size_t i = 0; i < n; ++i)
        self += 2.0 * mu[i] * mu[i] * self_avg[i];

    const std::size_t npairs = n * (n - 1) / 2;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(npairs);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pairs.emplace_back(i, j);
    const double pair = parallel_sum(npairs, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        const auto &a = config.droplets[i];
        const auto &b = config.droplets[j];
        return 4.0 * mu[i] * mu[j] *
               kernel.pair_average(a.shape, b.shape, cell.minimal_image(a.center - b.center));
    });
    out.perimeter_term = per.value();
    out.area_term = ar.value();
    out.self_interaction = self.value();
    out.pair_interaction = pair;
    out.total = out.sum_of_parts();
    return out;
}

EnergyBreakdown e_eps_energy(const DropletConfig &config) {
    const ModelParams &p = config.params;
    EnergyBreakdown e = ebar_energy(config);
    const double s = std::pow(p.epsilon, 4.0 / 3.0) * std::pow(p.log_eps(), 2.0 / 3.0);
    e.label = EnergyLabel::E_eps;
    e.perimeter_term *= s;
    e.area_term *= s;
    e.self_interaction *= s;
    e.pair_interaction *= s;
    e.background_term = s * p.delta_bar * p.delta_bar * p.ell * p.ell / (2.0 * p.kappa * p.kappa);
    e.total = e.sum_of_parts();
    return e;
}

EnergyBreakdown f_eps_from_ebar(const EnergyBreakdown &ebar, const ModelParams &p) {
    const double L = p.log_eps();
    const double dc = p.delta_c();
    const double k2 = p.kappa * p.kappa;
    const double s = L / (p.ell * p.ell);
    const double constant = p.delta_bar * p.delta_bar * p.ell * p.ell / (2.0 * k2);
    const double subtraction = L * dc / (2.0 * k2) * (2.0 * p.delta_bar - dc);
    const double log_term =
        (p.delta_bar - dc) * (std::log(L) + std::log(9.0)) / (4.0 * cbrt3);
    EnergyBreakdown f;
    f.label = EnergyLabel::F_eps;
    f.perimeter_term = s * ebar.perimeter_term;
    f.area_term = s * ebar.area_term;
    f.self_interaction = s * ebar.self_interaction;
    f.pair_interaction = s * ebar.pair_interaction;
    f.background_term = s * constant - subtraction + log_term;
    f.extras["scaled_energy"] = s * (constant + ebar.total);
    f.extras["leading_subtraction"] = -subtraction;
    f.extras["log_correction"] = log_term;
    f.total = f.extras["scaled_energy"] - subtraction + log_term;
    return f;
}

EnergyBreakdown f_eps_energy(const DropletConfig &config) {
    return f_eps_from_ebar(ebar_energy(config), config.params);
}

EnergyBreakdown leading_order_breakdown(double mu, const ModelParams &p, bool corrected) {
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw DomainError("uniform density must be non-negative");
    const double k2 = p.kappa * p.kappa;
    const double l2 = p.ell * p.ell;
    EnergyBreakdown e;
    e.label = corrected ? EnergyLabel::E0_eps : EnergyLabel::E0;
    e.perimeter_term = (corrected ? 3.0 / p.rbar_eps() : cbrt3 * cbrt3) * mu * l2;
    e.area_term = -(2.0 * p.delta_bar / k2) * mu * l2;
    e.self_interaction = 2.0 * mu * mu * l2 / k2;
    e.background_term = p.delta_bar * p.delta_bar * l2 / (2.0 * k2);
    e.total = e.sum_of_parts();
    return e;
}

double leading_order_energy(double mu, const ModelParams &p) { return leading_order_breakdown(mu, p, false).total; }

double corrected_leading_energy(double mu, const ModelParams &p) {
    return leading_order_breakdown(mu, p, true).total;
}

CorrectedMinimum min_corrected(const ModelParams &p) {
    const double k2 = p.kappa * p.kappa;
    const double rb = p.rbar_eps();
    if (!(p.delta_bar > 3.0 * k2 / (2.0 * rb)))
        throw DomainError("min_corrected requires delta_bar > 3 kappa^2 / (2 rbar_eps)");
    CorrectedMinimum m;
    m.mu_bar_eps = p.mu_bar_eps();
    const double s = std::cbrt(3.0 / (rb * rb * rb));
    const double dc = p.delta_c();
    m.min_value = dc * p.ell * p.ell / (2.0 * k2) * (2.0 * p.delta_bar * s - dc * s * s);
    return m;
}

ExpansionTerms expansion_min_energy(const ModelParams &p, double w_min) {
    const double L = p.log_eps();
    const double dc = p.delta_c();
    const double e43 = std::pow(p.epsilon, 4.0 / 3.0);
    ExpansionTerms t;
    t.leading = dc / (2.0 * p.kappa * p.kappa) * (2.0 * p.delta_bar - dc) * e43 * std::pow(L, 2.0 / 3.0);
    t.log_correction = -(p.delta_bar - dc) / (4.0 * cbrt3) * e43 / std::cbrt(L) * (std::log(L) + std::log(9.0));
    t.renormalized = e43 / std::cbrt(L) * (3.0 * cbrt3 * w_min + cbrt3 * cbrt3 * (p.delta_bar - dc) / 8.0);
    t.total = t.leading + t.log_correction + t.renormalized;
    return t;
}

MEpsBreakdown m_eps(const DropletConfig &config) {
    const ModelParams &p = config.params;
    p.validate();
    const double thr = p.truncation_threshold();
    const double beta = p.beta();
    const double rb = p.rbar_eps();
    MEpsBreakdown m;
    for (const auto &d : config.droplets) {
        validate_shape(d.shape);
        const double A = rescaled_area(d, p);
        const double P = rescaled_perimeter(d, p);
        m.isoperimetric += std::max(0.0, P - std::sqrt(4.0 * pi * A));
        if (A > thr)
            m.large += p.c1 * A;
        if (A >= beta && A <= thr)
            m.mid += p.c2 * (A - pi * rb * rb) * (A - pi * rb * rb);
        if (A < beta)
            m.small += p.c3 * A;
    }
    m.total = m.isoperimetric + m.large + m.mid + m.small;
    return m;
}

// ---------------------------------------------------------------------------

HField::HField(const DropletConfig &config, double tol, int smooth_order) {
    config.validate();
    const ModelParams &p = config.params;
    const double s = std::sqrt(p.log_eps());
    side_ = p.ell * s;
    screening_ = p.kappa / s;
    background_ = -p.mu_bar_eps() / (screening_ * screening_);
    kernel_ = std::make_unique<DropletKernel>(side_, screening_, tol, smooth_order);
    for (const auto &d : config.droplets) {
        droplets_.push_back({d.center * s, scale_shape(d.shape, s)});
        charges_.push_back(rescaled_area(d, p));
    }
}

double HField::value(Vec2 xp) const {
    if (!is_finite(xp))
        throw DomainError("h_field: point is not finite");
    CompensatedSum sum;
    for (std::size_t i = 0; i < droplets_.size(); ++i)
        sum += charges_[i] * kernel_->potential(droplets_[i].shape, xp - droplets_[i].center);
    return sum.value() + background_;
}

Vec2 HField::gradient(Vec2 xp) const {
    if (!is_finite(xp))
        throw DomainError("h_field: point is not finite");
    Vec2 g;
    for (std::size_t i = 0; i < droplets_.size(); ++i)
        g += kernel_->potential_gradient(droplets_[i].shape, xp - droplets_[i].center) * charges_[i];
    return g;
}

std::pair<double, Vec2> HField::value_and_gradient(Vec2 xp) const {
    if (!is_finite(xp))
        throw DomainError("h_field: point is not finite");
    CompensatedSum sum;
    Vec2 g;
    for (std::size_t i = 0; i < droplets_.size(); ++i) {
        const auto [v, dv] = kernel_->potential_and_gradient(droplets_[i].shape, xp - droplets_[i].center);
        sum += charges_[i] * v;
        g += dv * charges_[i];
    }
    return {sum.value() + background_, g};
}

double HField::annulus_energy(Vec2 c, double r_in, double r_out, double mass_weight,
                              const std::vector<double> &breaks, int angular_nodes, int radial_order) const {
    if (!(r_in >= 0.0 && r_out > r_in))
        throw DomainError("annulus_energy: need 0 <= r_in < r_out");
    std::vector<double> edges{r_in};
    for (double b : breaks)
        if (b > r_in && b < r_out)
            edges.push_back(b);
    edges.push_back(r_out);
    std::sort(edges.begin(), edges.end());
    // Panels geometric in r away from the origin.
    std::vector<std::pair<double, double>> panels;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        double a = edges[e];
        const double b = edges[e + 1];
        if (a == 0.0) {
            panels.emplace_back(0.0, b);
            continue;
        }
        const int pieces = std::max(1, static_cast<int>(std::ceil(std::log(b / a) / std::log(2.0))));
        const double ratio = std::pow(b / a, 1.0 / pieces);
        for (int k = 0; k < pieces; ++k, a *= ratio)
            panels.emplace_back(a, k + 1 == pieces ? b : a * ratio);
    }
    const auto &gl = gauss_legendre(radial_order);
    struct Node {
        double r, w;
    };
    std::vector<Node> nodes;
    for (const auto &[a, b] : panels)
        for (int i = 0; i < radial_order; ++i) {
            const double r = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
            nodes.push_back({r, 0.5 * (b - a) * gl.weights[i] * r * 2.0 * pi / angular_nodes});
        }
    const std::size_t total = nodes.size() * static_cast<std::size_t>(angular_nodes);
    return parallel_sum(total, [&](std::size_t k) {
        const Node &nd = nodes[k / angular_nodes];
        const double th = 2.0 * pi * (static_cast<double>(k % angular_nodes) + 0.5) / angular_nodes;
        const Vec2 x = c + Vec2{nd.r * std::cos(th), nd.r * std::sin(th)};
        if (mass_weight == 0.0)
            return nd.w * norm2(gradient(x));
        const auto [h, g] = value_and_gradient(x);
        return nd.w * (norm2(g) + mass_weight * h * h);
    });
}

double h_field(const DropletConfig &config, Vec2 xp) { return HField(config).value(xp); }
Vec2 h_field_gradient(const DropletConfig &config, Vec2 xp) { return HField(config).gradient(xp); }

} // namespace okdrop
