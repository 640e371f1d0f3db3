#include "okdrop/green.hpp"

#include "okdrop/errors.hpp"
#include "okdrop/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace okdrop {

namespace {
constexpr double pi = std::numbers::pi;
constexpr int max_terms = 40;
} // namespace

void TorusGeometry::validate() const {
    if (!(side > 0.0) || !std::isfinite(side))
        throw DomainError("torus side must be positive and finite");
    if (!(screening >= 0.0) || !std::isfinite(screening))
        throw DomainError("screening must be non-negative and finite");
}

PeriodicGreen::PeriodicGreen(const Cell &cell, double screening, double tolerance)
    : cell_(cell), kappa_(screening), tol_(tolerance) {
    if (!(screening >= 0.0) || !std::isfinite(screening))
        throw DomainError("screening must be non-negative and finite");
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw DomainError("kernel tolerance must lie in (0, 1)");

    const double area = cell_.area();
    alpha_ = std::max(std::sqrt(pi / area), kappa_);
    t_split_ = 1.0 / (4.0 * alpha_ * alpha_);
    q_ = kappa_ * kappa_ * t_split_;
    // Both tails decay like exp(-z); the margin covers the tail multiplicity
    // and the 1/z prefactor.
    z_cut_ = std::log(1.0 / tolerance) + 14.0;

    series_coef_.assign(1, 1.0);
    if (q_ > 0.0) {
        double c = 1.0;
        for (int n = 1; n < max_terms; ++n) {
            c *= -q_ / n;
            series_coef_.push_back(c);
            if (std::abs(c) < 1e-19)
                break;
        }
    }
    nterms_ = static_cast<int>(series_coef_.size());

    const double r_cut = std::sqrt(z_cut_) / alpha_;
    const double k_cut = 2.0 * alpha_ * std::sqrt(z_cut_);

    // Image lattice vectors: every R that can come within r_cut of a point
    // in the centred cell.
    const double diam = norm(cell_.a()) + norm(cell_.b());
    const double reach = r_cut + diam;
    const double ha = cell_.area() / norm(cell_.b()); // height across a
    const double hb = cell_.area() / norm(cell_.a());
    const int na = static_cast<int>(std::ceil(reach / ha)) + 1;
    const int nb = static_cast<int>(std::ceil(reach / hb)) + 1;
    for (int i = -na; i <= na; ++i)
        for (int j = -nb; j <= nb; ++j) {
            const Vec2 r = cell_.a() * i + cell_.b() * j;
            if (norm(r) <= reach)
                images_.push_back(r);
        }
    std::stable_sort(images_.begin(), images_.end(),
                     [](Vec2 u, Vec2 v) { return norm2(u) < norm2(v); });

    // Reciprocal modes, half-space representatives (cos is even).
    const double kha = (2.0 * pi / norm(cell_.a())); // spacing lower bounds
    const double khb = (2.0 * pi / norm(cell_.b()));
    const int ma = static_cast<int>(std::ceil(k_cut / std::min(kha, khb) * 2.0)) + 1;
    for (int i = 0; i <= ma; ++i)
        for (int j = -ma; j <= ma; ++j) {
            if (i == 0 && j < 0)
                continue;
            const Vec2 k = cell_.ka() * i + cell_.kb() * j;
            const double k2 = norm2(k);
            if (k2 > k_cut * k_cut)
                continue;
            const bool zero = (i == 0 && j == 0);
            if (zero && kappa_ == 0.0)
                continue;
            const double d = k2 + kappa_ * kappa_;
            Mode m;
            m.k = k;
            m.spectral = 1.0 / (area * d);
            m.damped = m.spectral * std::exp(-d * t_split_) * (zero ? 1.0 : 2.0);
            modes_.push_back(m);
        }
    std::stable_sort(modes_.begin(), modes_.end(),
                     [](const Mode &u, const Mode &v) { return norm2(u.k) > norm2(v.k); });

    constant_ = kappa_ == 0.0 ? -t_split_ / area : 0.0;
    inradius_ = 0.5 * std::min(area / norm(cell_.a()), area / norm(cell_.b()));

    // S(0): near image regularised, other images and Fourier part at x = 0.
    CompensatedSum s;
    for (auto it = images_.rbegin(); it != images_.rend(); ++it) {
        if (norm2(*it) == 0.0)
            continue;
        s += image_value(alpha_ * alpha_ * norm2(*it));
    }
    s += fourier_value({0.0, 0.0});
    s += constant_;
    s += near_image_regular(0.0);
    s0_ = s.value();
}

double PeriodicGreen::image_value(double z) const {
    if (z > z_cut_)
        return 0.0;
    std::array<double, max_terms + 2> en{};
    expint_en_table(z, std::span<double>(en.data(), nterms_ + 1));
    CompensatedSum s;
    for (int n = nterms_ - 1; n >= 0; --n)
        s += series_coef_[n] * en[n];
    return s.value() / (4.0 * pi);
}

double PeriodicGreen::near_image_regular(double z) const {
    // (1/4pi) [E1(z) + ln z - 2 ln alpha + sum_{n>=1} c_n E_{n+1}(z)]
    std::array<double, max_terms + 2> en{};
    expint_en_table(z, std::span<double>(en.data(), nterms_ + 1));
    CompensatedSum s;
    for (int n = nterms_ - 1; n >= 1; --n)
        s += series_coef_[n] * en[n];
    s += expint_e1_plus_log(z);
    s += -2.0 * std::log(alpha_);
    return s.value() / (4.0 * pi);
}

double PeriodicGreen::fourier_value(Vec2 x) const {
    CompensatedSum s;
    for (const auto &m : modes_)
        s += m.damped * std::cos(dot(m.k, x));
    return s.value();
}

Vec2 PeriodicGreen::reduce_checked(Vec2 x) const {
    if (!is_finite(x))
        throw DomainError("kernel argument is not finite");
    const Vec2 r = cell_.reduce_centered(x);
    if (norm(r) < 1e-14 * cell_.scale())
        throw SingularEvaluation("kernel evaluated at its singularity (x = 0 modulo the cell)");
    return r;
}

double PeriodicGreen::value(Vec2 x) const {
    const Vec2 r = reduce_checked(x);
    const double a2 = alpha_ * alpha_;
    CompensatedSum s;
    for (auto it = images_.rbegin(); it != images_.rend(); ++it)
        s += image_value(a2 * norm2(r + *it));
    s += fourier_value(r);
    s += constant_;
    return s.value();
}

double PeriodicGreen::regular_part(Vec2 x) const {
    if (!is_finite(x))
        throw DomainError("kernel argument is not finite");
    const Vec2 r = cell_.reduce_centered(x);
    const double a2 = alpha_ * alpha_;
    CompensatedSum s;
    for (auto it = images_.rbegin(); it != images_.rend(); ++it) {
        if (norm2(*it) == 0.0)
            continue;
        s += image_value(a2 * norm2(r + *it));
    }
    s += fourier_value(r);
    s += constant_;
    s += near_image_regular(a2 * norm2(r));
    return s.value();
}

Vec2 PeriodicGreen::gradient(Vec2 x) const {
    const Vec2 r = reduce_checked(x);
    const double a2 = alpha_ * alpha_;
    std::array<double, max_terms + 2> en{};
    CompensatedSum gx, gy;
    for (auto it = images_.rbegin(); it != images_.rend(); ++it) {
        const Vec2 y = r + *it;
        const double rho2 = norm2(y);
        const double z = a2 * rho2;
        if (z > z_cut_)
            continue;
        // dI/dr = -(1/(2 pi r)) [e^{-z} + z sum_{n>=1} c_n E_n(z)]
        double bracket = std::exp(-z);
        if (nterms_ > 1) {
            expint_en_table(z, std::span<double>(en.data(), nterms_));
            CompensatedSum t;
            for (int n = nterms_ - 1; n >= 1; --n)
                t += series_coef_[n] * en[n - 1];
            bracket += z * t.value();
        }
        const double f = -bracket / (2.0 * pi * rho2);
        gx += f * y.x;
        gy += f * y.y;
    }
    for (const auto &m : modes_) {
        const double sn = std::sin(dot(m.k, r));
        gx += -m.damped * m.k.x * sn;
        gy += -m.damped * m.k.y * sn;
    }
    return {gx.value(), gy.value()};
}

Vec2 PeriodicGreen::regular_gradient(Vec2 x) const {
    if (!is_finite(x))
        throw DomainError("kernel argument is not finite");
    const Vec2 r = cell_.reduce_centered(x);
    const double a2 = alpha_ * alpha_;
    std::array<double, max_terms + 2> en{};
    CompensatedSum gx, gy;
    for (auto it = images_.rbegin(); it != images_.rend(); ++it) {
        const Vec2 y = r + *it;
        const double rho2 = norm2(y);
        const double z = a2 * rho2;
        if (z > z_cut_ || rho2 == 0.0)
            continue;
        const bool near = norm2(*it) == 0.0;
        // Image term; for the near image the log gradient y/(2 pi r^2) is added,
        // turning e^{-z} into -(1 - e^{-z}).
        double bracket = near ? std::expm1(-z) : std::exp(-z);
        if (nterms_ > 1) {
            expint_en_table(z, std::span<double>(en.data(), nterms_));
            CompensatedSum t;
            for (int n = nterms_ - 1; n >= 1; --n)
                t += series_coef_[n] * en[n - 1];
            bracket += z * t.value();
        }
        const double f = -bracket / (2.0 * pi * rho2);
        gx += f * y.x;
        gy += f * y.y;
    }
    for (const auto &m : modes_) {
        const double sn = std::sin(dot(m.k, r));
        gx += -m.damped * m.k.x * sn;
        gy += -m.damped * m.k.y * sn;
    }
    return {gx.value(), gy.value()};
}

std::pair<double, Vec2> PeriodicGreen::both(Vec2 r, bool regular) const {
    const double a2 = alpha_ * alpha_;
    std::array<double, max_terms + 2> en{};
    CompensatedSum v, gx, gy;
    for (auto it = images_.rbegin(); it != images_.rend(); ++it) {
        const Vec2 y = r + *it;
        const double rho2 = norm2(y);
        const double z = a2 * rho2;
        const bool near = regular && norm2(*it) == 0.0;
        if (near) {
            v += near_image_regular(z);
            if (rho2 == 0.0)
                continue;
        } else if (z > z_cut_) {
            continue;
        }
        expint_en_table(z, std::span<double>(en.data(), nterms_ + 1));
        CompensatedSum val, tail;
        for (int n = nterms_ - 1; n >= 1; --n) {
            val += series_coef_[n] * en[n];
            tail += series_coef_[n] * en[n - 1];
        }
        if (!near)
            v += (val.value() + en[0]) / (4.0 * pi);
        const double bracket = (near ? std::expm1(-z) : std::exp(-z)) + z * tail.value();
        const double f = -bracket / (2.0 * pi * rho2);
        gx += f * y.x;
        gy += f * y.y;
    }
    for (const auto &m : modes_) {
        const double ph = dot(m.k, r);
        const double sn = std::sin(ph);
        v += m.damped * std::cos(ph);
        gx += -m.damped * m.k.x * sn;
        gy += -m.damped * m.k.y * sn;
    }
    v += constant_;
    return {v.value(), {gx.value(), gy.value()}};
}

std::pair<double, Vec2> PeriodicGreen::value_and_gradient(Vec2 x) const { return both(reduce_checked(x), false); }

std::pair<double, Vec2> PeriodicGreen::regular_value_and_gradient(Vec2 x) const {
    if (!is_finite(x))
        throw DomainError("kernel argument is not finite");
    return both(cell_.reduce_centered(x), true);
}

double PeriodicGreen::regular_part_near(Vec2 z) const {
    if (!is_finite(z))
        throw DomainError("kernel argument is not finite");
    const double r = norm(z);
    if (r < inradius_)
        return regular_part(z);
    return value(z) + std::log(r) / (2.0 * pi);
}

KernelSplit PeriodicGreen::split() const {
    KernelSplit ks;
    ks.regular_part_at_zero = s0_;
    ks.truncation.alpha = alpha_;
    ks.truncation.real_cutoff = std::sqrt(z_cut_) / alpha_;
    ks.truncation.fourier_cutoff = 2.0 * alpha_ * std::sqrt(z_cut_);
    ks.truncation.tolerance = tol_;
    ks.truncation.image_count = images_.size();
    ks.truncation.mode_count = modes_.size();

    // Lipschitz bound for S on |x| <= rho. Near image: |d/dr (I_0 + ln r/2pi)|
    // <= (z + (e^q - 1) z E_1(z)) / (2 pi r), maximised on a grid of r.
    const double rho = 0.25 * cell_.scale();
    ks.lipschitz_radius = rho;
    const double a2 = alpha_ * alpha_;
    double near = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const double r = rho * i / 400.0;
        const double z = a2 * r * r;
        const double v = (z + std::expm1(q_) * z * expint_e1(z)) / (2.0 * pi * r);
        near = std::max(near, v);
    }
    // Grid maximum of an increasing-then-bounded expression; pad by one step.
    near *= 1.0 + 1.0 / 400.0;
    double far = 0.0;
    for (const auto &img : images_) {
        const double d = norm(img) - rho;
        if (norm2(img) == 0.0 || d <= 0.0)
            continue;
        far += std::exp(q_) * std::exp(-a2 * d * d) / (2.0 * pi * d);
    }
    double four = 0.0;
    for (const auto &m : modes_)
        four += m.damped * norm(m.k);
    ks.lipschitz_bound = near + far + four;
    return ks;
}

double green_eval(const TorusGeometry &geom, Vec2 x) {
    geom.validate();
    return PeriodicGreen(geom).value(x);
}

double green_regular_part(const TorusGeometry &geom, Vec2 x) {
    geom.validate();
    return PeriodicGreen(geom).regular_part(x);
}

Vec2 green_grad(const TorusGeometry &geom, Vec2 x) {
    geom.validate();
    return PeriodicGreen(geom).gradient(x);
}

} // namespace okdrop
