#include "doctest.h"

#include "okdrop/errors.hpp"
#include "okdrop/green.hpp"
#include "okdrop/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace okdrop;
using std::numbers::pi;

namespace {

// Composite Gauss-Legendre nodes on [0, 1], geometrically graded toward
// both endpoints so that log singularities at the corners are resolved.
QuadratureRule graded_unit_rule(int levels, int order) {
    std::vector<double> cuts{0.0};
    double h = 0.5;
    std::vector<double> left;
    for (int i = 0; i < levels; ++i) {
        left.push_back(h);
        h *= 0.2;
    }
    for (auto it = left.rbegin(); it != left.rend(); ++it)
        cuts.push_back(*it);
    for (auto it = left.begin() + 1; it != left.end(); ++it)
        cuts.push_back(1.0 - *it);
    cuts.push_back(1.0);
    const auto &gl = gauss_legendre(order);
    QuadratureRule r;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double a = cuts[p], b = cuts[p + 1];
        for (int i = 0; i < order; ++i) {
            r.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i]);
            r.weights.push_back(0.5 * (b - a) * gl.weights[i]);
        }
    }
    return r;
}

double torus_integral(const PeriodicGreen &g) {
    const auto rule = graded_unit_rule(14, 12);
    CompensatedSum s;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        for (std::size_t j = 0; j < rule.nodes.size(); ++j)
            s += rule.weights[i] * rule.weights[j] * g.value({rule.nodes[i], rule.nodes[j]});
    return s.value();
}

} // namespace

TEST_CASE("screened mass identity") {
    PeriodicGreen g(TorusGeometry{1.0, 1.0});
    CHECK(torus_integral(g) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("mean-zero kernel integrates to zero") {
    PeriodicGreen g(TorusGeometry{1.0, 0.0});
    CHECK(std::abs(torus_integral(g)) < 1e-8);
}

TEST_CASE("value matches square-truncated Fourier series") {
    // Symmetric partial sums over |n1|, |n2| <= N; error well below 1e-8.
    const double kappa = 2.0 / 3.0;
    const int N = 2000;
    long double acc = 0.0L;
    for (int n1 = -N; n1 <= N; ++n1) {
        long double row = 0.0L;
        for (int n2 = -N; n2 <= N; ++n2) {
            const double k2 = 4.0 * pi * pi * (double(n1) * n1 + double(n2) * n2);
            // x = (1/4, 1/4): k.x = (pi/2)(n1 + n2)
            const int phase = ((n1 + n2) % 4 + 4) % 4;
            const double c = phase == 0 ? 1.0 : (phase == 2 ? -1.0 : 0.0);
            row += c / (k2 + kappa * kappa);
        }
        acc += row;
    }
    const double oracle = static_cast<double>(acc);
    const double v = green_eval(TorusGeometry{1.0, kappa}, {0.25, 0.25});
    CHECK(std::abs(v - oracle) < 1e-8);
}

TEST_CASE("even symmetry and lattice symmetries") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (double kappa : {0.0, 2.0 / 3.0}) {
        PeriodicGreen g(TorusGeometry{1.0, kappa});
        for (int i = 0; i < 100; ++i) {
            const Vec2 x{u(rng), u(rng)};
            const double v = g.value(x);
            CHECK(g.value(-x) == doctest::Approx(v).epsilon(1e-13));
            CHECK(g.value({-x.y, x.x}) == doctest::Approx(v).epsilon(1e-12));
            CHECK(g.value({x.x, -x.y}) == doctest::Approx(v).epsilon(1e-12));
            CHECK(g.value({x.y, x.x}) == doctest::Approx(v).epsilon(1e-12));
            CHECK(g.value(x + Vec2{1.0, -3.0}) == doctest::Approx(v).epsilon(1e-12));
        }
    }
}

TEST_CASE("singular evaluation and non-finite input") {
    TorusGeometry geom{1.0, 0.5};
    CHECK_THROWS_AS(green_eval(geom, {0.0, 0.0}), SingularEvaluation);
    CHECK_THROWS_AS(green_eval(geom, {1.0, 2.0}), SingularEvaluation);
    CHECK_THROWS_AS(green_grad(geom, {0.0, 0.0}), SingularEvaluation);
    CHECK_THROWS_AS(green_eval(geom, {NAN, 0.1}), DomainError);
    CHECK_THROWS_AS(green_regular_part(geom, {INFINITY, 0.1}), DomainError);
    CHECK_THROWS_AS(green_eval(TorusGeometry{-1.0, 0.0}, {0.1, 0.1}), DomainError);
    CHECK_THROWS_AS(green_eval(TorusGeometry{1.0, -0.1}, {0.1, 0.1}), DomainError);
    CHECK_NOTHROW(green_regular_part(geom, {0.0, 0.0}));
}

TEST_CASE("split reconstruction") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lr(std::log(1e-4), std::log(0.1));
    std::uniform_real_distribution<double> th(0.0, 2.0 * pi);
    for (double kappa : {0.0, 1.0, 2.0 / 3.0}) {
        PeriodicGreen g(TorusGeometry{1.0, kappa});
        for (int i = 0; i < 50; ++i) {
            const double r = std::exp(lr(rng)), t = th(rng);
            const Vec2 x{r * std::cos(t), r * std::sin(t)};
            const double recon = -std::log(r) / (2.0 * pi) + g.regular_part(x);
            CHECK(std::abs(g.value(x) - recon) < 1e-10);
        }
    }
}

TEST_CASE("regular part at zero agrees with Richardson extrapolation") {
    PeriodicGreen g(TorusGeometry{1.0, 0.0});
    const Vec2 dir{std::cos(0.3), std::sin(0.3)};
    std::vector<double> f;
    for (int k = 8; k <= 16; ++k) {
        const double h = std::ldexp(1.0, -k);
        f.push_back(g.value(dir * h) + std::log(h) / (2.0 * pi));
    }
    // Neville table in h with ratio 2 (power series in h).
    for (int level = 1; level < static_cast<int>(f.size()); ++level) {
        const double p = std::ldexp(1.0, level);
        for (std::size_t i = 0; i + level < f.size(); ++i)
            f[i] = (p * f[i + 1] - f[i]) / (p - 1.0);
        f.pop_back();
    }
    CHECK(std::abs(f[0] - g.regular_part_at_zero()) < 1e-7);
    CHECK(std::abs(g.regular_part({0.0, 0.0}) - g.regular_part_at_zero()) < 1e-14);
}

TEST_CASE("regular part converges to its value at zero") {
    PeriodicGreen g(TorusGeometry{1.0, 1.0});
    const double s0 = g.regular_part_at_zero();
    double prev = INFINITY;
    for (int k = 2; k <= 20; ++k) {
        const double h = std::ldexp(1.0, -k);
        const double d = std::abs(g.regular_part({h, 0.5 * h}) - s0);
        CHECK(d <= prev * 1.01 + 1e-15);
        CHECK(d <= 2.0 * h);
        prev = d;
    }
}

TEST_CASE("gradient matches central differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (double kappa : {0.0, 2.0 / 3.0}) {
        PeriodicGreen g(TorusGeometry{1.0, kappa});
        int checked = 0;
        while (checked < 50) {
            const Vec2 x{u(rng), u(rng)};
            if (norm(x) < 0.02)
                continue;
            ++checked;
            const double h = 1e-5;
            const Vec2 fd{(g.value(x + Vec2{h, 0}) - g.value(x - Vec2{h, 0})) / (2 * h),
                          (g.value(x + Vec2{0, h}) - g.value(x - Vec2{0, h})) / (2 * h)};
            const Vec2 an = g.gradient(x);
            CHECK(norm(fd - an) <= 1e-5 * std::max(norm(an), 1e-3));
            CHECK(norm(g.gradient(-x) + an) < 1e-12);
        }
        CHECK(norm(g.gradient({0.5, 0.5})) < 1e-10);
    }
}

TEST_CASE("spectral coefficients invert the operator") {
    for (double kappa : {0.0, 0.4}) {
        PeriodicGreen g(TorusGeometry{1.0, kappa});
        REQUIRE(!g.modes().empty());
        for (const auto &m : g.modes()) {
            const double d = norm2(m.k) + kappa * kappa;
            CHECK(m.spectral * d == doctest::Approx(1.0).epsilon(4e-16));
        }
    }
}

TEST_CASE("regular part is Lipschitz with the reported constant") {
    for (double kappa : {0.0, 2.0 / 3.0, 3.0}) {
        PeriodicGreen g(TorusGeometry{1.0, kappa});
        const KernelSplit ks = g.split();
        CHECK(ks.singular_coefficient == doctest::Approx(-1.0 / (2.0 * pi)));
        CHECK(ks.regular_part_at_zero == g.regular_part_at_zero());
        const double rho = ks.lipschitz_radius;
        std::vector<Vec2> pts;
        for (int i = -12; i <= 12; ++i)
            for (int j = -12; j <= 12; ++j) {
                const Vec2 p{rho * i / 12.0, rho * j / 12.0};
                if (norm(p) <= rho)
                    pts.push_back(p);
            }
        std::vector<double> s;
        for (const auto &p : pts)
            s.push_back(g.regular_part(p));
        double worst = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                worst = std::max(worst, std::abs(s[i] - s[j]) / norm(pts[i] - pts[j]));
        CHECK(worst <= ks.lipschitz_bound);
    }
}

TEST_CASE("general cells and side scaling") {
    // G on a torus of side L: G_L(x) = G_1(x/L) up to the scaling of kappa.
    const double L = 3.0, kappa = 0.5;
    PeriodicGreen a(TorusGeometry{L, kappa});
    PeriodicGreen b(TorusGeometry{1.0, kappa * L});
    for (const Vec2 x : {Vec2{0.3, 0.7}, Vec2{-1.2, 0.1}}) {
        CHECK(a.value(x) == doctest::Approx(b.value(x / L)).epsilon(1e-11));
    }
    // Same lattice from two different bases.
    PeriodicGreen c(Cell({1.0, 0.0}, {0.5, std::sqrt(3.0) / 2}), 0.0);
    PeriodicGreen d(Cell({1.0, 0.0}, {1.5, std::sqrt(3.0) / 2}), 0.0);
    CHECK(c.value({0.2, 0.1}) == doctest::Approx(d.value({0.2, 0.1})).epsilon(1e-12));
    CHECK(c.regular_part_at_zero() == doctest::Approx(d.regular_part_at_zero()).epsilon(1e-12));
}

TEST_CASE("regular gradient and unreduced regular part") {
    for (double kappa : {0.0, 0.8}) {
        PeriodicGreen g(TorusGeometry{2.0, kappa});
        CHECK(norm(g.regular_gradient({0.0, 0.0})) < 1e-14);
        for (const Vec2 x : {Vec2{0.3, -0.2}, Vec2{1e-4, 2e-4}, Vec2{0.9, 0.1}}) {
            const double h = 1e-5;
            const Vec2 fd{(g.regular_part(x + Vec2{h, 0}) - g.regular_part(x - Vec2{h, 0})) / (2 * h),
                          (g.regular_part(x + Vec2{0, h}) - g.regular_part(x - Vec2{0, h})) / (2 * h)};
            CHECK(norm(fd - g.regular_gradient(x)) < 1e-7);
        }
        // Continuation across the cell boundary: smooth along a line through it.
        const double inr = g.inradius();
        std::vector<double> v;
        for (int i = -2; i <= 2; ++i)
            v.push_back(g.regular_part_near({inr + i * 1e-3, 0.3}));
        const double second = v[0] - 4 * v[1] + 6 * v[2] - 4 * v[3] + v[4];
        CHECK(std::abs(second) < 1e-10);
        CHECK(g.regular_part_near({1.2, 0.0}) ==
              doctest::Approx(g.value({1.2, 0.0}) + std::log(1.2) / (2 * pi)).epsilon(1e-14));
        CHECK(g.regular_part_near({0.1, 0.0}) == doctest::Approx(g.regular_part({0.1, 0.0})).epsilon(1e-14));
    }
}

TEST_CASE("combined value and gradient") {
    for (double kappa : {0.0, 1.3}) {
        PeriodicGreen g(Cell({1.0, 0.0}, {0.3, 1.2}), kappa);
        for (const Vec2 x : {Vec2{0.2, -0.1}, Vec2{1e-3, 2e-3}, Vec2{2.7, 5.1}}) {
            const auto [v, gr] = g.value_and_gradient(x);
            CHECK(v == doctest::Approx(g.value(x)).epsilon(1e-13));
            CHECK(norm(gr - g.gradient(x)) <= 1e-13 * norm(gr));
            const auto [s, sg] = g.regular_value_and_gradient(x);
            CHECK(s == doctest::Approx(g.regular_part(x)).epsilon(1e-13));
            CHECK(norm(sg - g.regular_gradient(x)) <= 1e-12 * std::max(1.0, norm(sg)));
        }
        const auto [s0, g0] = g.regular_value_and_gradient({0.0, 0.0});
        CHECK(s0 == doctest::Approx(g.regular_part_at_zero()).epsilon(1e-14));
        CHECK(norm(g0) == 0.0);
    }
}
