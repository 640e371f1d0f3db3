#include "okdrop/balls.hpp"
#include "okdrop/errors.hpp"

#include "okdrop/corpus.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace okdrop;
using std::numbers::pi;

namespace {

BallCollection make(std::vector<Ball> balls, double side = 100.0) {
    BallCollection c;
    c.side = side;
    c.balls = std::move(balls);
    for (std::size_t i = 0; i < c.balls.size(); ++i)
        c.balls[i].covered = {i};
    for (const auto &b : c.balls)
        c.total_radius += b.radius;
    return c;
}

// Boundary samples of every input ball lie in some output ball.
bool contains_all(const BallCollection &in, const BallCollection &out) {
    const Cell cell = out.cell();
    for (const auto &b : in.balls)
        for (int k = 0; k < 64; ++k) {
            const Vec2 x = b.center + Vec2{std::cos(2 * pi * k / 64), std::sin(2 * pi * k / 64)} * b.radius;
            bool ok = false;
            for (const auto &o : out.balls)
                ok = ok || norm(cell.minimal_image(x - o.center)) <= o.radius * (1 + 1e-12);
            if (!ok)
                return false;
        }
    return true;
}

bool disjoint(const BallCollection &c) {
    for (std::size_t i = 0; i < c.balls.size(); ++i)
        for (std::size_t j = i + 1; j < c.balls.size(); ++j)
            if (norm(c.cell().minimal_image(c.balls[i].center - c.balls[j].center)) <=
                (c.balls[i].radius + c.balls[j].radius) * (1 - 1e-12))
                return false;
    return true;
}

DropletConfig single_disk(double eps = 1e-6) {
    DropletConfig c;
    c.params = cluster_params();
    c.params.epsilon = eps;
    const double r = c.params.r_prime_eps() / std::sqrt(c.params.log_eps());
    c.droplets = {{{15.0, 15.0}, Disk{r}}};
    return c;
}

} // namespace

TEST_CASE("initial cover") {
    const DropletConfig one = single_disk();
    const double s = std::sqrt(one.params.log_eps());
    const auto c1 = initial_cover(one, one.params.beta());
    REQUIRE(c1.balls.size() == 1);
    CHECK(c1.balls[0].radius == doctest::Approx(std::get<Disk>(one.droplets[0].shape).radius * s).epsilon(1e-14));
    CHECK(c1.balls[0].covered == std::vector<std::size_t>{0});
    CHECK(c1.stage == BallStage::initial);

    DropletConfig two = one;
    two.droplets.push_back({{20.0, 12.0}, Disk{0.8 * std::get<Disk>(one.droplets[0].shape).radius}});
    const auto c2 = initial_cover(two, two.params.beta());
    REQUIRE(c2.balls.size() == 2);
    CHECK(c2.total_radius == doctest::Approx(c2.balls[0].radius + c2.balls[1].radius).epsilon(1e-15));

    // Elongated polygon: between half the diameter and the semi-perimeter.
    DropletConfig poly = one;
    const double a = 4e-3, b = 4e-4;
    const std::vector<Vec2> v{{-a, -b}, {a, -b}, {a, b}, {0.0, 2 * b}, {-a, b}};
    poly.droplets = {{{10.0, 10.0}, Polygon{v}}};
    const auto cp = initial_cover(poly, poly.params.beta() * 1e-3);
    double diam = 0.0;
    for (const auto &x : v)
        for (const auto &y : v)
            diam = std::max(diam, norm(x - y) * s);
    CHECK(cp.balls[0].radius >= 0.5 * diam * (1 - 1e-12));
    CHECK(cp.balls[0].radius <= 0.5 * shape_perimeter(Polygon{v}) * s);

    // Small droplets are ignored; none left is an error.
    CHECK_THROWS_AS(initial_cover(one, 1e6), DomainError);
}

TEST_CASE("merge to disjoint") {
    const auto pair = make({{{0.0, 0.0}, 1.0, {}}, {{1.5, 0.0}, 1.0, {}}});
    const auto m = merge_to_disjoint(pair);
    REQUIRE(m.balls.size() == 1);
    CHECK(m.balls[0].radius == 2.0);
    CHECK(norm(m.balls[0].center - Vec2{0.75, 0.0}) < 1e-14);
    CHECK(contains_all(pair, m));
    CHECK(m.balls[0].covered == std::vector<std::size_t>{0, 1});
    CHECK(m.stage == BallStage::merged);

    const auto apart = make({{{10.0, 10.0}, 1.0, {}}, {{20.0, 10.0}, 2.0, {}}});
    const auto ma = merge_to_disjoint(apart);
    REQUIRE(ma.balls.size() == 2);
    CHECK(ma.balls[0].center == apart.balls[0].center);
    CHECK(ma.balls[1].radius == 2.0);

    const auto chain = make({{{10.0, 5.0}, 1.0, {}}, {{11.5, 5.0}, 1.0, {}}, {{13.0, 5.0}, 1.0, {}}});
    const auto mc = merge_to_disjoint(chain);
    REQUIRE(mc.balls.size() == 1);
    CHECK(mc.balls[0].radius == 3.0);
    CHECK(contains_all(chain, mc));

    // Unequal radii close to tangency.
    const auto uneq = make({{{30.0, 30.0}, 3.0, {}}, {{33.9, 30.0}, 1.0, {}}});
    const auto mu = merge_to_disjoint(uneq);
    REQUIRE(mu.balls.size() == 1);
    CHECK(contains_all(uneq, mu));

    // Across the periodic boundary.
    const auto wrap = make({{{0.5, 50.0}, 1.0, {}}, {{99.0, 50.0}, 1.0, {}}});
    const auto mw = merge_to_disjoint(wrap);
    REQUIRE(mw.balls.size() == 1);
    CHECK(contains_all(wrap, mw));
}

TEST_CASE("grow") {
    const auto one = make({{{5.0, 5.0}, 1.0, {}}});
    const auto g1 = grow(one, 2.0, 10.0);
    REQUIRE(g1.balls.size() == 1);
    CHECK(g1.balls[0].radius == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g1.balls[0].center == one.balls[0].center);
    CHECK(g1.stage == BallStage::grown);

    const auto far = make({{{5.0, 5.0}, 1.0, {}}, {{15.0, 5.0}, 1.0, {}}});
    const auto g2 = grow(far, 4.0, 10.0);
    REQUIRE(g2.balls.size() == 2);
    CHECK(g2.balls[0].radius == doctest::Approx(2.0).epsilon(1e-15));

    // Contact at factor 4.5 / 2 = 2.25, total 4.5; then one ball up to 5.
    const auto near = make({{{5.0, 5.0}, 1.0, {}}, {{9.5, 5.0}, 1.0, {}}});
    const auto g3 = grow(near, 4.5 * (1 - 1e-9), 10.0);
    CHECK(g3.balls.size() == 2);
    const auto g4 = grow(near, 5.0, 10.0);
    REQUIRE(g4.balls.size() == 1);
    CHECK(g4.balls[0].radius == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(contains_all(near, g4));

    CHECK_THROWS_AS(grow(one, 0.5, 10.0), DomainError);
    CHECK_THROWS_AS(grow(one, 2.0), DomainError); // default r0 = 1/4 on side 100
    CHECK_THROWS_AS(grow(make({{{5.0, 5.0}, 1.0, {}}}, 12.0), 4.0, 10.0), DomainError);
}

TEST_CASE("lower bound per ball") {
    const Ball b{{0, 0}, 1.0, {0}};
    CHECK(lower_bound_ball(b, 0.01, 0.01, {3.0}, 1.0) == 0.0);
    CHECK(lower_bound_ball(b, 1e-3 * std::exp(1.0), 1e-3, {3.0, 4.0}, 1e-12) ==
          doctest::Approx(25.0 / (2 * pi)).epsilon(1e-9));
    const double A = std::cbrt(9.0) * pi;
    CHECK(std::abs(lower_bound_ball(b, 0.1, 0.01, {A}, 1.0) - 14.97) < 1e-2);
    // Non-decreasing on [r_B0, 1/c]; the clipped set is an initial interval.
    double prev = -1.0;
    bool left_clip = false;
    for (int i = 0; i <= 1000; ++i) {
        const double r = 0.01 + i * (2.0 - 0.01) / 1000;
        const double v = lower_bound_ball(b, r, 0.01, {1.0}, 0.5);
        CHECK(v >= prev);
        if (v > 0)
            left_clip = true;
        else
            CHECK_FALSE(left_clip);
        prev = v;
    }
    CHECK_THROWS_AS(lower_bound_ball(b, 0.001, 0.01, {1.0}, 1.0), DomainError);
}

TEST_CASE("weighted lower bound") {
    const Ball b{{0, 0}, 0.5, {0}};
    const std::vector<Droplet> drops{{{0.0, 0.0}, Disk{0.05}}, {{0.2, 0.1}, Disk{0.03}}};
    const std::vector<double> q{3.0, 2.0};
    const double r = 0.4, rb0 = 0.08, c = 0.2;
    const LipschitzWeight one{[](Vec2) { return 1.0; }, 0.0};
    const auto w1 = weighted_lower_bound(b, one, r, rb0, drops, q, c);
    CHECK(w1.deficit == 0.0);
    CHECK(w1.value == doctest::Approx(lower_bound_ball(b, r, rb0, q, c)).epsilon(1e-13));

    const LipschitzWeight zero{[](Vec2) { return 0.0; }, 0.0};
    const auto w0 = weighted_lower_bound(b, zero, r, rb0, drops, q, c, 1.0);
    CHECK(w0.value <= 0.0);
    CHECK(w0.clipped == 0.0);

    // Tent peaked at the droplet center: mean over a disk is 1 - (2/3) rho / w.
    const double w = 0.2;
    const LipschitzWeight tent{[w](Vec2 x) { return std::max(0.0, 1.0 - norm(x) / w); }, 1.0 / w};
    const auto wt = weighted_lower_bound(b, tent, r, rb0, {drops[0]}, {q[0]}, c, 0.5);
    CHECK(std::abs(wt.chi_values[0] - (1.0 - 2.0 / 3.0 * 0.05 / w)) < 1e-8);
    CHECK(wt.deficit == doctest::Approx(0.5 / w * 9.0).epsilon(1e-14));
}

TEST_CASE("verify lower bound") {
    const DropletConfig one = single_disk();
    const ModelParams &p = one.params;
    const auto rep = verify_lower_bound(one, 10.0 * p.rho_eps());
    REQUIRE(rep.balls.size() == 1);
    CHECK(rep.c == doctest::Approx(std::pow(p.kappa, 4)).epsilon(1e-15));
    CHECK(rep.violations == 0);
    const auto &b = rep.balls[0];
    CHECK(b.gap > 0.0);
    const double rel = b.lhs / b.log_prediction - 1.0;
    CHECK(rel >= 0.0);
    CHECK(rel <= 0.2);

    // Degenerate radius: the bound vanishes.
    const auto deg = verify_lower_bound(one, rep.r_B0);
    CHECK(deg.balls[0].bound == 0.0);
    CHECK(deg.balls[0].lhs >= 0.0);

    // Two-droplet cluster merged into one ball.
    DropletConfig two = one;
    const double s = std::sqrt(p.log_eps());
    const double r1 = std::get<Disk>(one.droplets[0].shape).radius;
    two.droplets.push_back({one.droplets[0].center + Vec2{3.0 * r1, 0.0}, Disk{0.9 * r1}});
    const auto rep2 = verify_lower_bound(two, 0.2);
    REQUIRE(rep2.balls.size() == 1);
    CHECK(rep2.balls[0].ball.covered.size() == 2);
    double q = 0.0;
    for (const auto &d : two.droplets) {
        const double a = truncated_area(rescaled_area(d, p), p.gamma);
        q += a * a;
    }
    CHECK(rep2.balls[0].bound ==
          doctest::Approx(q / (2 * pi) * (std::log(0.2 / rep2.r_B0) - rep2.c * 0.2)).epsilon(1e-12));
    CHECK(rep2.violations == 0);
    CHECK(rep2.r_B0 == doctest::Approx((1.9 * r1) * s).epsilon(1e-12));
}

TEST_CASE("random clusters") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const DropletConfig c = random_cluster(seed);
        const auto init = initial_cover(c, c.params.beta());
        const auto merged = merge_to_disjoint(init);
        CHECK(std::abs(merged.total_radius - init.total_radius) <= 1e-12 * init.total_radius);
        CHECK(disjoint(merged));
        CHECK(contains_all(init, merged));
        const double r = init.total_radius + 0.5 * (0.25 - init.total_radius);
        const auto grown = grow(merged, r);
        CHECK(std::abs(grown.total_radius - r) <= 1e-12 * r);
        CHECK(disjoint(grown));
        CHECK(contains_all(init, grown));
        const auto rep = verify_lower_bound(c, r);
        CHECK(rep.violations == 0);
    }
}
