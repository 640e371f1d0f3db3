#include "okdrop/balls.hpp"

#include "okdrop/errors.hpp"
#include "okdrop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace okdrop {

namespace {

constexpr double pi = std::numbers::pi;

double sum_radii(const std::vector<Ball> &balls) {
    CompensatedSum s;
    for (const auto &b : balls)
        s += b.radius;
    return s.value();
}

} // namespace

std::string to_string(BallStage s) {
    switch (s) {
    case BallStage::initial:
        return "initial";
    case BallStage::merged:
        return "merged";
    case BallStage::grown:
        return "grown";
    }
    return "unknown";
}

bool BallCollection::intersect(std::size_t i, std::size_t j) const {
    const Vec2 d = cell().minimal_image(balls[i].center - balls[j].center);
    return norm(d) <= balls[i].radius + balls[j].radius;
}

std::vector<Droplet> blown_up_droplets(const DropletConfig &config) {
    const double s = std::sqrt(config.params.log_eps());
    std::vector<Droplet> out;
    out.reserve(config.droplets.size());
    for (const auto &d : config.droplets)
        out.push_back({d.center * s, scale_shape(d.shape, s)});
    return out;
}

BallCollection initial_cover(const DropletConfig &config, double beta) {
    config.validate();
    BallCollection coll;
    coll.side = config.params.ell_eps();
    const auto blown = blown_up_droplets(config);
    for (std::size_t i = 0; i < blown.size(); ++i) {
        if (rescaled_area(config.droplets[i], config.params) < beta)
            continue;
        const Circle c = bounding_circle(blown[i].shape);
        coll.balls.push_back({coll.cell().wrap(blown[i].center + c.center), c.radius, {i}});
    }
    if (coll.balls.empty())
        throw DomainError("initial_cover: no droplet with A_i >= beta");
    coll.total_radius = sum_radii(coll.balls);
    return coll;
}

namespace {

// Merges pairs with distance <= (1 + slack)(r_i + r_j), lowest index pair first.
BallCollection merge_with_slack(const BallCollection &in, double slack) {
    BallCollection out = in;
    const Cell cell = out.cell();
    for (;;) {
        bool merged = false;
        for (std::size_t i = 0; i < out.balls.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < out.balls.size() && !merged; ++j) {
                const double d = norm(cell.minimal_image(out.balls[i].center - out.balls[j].center));
                if (d > (1.0 + slack) * (out.balls[i].radius + out.balls[j].radius))
                    continue;
                Ball &a = out.balls[i];
                const Ball &b = out.balls[j];
                // Weighted toward the larger ball so that both are contained.
                const Vec2 bj = a.center + cell.minimal_image(b.center - a.center);
                const double r = a.radius + b.radius;
                a.center = cell.wrap((a.center * a.radius + bj * b.radius) / r);
                a.radius = r;
                a.covered.insert(a.covered.end(), b.covered.begin(), b.covered.end());
                std::sort(a.covered.begin(), a.covered.end());
                out.balls.erase(out.balls.begin() + static_cast<std::ptrdiff_t>(j));
                merged = true;
            }
        }
        if (!merged)
            break;
    }
    if (out.stage == BallStage::initial)
        out.stage = BallStage::merged;
    out.total_radius = sum_radii(out.balls);
    return out;
}

} // namespace

BallCollection merge_to_disjoint(const BallCollection &in) { return merge_with_slack(in, 0.0); }

double default_r0(double side) { return std::min(1.0, side / 100.0) / 4.0; }

BallCollection grow(const BallCollection &coll, double target_r, double r0) {
    if (r0 < 0.0)
        r0 = default_r0(coll.side);
    if (!(target_r >= coll.total_radius * (1.0 - 1e-14)))
        throw DomainError("grow: target radius below the current total radius");
    if (target_r > r0)
        throw DomainError("grow: target radius exceeds r0");
    BallCollection cur = merge_to_disjoint(coll);
    for (;;) {
        const double total = cur.total_radius;
        double t_contact = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cur.balls.size(); ++i)
            for (std::size_t j = i + 1; j < cur.balls.size(); ++j) {
                const double d = norm(cur.cell().minimal_image(cur.balls[i].center - cur.balls[j].center));
                t_contact = std::min(t_contact, d / (cur.balls[i].radius + cur.balls[j].radius));
            }
        const double t_target = target_r / total;
        const double t = std::min(t_contact, t_target);
        for (auto &b : cur.balls)
            b.radius *= t;
        if (t_target <= t_contact) {
            cur.total_radius = sum_radii(cur.balls);
            break;
        }
        cur = merge_with_slack(cur, 1e-12);
    }
    for (const auto &b : cur.balls)
        if (2.0 * b.radius >= 0.5 * cur.side)
            throw DomainError("grow: ball diameter reaches half the torus side");
    cur.stage = BallStage::grown;
    cur.grown_to = target_r;
    return cur;
}

double lower_bound_ball(const Ball &, double r, double r_B0, const std::vector<double> &charges, double c) {
    if (!(r_B0 > 0.0) || !(r >= r_B0))
        throw DomainError("lower_bound_ball: need r >= r_B0 > 0");
    if (!(c > 0.0))
        throw DomainError("lower_bound_ball: c must be positive");
    CompensatedSum q;
    for (double a : charges)
        q += a * a;
    return std::max(std::log(r / r_B0) - c * r, 0.0) * q.value() / (2.0 * pi);
}

WeightedBound weighted_lower_bound(const Ball &ball, const LipschitzWeight &chi, double r, double r_B0,
                                   const std::vector<Droplet> &droplets, const std::vector<double> &charges,
                                   double c, double C) {
    if (droplets.size() != charges.size())
        throw DomainError("weighted_lower_bound: droplets and charges differ in length");
    if (!chi.chi || chi.lipschitz < 0.0)
        throw DomainError("weighted_lower_bound: weight must be set with a non-negative Lipschitz bound");
    WeightedBound out;
    CompensatedSum total, q;
    for (std::size_t i = 0; i < droplets.size(); ++i) {
        CompensatedSum avg;
        for (const auto &p : shape_quadrature(droplets[i].shape, 16))
            avg += p.w * chi.chi(droplets[i].center + p.p);
        const double chi_i = avg.value() / shape_area(droplets[i].shape);
        if (chi_i < -1e-12)
            throw DomainError("weighted_lower_bound: weight must be non-negative");
        out.chi_values.push_back(chi_i);
        total += chi_i * lower_bound_ball(ball, r, r_B0, {charges[i]}, c);
        q += charges[i] * charges[i];
    }
    out.deficit = C * chi.lipschitz * q.value();
    out.value = total.value() - out.deficit;
    out.clipped = std::max(out.value, 0.0);
    return out;
}

VerifyReport verify_lower_bound(const DropletConfig &config, double r, const BallVerifyOptions &opts) {
    const ModelParams &p = config.params;
    const double beta = opts.beta < 0.0 ? p.beta() : opts.beta;
    VerifyReport rep;
    rep.r = r;
    rep.c = opts.c < 0.0 ? std::pow(p.kappa, 4) : opts.c;
    const BallCollection init = initial_cover(config, beta);
    rep.r_B0 = init.total_radius;
    rep.collection = grow(init, r, opts.r0);

    const HField h(config, 1e-10, opts.smooth_order);
    const double mass = h.screening() * h.screening() / 4.0;
    const auto &drops = h.droplets();
    const Cell cell = rep.collection.cell();
    for (const auto &b : rep.collection.balls) {
        BallReport br;
        br.ball = b;
        std::vector<double> charges;
        for (std::size_t i : b.covered)
            charges.push_back(truncated_area(h.charges()[i], p.gamma));
        // Split the radial rule where droplet boundaries can cross a circle about the center.
        std::vector<double> breaks;
        for (const auto &d : drops) {
            const Circle bc = bounding_circle(d.shape);
            const double dist = norm(cell.minimal_image(d.center + bc.center - b.center));
            if (dist - bc.radius < b.radius) {
                breaks.push_back(std::max(0.0, dist - bc.radius));
                breaks.push_back(dist + bc.radius);
            }
        }
        br.lhs = h.annulus_energy(b.center, 0.0, b.radius, mass, breaks, opts.angular_nodes, opts.radial_order);
        br.bound = lower_bound_ball(b, r, rep.r_B0, charges, rep.c);
        br.gap = br.lhs - br.bound;
        CompensatedSum q;
        for (double a : charges)
            q += a * a;
        br.log_prediction = q.value() * std::log(r / rep.r_B0) / (2.0 * pi);
        br.violation = br.gap < 0.0;
        rep.violations += br.violation ? 1 : 0;
        rep.balls.push_back(std::move(br));
    }
    return rep;
}

} // namespace okdrop
