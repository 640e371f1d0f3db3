#include "okdrop/corpus.hpp"

#include "okdrop/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace okdrop {

ModelParams cluster_params() {
    ModelParams p;
    p.epsilon = 1e-6;
    p.ell = 30.0; // blown-up side about 111, so r0 = 1/4
    return p;
}

DropletConfig random_cluster(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DropletConfig c;
    c.params = cluster_params();
    const ModelParams &p = c.params;
    const double s = std::sqrt(p.log_eps());
    const double amax = 3.0 * std::numbers::pi * p.rbar_eps() * p.rbar_eps();
    const int n = 1 + static_cast<int>(u(rng) * 4.0);
    const Vec2 base{0.4 * p.ell + 0.2 * p.ell * u(rng), 0.4 * p.ell + 0.2 * p.ell * u(rng)};
    int attempts = 0;
    while (static_cast<int>(c.droplets.size()) < n && attempts < 1000) {
        ++attempts;
        const double A = p.beta() + (amax - p.beta()) * u(rng);
        const double area = A / p.area_scale(); // physical
        const double kind = u(rng);
        Shape shape;
        if (kind < 0.6) {
            shape = Disk{std::sqrt(area / std::numbers::pi)};
        } else if (kind < 0.8) {
            const double e = 1.0 + u(rng);
            const double a = std::sqrt(area * e / std::numbers::pi);
            shape = Ellipse{a, a / e, std::numbers::pi * u(rng)};
        } else {
            // Convex quadrilateral scaled to the target area.
            std::vector<Vec2> v;
            for (int k = 0; k < 4; ++k) {
                const double th = std::numbers::pi / 2 * (k + 0.2 + 0.6 * u(rng));
                const double r = 0.8 + 0.4 * u(rng);
                v.push_back({r * std::cos(th), r * std::sin(th)});
            }
            const double a0 = shape_area(Polygon{v});
            for (auto &q : v)
                q *= std::sqrt(area / a0);
            shape = Polygon{v};
        }
        const Vec2 center = base + Vec2{u(rng) - 0.5, u(rng) - 0.5} * (0.3 / s);
        DropletConfig trial = c;
        trial.droplets.push_back({center, shape});
        try {
            trial.validate();
        } catch (const DomainError &) {
            continue;
        }
        c = std::move(trial);
    }
    return c;
}

} // namespace okdrop
