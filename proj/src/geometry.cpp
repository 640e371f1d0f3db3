#include "okdrop/geometry.hpp"

#include "okdrop/errors.hpp"

#include <numbers>

namespace okdrop {

Cell::Cell(Vec2 a, Vec2 b) : a_(a), b_(b) {
    const double det = cross(a, b);
    if (!(std::abs(det) > 0.0) || !is_finite(a) || !is_finite(b))
        throw DomainError("cell basis is degenerate or non-finite");
    area_ = std::abs(det);
    const double f = 2.0 * std::numbers::pi / det;
    ka_ = Vec2(b.y, -b.x) * f;
    kb_ = Vec2(-a.y, a.x) * f;
}

Vec2 Cell::to_fractional(Vec2 p) const {
    const double det = cross(a_, b_);
    return {cross(p, b_) / det, cross(a_, p) / det};
}

Vec2 Cell::reduce_centered(Vec2 p) const {
    Vec2 f = to_fractional(p);
    f.x -= std::floor(f.x + 0.5);
    f.y -= std::floor(f.y + 0.5);
    return from_fractional(f);
}

Vec2 Cell::wrap(Vec2 p) const {
    Vec2 f = to_fractional(p);
    f.x -= std::floor(f.x);
    f.y -= std::floor(f.y);
    return from_fractional(f);
}

Vec2 Cell::minimal_image(Vec2 p) const {
    const Vec2 c = reduce_centered(p);
    Vec2 best = c;
    double best2 = norm2(c);
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            const Vec2 q = c + a_ * i + b_ * j;
            const double q2 = norm2(q);
            if (q2 < best2) {
                best2 = q2;
                best = q;
            }
        }
    }
    return best;
}

} // namespace okdrop
