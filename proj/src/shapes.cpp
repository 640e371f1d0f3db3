#include "okdrop/shapes.hpp"

#include "okdrop/errors.hpp"
#include "okdrop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace okdrop {

namespace {
constexpr double pi = std::numbers::pi;

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

double signed_area(const std::vector<Vec2> &v) {
    CompensatedSum s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * s.value();
}

std::vector<Vec2> ccw(const std::vector<Vec2> &v) {
    std::vector<Vec2> out = v;
    if (signed_area(out) < 0.0)
        std::reverse(out.begin(), out.end());
    return out;
}

// Ellipse boundary e(t) = M (cos t, sin t).
struct EllipseMap {
    double m00, m01, m10, m11;
    explicit EllipseMap(const Ellipse &e) {
        const double c = std::cos(e.angle), s = std::sin(e.angle);
        m00 = c * e.a;
        m01 = -s * e.b;
        m10 = s * e.a;
        m11 = c * e.b;
    }
    Vec2 at(double t) const { return apply({std::cos(t), std::sin(t)}); }
    Vec2 tangent(double t) const { return apply({-std::sin(t), std::cos(t)}); }
    Vec2 apply(Vec2 u) const { return {m00 * u.x + m01 * u.y, m10 * u.x + m11 * u.y}; }
    double det() const { return m00 * m11 - m01 * m10; }
};

int orient(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    return (v > 0) - (v < 0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4)
        return true;
    if (o1 == 0 && on_segment(p1, p2, q1))
        return true;
    if (o2 == 0 && on_segment(p1, p2, q2))
        return true;
    if (o3 == 0 && on_segment(q1, q2, p1))
        return true;
    if (o4 == 0 && on_segment(q1, q2, p2))
        return true;
    return false;
}

bool polygon_contains(const std::vector<Vec2> &v, Vec2 p) {
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double xc = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
            if (p.x < xc)
                inside = !inside;
        }
    }
    return inside;
}

std::vector<std::array<Vec2, 3>> triangulate(const std::vector<Vec2> &poly) {
    std::vector<Vec2> v = ccw(poly);
    std::vector<std::array<Vec2, 3>> tris;
    while (v.size() > 3) {
        bool clipped = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Vec2 a = v[(i + v.size() - 1) % v.size()], b = v[i], c = v[(i + 1) % v.size()];
            if (cross(b - a, c - b) <= 0.0)
                continue;
            bool empty = true;
            for (std::size_t k = 0; k < v.size() && empty; ++k) {
                const Vec2 p = v[k];
                if (p == a || p == b || p == c)
                    continue;
                if (cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0)
                    empty = false;
            }
            if (!empty)
                continue;
            tris.push_back({a, b, c});
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped)
            throw DomainError("polygon triangulation failed (degenerate polygon)");
    }
    tris.push_back({v[0], v[1], v[2]});
    return tris;
}

// \int ln(h^2 + t^2) dt antiderivative.
double log_antiderivative(double h, double t) {
    const double r2 = h * h + t * t;
    double v = (t == 0.0 ? 0.0 : t * std::log(r2)) - 2.0 * t;
    if (h != 0.0)
        v += 2.0 * h * std::atan(t / h);
    return v;
}

Circle circle_from(Vec2 a, Vec2 b) { return {(a + b) * 0.5, 0.5 * norm(a - b)}; }

Circle circle_from(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 bb = b - a, cc = c - a;
    const double d = 2.0 * cross(bb, cc);
    if (std::abs(d) < 1e-300) {
        Circle best = circle_from(a, b);
        for (const Circle &k : {circle_from(a, c), circle_from(b, c)})
            if (k.radius > best.radius)
                best = k;
        return best;
    }
    const double b2 = norm2(bb), c2 = norm2(cc);
    const Vec2 u{(cc.y * b2 - bb.y * c2) / d, (bb.x * c2 - cc.x * b2) / d};
    return {a + u, norm(u)};
}

bool in_circle(const Circle &c, Vec2 p) { return norm(p - c.center) <= c.radius * (1.0 + 1e-12) + 1e-300; }

Circle min_enclosing(const std::vector<Vec2> &pts) {
    Circle c{pts[0], 0.0};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (in_circle(c, pts[i]))
            continue;
        c = {pts[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (in_circle(c, pts[j]))
                continue;
            c = circle_from(pts[i], pts[j]);
            for (std::size_t k = 0; k < j; ++k)
                if (!in_circle(c, pts[k]))
                    c = circle_from(pts[i], pts[j], pts[k]);
        }
    }
    return c;
}

double lens_area(double r1, double r2, double d) {
    if (d >= r1 + r2)
        return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return pi * r * r;
    }
    const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0));
    const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0));
    const double k = std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)));
    return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k;
}

} // namespace

void validate_shape(const Shape &s) {
    std::visit(overloaded{
                   [](const Disk &d) {
                       if (!(d.radius > 0.0) || !std::isfinite(d.radius))
                           throw DomainError("disk radius must be positive and finite");
                   },
                   [](const Ellipse &e) {
                       if (!(e.a > 0.0) || !(e.b > 0.0) || !std::isfinite(e.a) || !std::isfinite(e.b) ||
                           !std::isfinite(e.angle))
                           throw DomainError("ellipse semi-axes must be positive and finite");
                   },
                   [](const Polygon &p) {
                       const auto &v = p.vertices;
                       if (v.size() < 3)
                           throw DomainError("polygon needs at least three vertices");
                       for (const auto &q : v)
                           if (!is_finite(q))
                               throw DomainError("polygon vertex is not finite");
                       if (!(std::abs(signed_area(v)) > 0.0))
                           throw DomainError("polygon has zero area");
                       const std::size_t n = v.size();
                       for (std::size_t i = 0; i < n; ++i)
                           for (std::size_t j = i + 1; j < n; ++j) {
                               if (j == i + 1 || (i == 0 && j == n - 1))
                                   continue;
                               if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                                   throw DomainError("polygon is not simple (edges intersect)");
                           }
                   },
               },
               s);
}

double shape_area(const Shape &s) {
    return std::visit(overloaded{
                          [](const Disk &d) { return pi * d.radius * d.radius; },
                          [](const Ellipse &e) { return pi * e.a * e.b; },
                          [](const Polygon &p) { return std::abs(signed_area(p.vertices)); },
                      },
                      s);
}

double shape_perimeter(const Shape &s) {
    return std::visit(overloaded{
                          [](const Disk &d) { return 2.0 * pi * d.radius; },
                          [](const Ellipse &e) {
                              const double a = std::max(e.a, e.b), b = std::min(e.a, e.b);
                              const double k = std::sqrt(std::max(0.0, 1.0 - (b / a) * (b / a)));
                              return 4.0 * a * std::comp_ellint_2(k);
                          },
                          [](const Polygon &p) {
                              CompensatedSum s;
                              const auto &v = p.vertices;
                              for (std::size_t i = 0; i < v.size(); ++i)
                                  s += norm(v[(i + 1) % v.size()] - v[i]);
                              return s.value();
                          },
                      },
                      s);
}

Vec2 shape_centroid(const Shape &s) {
    if (const auto *p = std::get_if<Polygon>(&s)) {
        const auto &v = p->vertices;
        double cx = 0, cy = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Vec2 a = v[i], b = v[(i + 1) % v.size()];
            const double c = cross(a, b);
            cx += (a.x + b.x) * c;
            cy += (a.y + b.y) * c;
        }
        const double A = signed_area(v);
        return {cx / (6.0 * A), cy / (6.0 * A)};
    }
    return {0.0, 0.0};
}

bool shape_contains(const Shape &s, Vec2 p) {
    return std::visit(overloaded{
                          [&](const Disk &d) { return norm(p) <= d.radius; },
                          [&](const Ellipse &e) {
                              const double c = std::cos(e.angle), sn = std::sin(e.angle);
                              const double u = c * p.x + sn * p.y, v = -sn * p.x + c * p.y;
                              return (u / e.a) * (u / e.a) + (v / e.b) * (v / e.b) <= 1.0;
                          },
                          [&](const Polygon &poly) { return polygon_contains(poly.vertices, p); },
                      },
                      s);
}

Shape scale_shape(const Shape &s, double k) {
    return std::visit(overloaded{
                          [&](const Disk &d) -> Shape { return Disk{d.radius * k}; },
                          [&](const Ellipse &e) -> Shape { return Ellipse{e.a * k, e.b * k, e.angle}; },
                          [&](const Polygon &p) -> Shape {
                              Polygon q = p;
                              for (auto &v : q.vertices)
                                  v *= k;
                              return q;
                          },
                      },
                      s);
}

Circle bounding_circle(const Shape &s) {
    return std::visit(overloaded{
                          [](const Disk &d) { return Circle{{0.0, 0.0}, d.radius}; },
                          [](const Ellipse &e) { return Circle{{0.0, 0.0}, std::max(e.a, e.b)}; },
                          [](const Polygon &p) { return min_enclosing(p.vertices); },
                      },
                      s);
}

std::vector<WeightedPoint> shape_quadrature(const Shape &s, int order) {
    const auto &gl = gauss_legendre(order);
    std::vector<WeightedPoint> out;
    auto unit_disk = [&](auto &&map, double jac) {
        const int m = 4 * order;
        for (int i = 0; i < order; ++i) {
            const double r = 0.5 * (1.0 + gl.nodes[i]);
            const double wr = 0.5 * gl.weights[i] * r;
            for (int k = 0; k < m; ++k) {
                const double t = 2.0 * pi * (k + 0.5) / m;
                out.push_back({map(Vec2{r * std::cos(t), r * std::sin(t)}), wr * 2.0 * pi / m * jac});
            }
        }
    };
    std::visit(overloaded{
                   [&](const Disk &d) {
                       unit_disk([&](Vec2 u) { return u * d.radius; }, d.radius * d.radius);
                   },
                   [&](const Ellipse &e) {
                       const EllipseMap M(e);
                       unit_disk([&](Vec2 u) { return M.apply(u); }, std::abs(M.det()));
                   },
                   [&](const Polygon &p) {
                       for (const auto &t : triangulate(p.vertices)) {
                           const double jac2 = std::abs(cross(t[1] - t[0], t[2] - t[0]));
                           for (int i = 0; i < order; ++i) {
                               const double u = 0.5 * (1.0 + gl.nodes[i]);
                               for (int j = 0; j < order; ++j) {
                                   const double v = 0.5 * (1.0 + gl.nodes[j]);
                                   const Vec2 x = t[0] + (t[1] - t[0]) * u + (t[2] - t[1]) * (u * v);
                                   out.push_back({x, 0.25 * gl.weights[i] * gl.weights[j] * jac2 * u});
                               }
                           }
                       }
                   },
               },
               s);
    return out;
}

std::vector<WeightedPoint> boundary_quadrature(const Shape &s, int order) {
    std::vector<WeightedPoint> out;
    std::visit(overloaded{
                   [&](const Disk &d) {
                       const int m = 8 * order;
                       for (int k = 0; k < m; ++k) {
                           const double t = 2.0 * pi * k / m;
                           out.push_back({{d.radius * std::cos(t), d.radius * std::sin(t)}, 2.0 * pi * d.radius / m});
                       }
                   },
                   [&](const Ellipse &e) {
                       const EllipseMap M(e);
                       const int m = 8 * order;
                       for (int k = 0; k < m; ++k) {
                           const double t = 2.0 * pi * k / m;
                           out.push_back({M.at(t), norm(M.tangent(t)) * 2.0 * pi / m});
                       }
                   },
                   [&](const Polygon &p) {
                       const auto &gl = gauss_legendre(order);
                       const auto &v = p.vertices;
                       for (std::size_t i = 0; i < v.size(); ++i) {
                           const Vec2 a = v[i], b = v[(i + 1) % v.size()];
                           const double L = norm(b - a);
                           for (int k = 0; k < order; ++k)
                               out.push_back({a + (b - a) * (0.5 * (1.0 + gl.nodes[k])), 0.5 * L * gl.weights[k]});
                       }
                   },
               },
               s);
    return out;
}

namespace {
constexpr int ellipse_panels = 64;
constexpr int ellipse_order = 16;

template <class F> void ellipse_boundary_rule(const Ellipse &e, F &&f) {
    const EllipseMap M(e);
    const auto &gl = gauss_legendre(ellipse_order);
    const double h = 2.0 * pi / ellipse_panels;
    for (int p = 0; p < ellipse_panels; ++p)
        for (int i = 0; i < ellipse_order; ++i) {
            const double t = (p + 0.5 + 0.5 * gl.nodes[i]) * h;
            f(M.at(t), M.tangent(t), 0.5 * h * gl.weights[i]);
        }
}
} // namespace

double log_potential(const Shape &s, Vec2 x) {
    return std::visit(overloaded{
                          [&](const Disk &d) {
                              const double r2 = norm2(x), R = d.radius;
                              if (r2 >= R * R)
                                  return 0.5 * pi * R * R * std::log(r2);
                              return pi * R * R * std::log(R) - 0.5 * pi * (R * R - r2);
                          },
                          [&](const Ellipse &e) {
                              CompensatedSum s;
                              ellipse_boundary_rule(e, [&](Vec2 y, Vec2 dy, double w) {
                                  const Vec2 z = y - x;
                                  const double r2 = norm2(z);
                                  if (r2 > 0.0)
                                      s += w * cross(z, dy) * (0.25 * std::log(r2) - 0.25);
                              });
                              return s.value();
                          },
                          [&](const Polygon &p) {
                              const auto v = ccw(p.vertices);
                              CompensatedSum s;
                              for (std::size_t i = 0; i < v.size(); ++i) {
                                  const Vec2 a = v[i], b = v[(i + 1) % v.size()];
                                  const double L = norm(b - a);
                                  const Vec2 t = (b - a) / L;
                                  const Vec2 n{t.y, -t.x};
                                  const double h = dot(a - x, n);
                                  const double t0 = dot(a - x, t), t1 = dot(b - x, t);
                                  if (h == 0.0)
                                      continue;
                                  s += h * (0.25 * (log_antiderivative(h, t1) - log_antiderivative(h, t0)) - 0.25 * L);
                              }
                              return s.value();
                          },
                      },
                      s);
}

Vec2 log_potential_grad(const Shape &s, Vec2 x) {
    return std::visit(overloaded{
                          [&](const Disk &d) {
                              const double r2 = norm2(x), R = d.radius;
                              if (r2 >= R * R)
                                  return x * (pi * R * R / r2);
                              return x * pi;
                          },
                          [&](const Ellipse &e) {
                              CompensatedSum gx, gy;
                              ellipse_boundary_rule(e, [&](Vec2 y, Vec2 dy, double w) {
                                  const double r2 = norm2(y - x);
                                  if (r2 > 0.0) {
                                      const double l = 0.5 * std::log(r2);
                                      // -ln|x - y| n ds with n ds = (dy_y, -dy_x) dt
                                      gx += -w * l * dy.y;
                                      gy += w * l * dy.x;
                                  }
                              });
                              return Vec2{gx.value(), gy.value()};
                          },
                          [&](const Polygon &p) {
                              const auto v = ccw(p.vertices);
                              CompensatedSum gx, gy;
                              for (std::size_t i = 0; i < v.size(); ++i) {
                                  const Vec2 a = v[i], b = v[(i + 1) % v.size()];
                                  const double L = norm(b - a);
                                  const Vec2 t = (b - a) / L;
                                  const Vec2 n{t.y, -t.x};
                                  const double h = dot(a - x, n);
                                  const double t0 = dot(a - x, t), t1 = dot(b - x, t);
                                  const double I = 0.5 * (log_antiderivative(h, t1) - log_antiderivative(h, t0));
                                  gx += -I * n.x;
                                  gy += -I * n.y;
                              }
                              return Vec2{gx.value(), gy.value()};
                          },
                      },
                      s);
}

double intersection_area_with_disk(const Shape &s, Vec2 c, double r) {
    if (const auto *d = std::get_if<Disk>(&s))
        return lens_area(d->radius, r, norm(c));

    std::vector<double> phis;
    CompensatedSum area;
    auto inside_ball = [&](Vec2 p) { return norm(p - c) < r; };

    if (const auto *poly = std::get_if<Polygon>(&s)) {
        const auto v = ccw(poly->vertices);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Vec2 a = v[i], b = v[(i + 1) % v.size()];
            const Vec2 d = b - a, f = a - c;
            const double A = norm2(d), B = 2.0 * dot(f, d), C = norm2(f) - r * r;
            std::vector<double> ts{0.0};
            const double disc = B * B - 4 * A * C;
            if (disc > 0.0) {
                const double sq = std::sqrt(disc);
                for (double t : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)})
                    if (t > 0.0 && t < 1.0)
                        ts.push_back(t);
            }
            ts.push_back(1.0);
            std::sort(ts.begin(), ts.end());
            for (std::size_t k = 1; k + 1 < ts.size(); ++k) {
                const Vec2 p = a + d * ts[k];
                phis.push_back(std::atan2(p.y - c.y, p.x - c.x));
            }
            for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
                const Vec2 p = a + d * ts[k], q = a + d * ts[k + 1];
                if (inside_ball(a + d * (0.5 * (ts[k] + ts[k + 1]))))
                    area += 0.5 * cross(p, q);
            }
        }
    } else {
        const auto &e = std::get<Ellipse>(s);
        const EllipseMap M(e);
        auto f = [&](double t) { return norm2(M.at(t) - c) - r * r; };
        const int n = 2048;
        std::vector<double> roots;
        double t0 = 0.0, f0 = f(0.0);
        for (int k = 1; k <= n; ++k) {
            const double t1 = 2.0 * pi * k / n, f1 = f(t1);
            if ((f0 < 0) != (f1 < 0)) {
                double lo = t0, hi = t1, flo = f0;
                for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                    const double mid = 0.5 * (lo + hi), fm = f(mid);
                    if ((fm < 0) == (flo < 0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(0.5 * (lo + hi));
            }
            t0 = t1;
            f0 = f1;
        }
        auto arc = [&](double a, double b) {
            // 1/2 \int (x dy - y dx) along e(t), t in [a, b]
            return 0.5 * M.det() * (b - a);
        };
        if (roots.empty()) {
            if (inside_ball(M.at(0.0)))
                return shape_area(s);
        } else {
            for (double t : roots) {
                const Vec2 p = M.at(t);
                phis.push_back(std::atan2(p.y - c.y, p.x - c.x));
            }
            for (std::size_t k = 0; k < roots.size(); ++k) {
                const double a = roots[k];
                const double b = k + 1 < roots.size() ? roots[k + 1] : roots[0] + 2.0 * pi;
                if (inside_ball(M.at(0.5 * (a + b))))
                    area += arc(a, b);
            }
        }
    }

    if (phis.empty()) {
        // No crossings: nested or disjoint.
        const auto bq = boundary_quadrature(s, 2);
        if (inside_ball(bq.front().p))
            return shape_area(s);
        if (shape_contains(s, c + Vec2{r, 0.0}))
            return pi * r * r;
        return 0.0;
    }
    std::sort(phis.begin(), phis.end());
    for (std::size_t k = 0; k < phis.size(); ++k) {
        const double a = phis[k];
        const double b = k + 1 < phis.size() ? phis[k + 1] : phis[0] + 2.0 * pi;
        const double mid = 0.5 * (a + b);
        if (!shape_contains(s, c + Vec2{r * std::cos(mid), r * std::sin(mid)}))
            continue;
        area += 0.5 * (r * r * (b - a) + r * (c.x * (std::sin(b) - std::sin(a)) - c.y * (std::cos(b) - std::cos(a))));
    }
    return area.value();
}

double isoperimetric_deficit(const Shape &s) {
    validate_shape(s);
    if (std::holds_alternative<Disk>(s))
        return 0.0;
    return shape_perimeter(s) / std::sqrt(4.0 * pi * shape_area(s)) - 1.0;
}

FraenkelResult fraenkel_asymmetry(const Shape &s, double tol) {
    validate_shape(s);
    const double A = shape_area(s);
    const double r = std::sqrt(A / pi);
    FraenkelResult best;
    best.best_ball = {shape_centroid(s), r};
    if (std::holds_alternative<Disk>(s)) {
        best.alpha = 0.0;
        return best;
    }
    auto alpha = [&](double x, double y) {
        return 2.0 * (1.0 - intersection_area_with_disk(s, {x, y}, r) / A);
    };
    const Vec2 c0 = shape_centroid(s);
    best.alpha = alpha(c0.x, c0.y);
    for (int k = -1; k < 8; ++k) {
        Vec2 start = c0;
        if (k >= 0)
            start += Vec2{std::cos(k * pi / 4), std::sin(k * pi / 4)} * (0.1 * r);
        const auto res = nelder_mead2(alpha, start.x, start.y, 0.05 * r, 1e-2 * tol, 4000);
        if (res.value < best.alpha) {
            best.alpha = res.value;
            best.best_ball.center = {res.x, res.y};
        }
    }
    best.alpha = std::max(0.0, best.alpha);
    return best;
}

BonnesenRecord bonnesen_check(const Shape &s) {
    validate_shape(s);
    BonnesenRecord rec;
    rec.circumradius = bounding_circle(s).radius;
    rec.fraenkel_radius = std::sqrt(shape_area(s) / pi);
    rec.deficit = isoperimetric_deficit(s);
    rec.ratio = rec.deficit > 0.0 ? (rec.circumradius / rec.fraenkel_radius - 1.0) / std::sqrt(rec.deficit) : 0.0;
    return rec;
}

} // namespace okdrop
