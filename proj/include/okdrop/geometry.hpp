#pragma once

#include <array>
#include <cmath>

namespace okdrop {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 &operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr Vec2 &operator-=(Vec2 o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    constexpr Vec2 &operator*=(double s) {
        x *= s;
        y *= s;
        return *this;
    }
    constexpr bool operator==(const Vec2 &) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

// Periodic cell spanned by two basis vectors (a 2D Bravais lattice).
class Cell {
  public:
    Cell() : Cell({1.0, 0.0}, {0.0, 1.0}) {}
    Cell(Vec2 a, Vec2 b);

    static Cell square(double side) { return Cell({side, 0.0}, {0.0, side}); }
    static Cell rectangle(double w, double h) { return Cell({w, 0.0}, {0.0, h}); }

    Vec2 a() const { return a_; }
    Vec2 b() const { return b_; }
    double area() const { return area_; }
    // sqrt(area); the length scale used for relative thresholds.
    double scale() const { return std::sqrt(area_); }

    // Reciprocal vectors k_i with a_i . k_j = 2 pi delta_ij.
    Vec2 ka() const { return ka_; }
    Vec2 kb() const { return kb_; }

    Vec2 to_fractional(Vec2 p) const;
    Vec2 from_fractional(Vec2 f) const { return a_ * f.x + b_ * f.y; }

    // Representative with fractional coordinates in [-1/2, 1/2).
    Vec2 reduce_centered(Vec2 p) const;
    // Representative with fractional coordinates in [0, 1).
    Vec2 wrap(Vec2 p) const;
    // Shortest periodic image of p (searched over neighbouring cells).
    Vec2 minimal_image(Vec2 p) const;

    Cell scaled(double s) const { return Cell(a_ * s, b_ * s); }

  private:
    Vec2 a_, b_, ka_, kb_;
    double area_;
};

} // namespace okdrop
