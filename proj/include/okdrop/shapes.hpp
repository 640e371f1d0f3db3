#pragma once

#include "okdrop/geometry.hpp"

#include <variant>
#include <vector>

namespace okdrop {

// Shapes are described relative to their droplet center.
struct Disk {
    double radius = 1.0;
};
struct Ellipse {
    double a = 1.0; // semi-axis along the rotated x direction
    double b = 1.0;
    double angle = 0.0;
};
struct Polygon {
    std::vector<Vec2> vertices; // simple polygon, either orientation
};

using Shape = std::variant<Disk, Ellipse, Polygon>;

struct WeightedPoint {
    Vec2 p;
    double w = 0.0;
};

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

// Throws DomainError for zero area, non-finite data or self-intersection.
void validate_shape(const Shape &s);

double shape_area(const Shape &s);
double shape_perimeter(const Shape &s);
Vec2 shape_centroid(const Shape &s);
bool shape_contains(const Shape &s, Vec2 p);
Shape scale_shape(const Shape &s, double k);
// Smallest enclosing circle.
Circle bounding_circle(const Shape &s);

// Positive-weight rule integrating smooth functions over the shape;
// `order` controls the Gauss-Legendre order per direction.
std::vector<WeightedPoint> shape_quadrature(const Shape &s, int order = 12);
// Rule on the boundary: nodes with arclength weights.
std::vector<WeightedPoint> boundary_quadrature(const Shape &s, int order = 16);

// U(x) = \int_shape ln|x - y| dy and its gradient in x.
double log_potential(const Shape &s, Vec2 x);
Vec2 log_potential_grad(const Shape &s, Vec2 x);

// Area of the intersection of the shape with the disk B(c, r).
double intersection_area_with_disk(const Shape &s, Vec2 c, double r);

double isoperimetric_deficit(const Shape &s);

struct FraenkelResult {
    double alpha = 0.0;
    Circle best_ball;
};
// min over balls B with |B| = |shape| of |shape symmetric-difference B| / |shape|.
FraenkelResult fraenkel_asymmetry(const Shape &s, double tol = 1e-8);

struct BonnesenRecord {
    double circumradius = 0.0; // R
    double fraenkel_radius = 0.0; // r = sqrt(|shape| / pi)
    double deficit = 0.0;
    double ratio = 0.0; // (R/r - 1)/sqrt(D); 0 when D = 0
};
BonnesenRecord bonnesen_check(const Shape &s);

} // namespace okdrop
