#pragma once

#include "okdrop/geometry.hpp"

#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace okdrop {

// Square flat torus of side `side`. screening > 0 selects the screened
// kernel (-Lap + k^2) G = delta; screening == 0 selects the mean-zero
// Laplacian kernel -Lap G = delta - 1/side^2.
struct TorusGeometry {
    double side = 1.0;
    double screening = 0.0;

    void validate() const;
    Cell cell() const { return Cell::square(side); }
};

struct SummationControl {
    double alpha = 0.0;          // Gaussian split parameter
    double real_cutoff = 0.0;    // images with |x + R| above this are dropped
    double fourier_cutoff = 0.0; // modes with |k| above this are dropped
    double tolerance = 0.0;
    std::size_t image_count = 0;
    std::size_t mode_count = 0;
};

// G(x) = singular_coefficient * ln|x| + S(x) on the centred fundamental cell.
struct KernelSplit {
    double singular_coefficient = -1.0 / (2.0 * std::numbers::pi);
    double regular_part_at_zero = 0.0;
    // Upper bound on |grad S| over |x| <= lipschitz_radius.
    double lipschitz_bound = 0.0;
    double lipschitz_radius = 0.0;
    SummationControl truncation;
};

// Periodic Green's function on the lattice spanned by `cell`, evaluated by
// Ewald splitting. The real-space image sum carries the logarithmic
// singularity through E_1; the Fourier sum is Gaussian-damped.
class PeriodicGreen {
  public:
    struct Mode {
        Vec2 k;
        double spectral = 0.0; // full coefficient 1 / (A (|k|^2 + kappa^2))
        double damped = 0.0;   // spectral * exp(-(|k|^2 + kappa^2) / (4 alpha^2)); doubled for k != 0
    };

    PeriodicGreen(const Cell &cell, double screening, double tolerance = 1e-10);
    explicit PeriodicGreen(const TorusGeometry &geom, double tolerance = 1e-10)
        : PeriodicGreen(geom.cell(), geom.screening, tolerance) {}

    const Cell &cell() const { return cell_; }
    double screening() const { return kappa_; }

    double value(Vec2 x) const;
    Vec2 gradient(Vec2 x) const;
    // S(x) = G(x) + ln|x| / (2 pi) for x reduced to the centred cell;
    // continuous at x = 0.
    double regular_part(Vec2 x) const;
    double regular_part_at_zero() const { return s0_; }
    // G and grad G in one pass over the images and modes.
    std::pair<double, Vec2> value_and_gradient(Vec2 x) const;
    // S and grad S in one pass.
    std::pair<double, Vec2> regular_value_and_gradient(Vec2 x) const;
    // grad S(x) for x reduced to the centred cell; zero at x = 0.
    Vec2 regular_gradient(Vec2 x) const;
    // G(z) + ln|z| / (2 pi) for an unreduced z with |z| below the lattice
    // minimum; smooth in z and equal to regular_part near 0.
    double regular_part_near(Vec2 z) const;
    // Radius of the largest disk about 0 inside the centred cell.
    double inradius() const { return inradius_; }

    KernelSplit split() const;
    std::span<const Mode> modes() const { return modes_; }

  private:
    Vec2 reduce_checked(Vec2 x) const;
    double image_value(double z) const;
    double near_image_regular(double z) const;
    double fourier_value(Vec2 x) const;

    Cell cell_;
    double kappa_;
    double tol_;
    double alpha_, t_split_, q_, z_cut_;
    int nterms_;
    std::vector<double> series_coef_; // (-q)^n / n!
    std::vector<Vec2> images_;
    std::vector<Mode> modes_;
    double constant_ = 0.0; // -T/A for the mean-zero kernel
    double s0_ = 0.0;
    double inradius_ = 0.0;

    std::pair<double, Vec2> both(Vec2 r, bool regular) const;
};

double green_eval(const TorusGeometry &geom, Vec2 x);
double green_regular_part(const TorusGeometry &geom, Vec2 x);
Vec2 green_grad(const TorusGeometry &geom, Vec2 x);

} // namespace okdrop
