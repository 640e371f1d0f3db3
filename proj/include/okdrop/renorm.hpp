#pragma once

#include "okdrop/geometry.hpp"

#include <complex>
#include <string>
#include <vector>

namespace okdrop {

// Simple lattice described by the modulus tau = a + ib (b > 0) of its dual,
// at point density m (neutralising background m, charge 2 pi per point).
struct LatticeSpec {
    std::complex<double> tau{0.5, 0.8660254037844386};
    double density = 1.0;

    void validate() const;
};

// n unit charges (2 pi each) per periodic cell against background m, with
// 2 pi n = m |cell|.
struct PointConfig {
    Cell cell;
    std::vector<Vec2> points;
    double background = 1.0;

    // Background fixed by neutrality.
    static PointConfig neutral(const Cell &cell, std::vector<Vec2> points);
    void validate() const;
    std::size_t size() const { return points.size(); }
    // Smallest distance between distinct charges, including periodic images
    // of the same charge.
    double min_separation() const;
};

enum class WMethod { lattice_closed_form, periodic_formula, direct_definition };
std::string to_string(WMethod m);

struct WEstimate {
    double value = 0.0;
    WMethod method = WMethod::lattice_closed_form;
    double error_bar = 0.0;
    // Direct estimator diagnostics.
    std::vector<double> radii;
    std::vector<double> per_radius;
    double eta_slope = 0.0;
};

std::complex<double> dedekind_eta(std::complex<double> tau, int terms = 60);

// Unit-cell representation of the simple lattice: one point at the origin,
// cell area 2 pi / density.
PointConfig lattice_config(const LatticeSpec &spec);

WEstimate w_simple_lattice(const LatticeSpec &spec);
double w_scaling(double w_unit, double m);

// phi(x) = 2 pi sum_j G0(x - a_j), G0 the mean-zero kernel of the cell.
double potential_from_points(const PointConfig &config, Vec2 x);

WEstimate w_periodic_config(const PointConfig &config);

struct DirectOptions {
    // Normalise by the cutoff mass \int chi_R instead of |K_R|. Both have the
    // same R -> infinity limit; the cutoff mass removes the O(1/R) bias.
    bool normalize_by_cutoff_mass = true;
    int gl_order = 8;
    int angular_nodes = 64;
    int panels = 0; // per cell side; 0 selects from the point separation
    double slope_tolerance = 1e-2;
};

// Brute-force estimate of W from its defining limit: quadrature of
// (1/2)|grad phi|^2 chi_R over K_R minus eta-balls plus pi ln(eta) sum chi_R(a),
// extrapolated in eta and averaged over the radii. K_R = [-R, R]^2.
WEstimate w_direct(const PointConfig &config, const std::vector<double> &radii,
                   const std::vector<double> &eta_seq, const DirectOptions &opts = {});

// C^2 ramp profile of the cutoff on [0, 1] and the cutoff chi_R itself.
double cutoff_ramp(double t);
double cutoff_chi(double R, Vec2 x);

} // namespace okdrop
