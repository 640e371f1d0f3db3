#pragma once

#include "okdrop/geometry.hpp"
#include "okdrop/green.hpp"
#include "okdrop/shapes.hpp"

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace okdrop {

struct ModelParams {
    double epsilon = 1e-6;
    double ell = 1.0;
    double kappa = 2.0 / 3.0;
    double delta_bar = 1.0;
    double gamma = 0.1;
    // Constants of the discrepancy functional M_eps.
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    // Smallness guard: epsilon must lie below eps0.
    double eps0 = 0.1;

    void validate() const;

    double log_eps() const; // |ln eps|
    double delta_c() const;
    double rho_eps() const;
    double rbar_eps() const;
    double mu_bar() const;
    double mu_bar_eps() const;
    double beta() const;
    double m_limit() const; // 3^{-2/3}(delta_bar - delta_c)
    double u_bar_eps() const;
    double r_prime_eps() const;
    double ell_eps() const; // blown-up torus side ell sqrt|ln eps|
    double area_scale() const; // A_i / |Omega_i|
    double perimeter_scale() const; // P_i / |dOmega_i|
    double truncation_threshold() const; // 3^{2/3} pi / gamma
};

// Shapes are in physical coordinates on the torus of side ell, relative to the center.
struct Droplet {
    Vec2 center;
    Shape shape;
};

struct DropletConfig {
    ModelParams params;
    std::vector<Droplet> droplets;

    // Shapes valid, droplets small against the torus and pairwise disjoint.
    void validate() const;
};

enum class EnergyLabel { E_eps, Ebar, F_eps, E0, E0_eps };
std::string to_string(EnergyLabel l);

struct EnergyBreakdown {
    double perimeter_term = 0.0;
    double area_term = 0.0;
    double self_interaction = 0.0;
    double pair_interaction = 0.0;
    double background_term = 0.0;
    double total = 0.0;
    EnergyLabel label = EnergyLabel::Ebar;
    std::map<std::string, double> extras;

    double sum_of_parts() const {
        return perimeter_term + area_term + self_interaction + pair_interaction + background_term;
    }
};

double truncated_area(double A, double gamma);
double rescaled_area(const Droplet &d, const ModelParams &p);
double rescaled_perimeter(const Droplet &d, const ModelParams &p);

// Mean of -(1/2pi) ln|x - y| over x, y uniform in a disk of radius rho.
double disk_self_log_average(double rho);
// 2 I_1(t) / t.
double disk_mean_factor(double t);

// Averages of the periodic kernel against uniform droplet charge densities.
class DropletKernel {
  public:
    DropletKernel(double side, double screening, double tol = 1e-10, int smooth_order = 6);

    const PeriodicGreen &green() const { return green_; }

    // Mean over y in the shape (placed at the origin) of G(z - y).
    double potential(const Shape &s, Vec2 z) const;
    Vec2 potential_gradient(const Shape &s, Vec2 z) const;
    std::pair<double, Vec2> potential_and_gradient(const Shape &s, Vec2 z) const;
    // Mean of G(x - y) over x, y in the shape.
    double self_average(const Shape &s) const;
    // Mean of G(d + x - y) for x in a, y in b; d is the center offset of a from b.
    double pair_average(const Shape &a, const Shape &b, Vec2 d) const;

  private:
    double regular_near(Vec2 z) const;
    Vec2 regular_gradient_near(Vec2 z) const;
    double disk_regular_self(double rho) const;

    PeriodicGreen green_;
    int smooth_order_;
};

EnergyBreakdown ebar_energy(const DropletConfig &config);
EnergyBreakdown e_eps_energy(const DropletConfig &config);
EnergyBreakdown f_eps_energy(const DropletConfig &config);
// Composition used by f_eps_energy, exposed for consistency checks.
EnergyBreakdown f_eps_from_ebar(const EnergyBreakdown &ebar, const ModelParams &p);

double leading_order_energy(double mu, const ModelParams &p);
double corrected_leading_energy(double mu, const ModelParams &p);
EnergyBreakdown leading_order_breakdown(double mu, const ModelParams &p, bool corrected);

struct CorrectedMinimum {
    double mu_bar_eps = 0.0;
    double min_value = 0.0;
};
CorrectedMinimum min_corrected(const ModelParams &p);

// Three-term expansion of ell^{-2} min E^eps; w_min is the minimal W at density m.
struct ExpansionTerms {
    double leading = 0.0;
    double log_correction = 0.0; // enters with its sign
    double renormalized = 0.0;
    double total = 0.0;
};
ExpansionTerms expansion_min_energy(const ModelParams &p, double w_min);

struct MEpsBreakdown {
    double isoperimetric = 0.0;
    double large = 0.0;
    double mid = 0.0;
    double small = 0.0;
    double total = 0.0;
};
MEpsBreakdown m_eps(const DropletConfig &config);

// Blown-up potential h' on the torus of side ell sqrt|ln eps| with screening
// kappa / sqrt|ln eps|.
class HField {
  public:
    // smooth_order sets the rule for the regular part of the droplet averages.
    explicit HField(const DropletConfig &config, double tol = 1e-10, int smooth_order = 6);

    double value(Vec2 xp) const;
    Vec2 gradient(Vec2 xp) const;
    std::pair<double, Vec2> value_and_gradient(Vec2 xp) const;

    double side() const { return side_; }
    double screening() const { return screening_; }
    double background() const { return background_; }
    const std::vector<Droplet> &droplets() const { return droplets_; }
    const std::vector<double> &charges() const { return charges_; }
    const DropletKernel &kernel() const { return *kernel_; }

    // Integral of |grad h|^2 + mass_weight h^2 over r_in <= |x - c| <= r_out;
    // `breaks` are extra radii where the radial rule is split.
    double annulus_energy(Vec2 c, double r_in, double r_out, double mass_weight = 0.0,
                          const std::vector<double> &breaks = {}, int angular_nodes = 64,
                          int radial_order = 12) const;

  private:
    std::unique_ptr<DropletKernel> kernel_;
    std::vector<Droplet> droplets_;
    std::vector<double> charges_;
    double side_ = 0.0;
    double screening_ = 0.0;
    double background_ = 0.0;
};

double h_field(const DropletConfig &config, Vec2 xp);
Vec2 h_field_gradient(const DropletConfig &config, Vec2 xp);

} // namespace okdrop
