#pragma once

#include "okdrop/okenergy.hpp"
#include "okdrop/renorm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace okdrop {

struct DescentOptions {
    int max_iters = 2000;
    double step = 0.5;        // initial trial step
    double backtracking = 0.5; // step shrink factor
    double armijo = 1e-4;
    double grad_tol = 1e-6; // near the noise floor of the kernel gradient at tol 1e-10
    std::uint64_t seed = 42; // random starts only; the descent itself is deterministic

    void validate() const;
};

// Per-point gradient of W for a neutral point configuration.
std::vector<Vec2> w_gradient(const PointConfig &config);

struct DescentResult {
    PointConfig config;
    WEstimate w;
    std::vector<double> trace; // W after each accepted step, trace[0] the start
    int iterations = 0;
    double grad_norm = 0.0;
    bool converged = false;
    std::string diagnostic; // set when the line search fails
};

DescentResult minimize_points(const PointConfig &start, const DescentOptions &opts = {});

// n uniform random points in the cell; background set by neutrality.
PointConfig random_points(const Cell &cell, std::size_t n, std::uint64_t seed);

struct RestartSummary {
    std::vector<DescentResult> runs;
    std::vector<bool> reached; // |W - target| <= tol
    int successes = 0;
};

// Descents from `count` random starts seeded opts.seed, opts.seed + 1, ...
RestartSummary multistart(const Cell &cell, std::size_t n, int count, double w_target, double tol,
                          const DescentOptions &opts = {});

// Upper-bound test configuration: a density-one pattern in the square [0, 2R)^2
// with R^2 in 2 pi N, rescaled to density m and tiled over the blown-up torus.
struct TestConfigSpec {
    double R = 0.0;
    ModelParams params;
    PointConfig pattern;

    void validate() const;
};

// Cell of side 2R holding a near-triangular pattern of rows x cols points
// (rows even); rows * cols must equal 2R^2 / pi.
PointConfig triangular_pattern(double R, int cols, int rows);
PointConfig square_pattern(double R);

struct TestTiling {
    long tiles_per_side = 0; // k
    double m = 0.0;          // m_{eps,R}
    double droplet_count = 0.0; // (1/2pi) m |ell_eps|^2
};

TestTiling test_tiling(const TestConfigSpec &spec);
// The full tiled configuration on the torus of side ell.
DropletConfig build_test_config(const TestConfigSpec &spec);
// One tile: the same pattern on the torus of side ell / k. It is k-periodic in
// each direction, so intensive energies agree with the full configuration.
DropletConfig build_test_tile(const TestConfigSpec &spec);

struct UpperBoundPoint {
    double epsilon = 0.0;
    double f_eps = 0.0;
    double m = 0.0;
    long tiles_per_side = 0;
    double interior = 0.0;       // field energy in B(a, r')
    double interior_limit = 0.0; // 3^{4/3} pi / 8
    double interior_exact = 0.0; // pi rbar^4 / 8
    double annulus = 0.0;        // field energy in B(a, eta) \ B(a, r')
    double annulus_bound = 0.0;  // (pi/2) rbar^4 ln(eta / rho)
};

struct UpperBoundReport {
    std::vector<UpperBoundPoint> points;
    double w_target = 0.0;
    double target = 0.0; // 3^{4/3} W_m + 3^{2/3}(delta_bar - delta_c)/8
    double final_gap = 0.0;   // F at the last epsilon minus target
    bool decreasing_in_eps = false; // F strictly larger at each smaller epsilon
    bool gap_shrinking = false;     // |F - target| strictly smaller at each smaller epsilon
};

struct UpperBoundOptions {
    std::vector<double> epsilons{1e-4, 1e-6, 1e-8};
    double eta = 0.25;
    bool per_ball = true;
    int angular_nodes = 48;
    int radial_order = 12;
};

// w_target is W at unit density for the pattern (e.g. the triangular value).
UpperBoundReport upper_bound_energy(const TestConfigSpec &spec, double w_target,
                                    const UpperBoundOptions &opts = {});

} // namespace okdrop
