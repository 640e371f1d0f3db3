#pragma once

#include "okdrop/geometry.hpp"
#include "okdrop/okenergy.hpp"

#include <functional>
#include <string>
#include <vector>

namespace okdrop {

// Balls live in blown-up coordinates on the torus of side ell sqrt|ln eps|.
struct Ball {
    Vec2 center;
    double radius = 0.0;
    std::vector<std::size_t> covered; // droplet indices
};

enum class BallStage { initial, merged, grown };
std::string to_string(BallStage s);

struct BallCollection {
    std::vector<Ball> balls;
    double total_radius = 0.0;
    BallStage stage = BallStage::initial;
    double grown_to = 0.0; // target radius for the grown stage
    double side = 0.0;     // torus side

    Cell cell() const { return Cell::square(side); }
    // Closed balls i, j intersect (minimal-image distance <= r_i + r_j).
    bool intersect(std::size_t i, std::size_t j) const;
};

// Blown-up droplets of a configuration: centers and shapes scaled by sqrt|ln eps|.
std::vector<Droplet> blown_up_droplets(const DropletConfig &config);

// One ball per droplet with A_i >= beta: its smallest enclosing circle.
BallCollection initial_cover(const DropletConfig &config, double beta);
BallCollection merge_to_disjoint(const BallCollection &coll);
// Default r0 = min(1, side/100)/4.
double default_r0(double side);
BallCollection grow(const BallCollection &coll, double target_r, double r0 = -1.0);

double lower_bound_ball(const Ball &ball, double r, double r_B0, const std::vector<double> &charges, double c);

struct LipschitzWeight {
    std::function<double(Vec2)> chi; // non-negative weight in blown-up coordinates
    double lipschitz = 0.0;          // bound on |grad chi|
};

struct WeightedBound {
    double value = 0.0;   // sum_i chi_i * per-droplet bound - deficit
    double clipped = 0.0; // max(value, 0)
    double deficit = 0.0; // C |grad chi| sum A~^2
    std::vector<double> chi_values;
};

// `droplets` are the blown-up droplets covered by the ball, `charges` their A~.
WeightedBound weighted_lower_bound(const Ball &ball, const LipschitzWeight &chi, double r, double r_B0,
                                   const std::vector<Droplet> &droplets, const std::vector<double> &charges,
                                   double c, double C = 1.0);

struct BallVerifyOptions {
    double c = -1.0;    // negative: kappa^4
    double beta = -1.0; // negative: model beta
    double r0 = -1.0;   // negative: default_r0
    int angular_nodes = 32;
    int radial_order = 8;
    int smooth_order = 2; // regular-part rule inside non-disk droplets
};

struct BallReport {
    Ball ball;
    double lhs = 0.0;
    double bound = 0.0;
    double gap = 0.0;
    double log_prediction = 0.0; // (1/2pi) sum A~^2 ln(r / r_B0)
    bool violation = false;
};

struct VerifyReport {
    double r = 0.0;
    double r_B0 = 0.0;
    double c = 0.0;
    BallCollection collection;
    std::vector<BallReport> balls;
    int violations = 0;
};

VerifyReport verify_lower_bound(const DropletConfig &config, double r, const BallVerifyOptions &opts = {});

} // namespace okdrop
