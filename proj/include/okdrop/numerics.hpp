#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace okdrop {

// Neumaier-compensated accumulator. Summation order is the call order, so
// results are reproducible for a fixed traversal.
class CompensatedSum {
  public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    CompensatedSum &operator+=(double v) {
        add(v);
        return *this;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1]. Cached per n.
const QuadratureRule &gauss_legendre(int n);

// Integrate f over [a, b] with `panels` equal panels of an n-point rule.
double integrate_gl(const std::function<double(double)> &f, double a, double b, int n, int panels = 1);

// Exponential integral E1(z), z > 0.
double expint_e1(double z);

// E1(z) + ln z, finite at z = 0 where it equals -gamma.
double expint_e1_plus_log(double z);

// Generalised exponential integrals E_1(z) .. E_nmax(z) for z >= 0
// (E_1(0) is +inf). Written into out[0..nmax-1].
void expint_en_table(double z, std::span<double> out);

// Nelder-Mead minimisation in two variables.
struct MinimizeResult2 {
    double x = 0.0, y = 0.0, value = 0.0;
    int iterations = 0;
    bool converged = false;
};
MinimizeResult2 nelder_mead2(const std::function<double(double, double)> &f, double x0, double y0,
                             double step, double ftol, int max_iter = 2000);

// Minimise a unimodal function on [a, b] by golden-section search.
double golden_section_min(const std::function<double(double)> &f, double a, double b, double tol);

} // namespace okdrop

namespace okdrop {

// Worker-thread budget for internal loops. 0 selects hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Sum of term(i) for i in [0, n). Terms are grouped into fixed-size chunks
// and chunk totals are added in index order, so the result does not depend
// on the thread count.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)> &term);

// Run body(i) for i in [0, n); body must only write to slot i of its output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace okdrop
