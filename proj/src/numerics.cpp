#include "okdrop/numerics.hpp"

#include "okdrop/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <array>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace okdrop {

namespace {

QuadratureRule build_gauss_legendre(int n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // Recompute derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

} // namespace

const QuadratureRule &gauss_legendre(int n) {
    if (n < 1)
        throw DomainError("gauss_legendre: n must be positive");
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)> &f, double a, double b, int n, int panels) {
    const auto &rule = gauss_legendre(n);
    const double h = (b - a) / panels;
    CompensatedSum sum;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        for (int i = 0; i < n; ++i)
            sum += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    return 0.5 * h * sum.value();
}

double expint_e1_plus_log(double z) {
    constexpr double euler = 0.57721566490153286061;
    if (z < 0.0)
        throw DomainError("expint: negative argument");
    if (z <= 1.0) {
        // E1(z) + ln z = -gamma + sum_{k>=1} (-1)^{k+1} z^k / (k k!)
        double term = 1.0, sum = 0.0;
        for (int k = 1; k < 60; ++k) {
            term *= -z / k;
            const double t = -term / k;
            sum += t;
            if (std::abs(t) < 1e-18 * std::max(1.0, std::abs(sum)))
                break;
        }
        return -euler + sum;
    }
    return expint_e1(z) + std::log(z);
}

double expint_e1(double z) {
    if (!(z > 0.0))
        throw DomainError("expint_e1: argument must be positive");
    if (z <= 1.0)
        return expint_e1_plus_log(z) - std::log(z);
    // Continued fraction (modified Lentz).
    constexpr double tiny = 1e-300;
    double b = z + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h * std::exp(-z);
    }
    throw ConvergenceError("expint_e1: continued fraction did not converge");
}

void expint_en_table(double z, std::span<double> out) {
    if (out.empty())
        return;
    if (z < 0.0)
        throw DomainError("expint: negative argument");
    const double ez = std::exp(-z);
    if (z == 0.0) {
        out[0] = std::numeric_limits<double>::infinity();
        for (std::size_t n = 1; n < out.size(); ++n)
            out[n] = 1.0 / static_cast<double>(n);
        return;
    }
    out[0] = expint_e1(z);
    // E_{n+1} = (e^{-z} - z E_n) / n. Error growth per step is z/n; the
    // callers weight high orders by q^n/n! with q <= 1/4.
    for (std::size_t n = 1; n < out.size(); ++n)
        out[n] = (ez - z * out[n - 1]) / static_cast<double>(n);
}

MinimizeResult2 nelder_mead2(const std::function<double(double, double)> &f, double x0, double y0,
                             double step, double ftol, int max_iter) {
    struct P {
        double x, y, v;
    };
    std::array<P, 3> s{P{x0, y0, f(x0, y0)}, P{x0 + step, y0, f(x0 + step, y0)},
                       P{x0, y0 + step, f(x0, y0 + step)}};
    MinimizeResult2 res;
    for (int it = 0; it < max_iter; ++it) {
        std::sort(s.begin(), s.end(), [](const P &a, const P &b) { return a.v < b.v; });
        res.iterations = it;
        const double spread = std::abs(s[2].v - s[0].v);
        const double size = std::max(std::hypot(s[1].x - s[0].x, s[1].y - s[0].y),
                                     std::hypot(s[2].x - s[0].x, s[2].y - s[0].y));
        if (spread <= ftol && size < 1e-10 + 1e-6 * step) {
            res.converged = true;
            break;
        }
        if (size < 1e-14 * std::max(1.0, std::hypot(s[0].x, s[0].y))) {
            res.converged = spread <= ftol;
            break;
        }
        const double cx = 0.5 * (s[0].x + s[1].x), cy = 0.5 * (s[0].y + s[1].y);
        const double rx = cx + (cx - s[2].x), ry = cy + (cy - s[2].y);
        const double rv = f(rx, ry);
        if (rv < s[0].v) {
            const double ex = cx + 2.0 * (cx - s[2].x), ey = cy + 2.0 * (cy - s[2].y);
            const double ev = f(ex, ey);
            s[2] = ev < rv ? P{ex, ey, ev} : P{rx, ry, rv};
        } else if (rv < s[1].v) {
            s[2] = P{rx, ry, rv};
        } else {
            const bool outside = rv < s[2].v;
            const double kx = outside ? cx + 0.5 * (rx - cx) : cx + 0.5 * (s[2].x - cx);
            const double ky = outside ? cy + 0.5 * (ry - cy) : cy + 0.5 * (s[2].y - cy);
            const double kv = f(kx, ky);
            if (kv < std::min(rv, s[2].v)) {
                s[2] = P{kx, ky, kv};
            } else {
                for (int i = 1; i < 3; ++i) {
                    s[i].x = s[0].x + 0.5 * (s[i].x - s[0].x);
                    s[i].y = s[0].y + 0.5 * (s[i].y - s[0].y);
                    s[i].v = f(s[i].x, s[i].y);
                }
            }
        }
    }
    std::sort(s.begin(), s.end(), [](const P &a, const P &b) { return a.v < b.v; });
    res.x = s[0].x;
    res.y = s[0].y;
    res.value = s[0].v;
    return res;
}

double golden_section_min(const std::function<double(double)> &f, double a, double b, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (std::abs(b - a) > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

namespace {
std::atomic<int> g_threads{0};
constexpr std::size_t chunk_size = 64;

void run_chunks(std::size_t nchunks, const std::function<void(std::size_t)> &chunk) {
    const int want = thread_count();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(want), nchunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c)
            chunk(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= nchunks)
                    return;
                try {
                    chunk(c);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next.store(nchunks);
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}
} // namespace

void set_thread_count(int n) { g_threads.store(std::max(0, n)); }

int thread_count() {
    const int n = g_threads.load();
    if (n > 0)
        return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)> &term) {
    const std::size_t nchunks = (n + chunk_size - 1) / chunk_size;
    std::vector<double> partial(nchunks, 0.0);
    run_chunks(nchunks, [&](std::size_t c) {
        CompensatedSum s;
        const std::size_t end = std::min(n, (c + 1) * chunk_size);
        for (std::size_t i = c * chunk_size; i < end; ++i)
            s += term(i);
        partial[c] = s.value();
    });
    CompensatedSum total;
    for (double v : partial)
        total += v;
    return total.value();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body) {
    run_chunks(n, body);
}

} // namespace okdrop
