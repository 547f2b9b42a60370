#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "crackdyn/errors.hpp"

namespace crackdyn {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes via Newton iteration on P_n, weights w = 2 / ((1-x^2) P_n'(x)^2).
// Rules are cached; the cache is guarded so callers may share it across threads.
inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence up to degree n at x.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

// Composite rule over the cells [breaks[i], breaks[i+1]] with `n` points per cell.
template <typename F>
double integrate_cells(const F& f, std::span<const double> breaks, int n) {
    const GaussRule& rule = gauss_legendre(n);
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s], b = breaks[s + 1];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            acc += rule.weights[q] * f(mid + half * rule.nodes[q]);
        total += half * acc;
    }
    return total;
}

// Doubles the per-cell point count (32, 64, ...) until the relative change
// drops below rel_tol. Suits piecewise-analytic integrands with kinks only at
// the cell boundaries.
template <typename F>
double integrate_adaptive(const F& f, std::span<const double> breaks,
                          double rel_tol = 1e-12, int initial_points = 32,
                          int max_points = 1024) {
    double prev = integrate_cells(f, breaks, initial_points);
    for (int n = 2 * initial_points; n <= max_points; n *= 2) {
        double next = integrate_cells(f, breaks, n);
        double scale = std::max(1e-300, std::abs(next));
        if (std::abs(next - prev) <= rel_tol * scale) return next;
        prev = next;
    }
    return prev;
}

} // namespace crackdyn
