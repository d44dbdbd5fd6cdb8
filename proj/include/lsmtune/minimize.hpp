#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>

namespace lsmtune {

struct GoldenResult {
    double x = 0;
    double value = 0;
    int iterations = 0;
};

// Golden-section minimization of a unimodal function on [lo, hi].
template <class F>
GoldenResult golden_min(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int it = 0;
    while (b - a > tol && it < max_iter) {
        // Strict comparison: ties (e.g. a +inf plateau left of the minimum)
        // must drop the left bound, not the right one.
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++it;
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm), it};
}

struct Box2 {
    std::array<double, 2> lo{0, 0};
    std::array<double, 2> hi{1, 1};
};

struct DescentResult {
    std::array<double, 2> x{0, 0};
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

// Projected gradient descent over a 2-D box. Works in box-normalized
// coordinates; gradients come from central differences with step 1e-4 of the
// box width. The line search uses a normalized direction and a relative
// sufficient-decrease test, so scaling the objective by a positive constant
// leaves the iterate path unchanged.
template <class F>
DescentResult projected_descent(F&& f, const Box2& box, std::array<double, 2> start,
                                int max_iter = 200) {
    std::array<double, 2> width{box.hi[0] - box.lo[0], box.hi[1] - box.lo[1]};
    auto clamp01 = [](double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); };
    auto denorm = [&](const std::array<double, 2>& u) {
        return std::array<double, 2>{box.lo[0] + u[0] * width[0], box.lo[1] + u[1] * width[1]};
    };
    auto eval = [&](const std::array<double, 2>& u) {
        auto x = denorm(u);
        return f(x[0], x[1]);
    };

    std::array<double, 2> u{
        width[0] > 0 ? clamp01((start[0] - box.lo[0]) / width[0]) : 0.0,
        width[1] > 0 ? clamp01((start[1] - box.lo[1]) / width[1]) : 0.0};
    // Degenerate axes (zero width) stay pinned.
    bool active0 = width[0] > 0, active1 = width[1] > 0;

    double fu = eval(u);
    const double h = 1e-4;
    int it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
        std::array<double, 2> g{0, 0};
        for (int d = 0; d < 2; ++d) {
            if ((d == 0 && !active0) || (d == 1 && !active1)) continue;
            auto up = u, um = u;
            up[std::size_t(d)] = clamp01(u[std::size_t(d)] + h);
            um[std::size_t(d)] = clamp01(u[std::size_t(d)] - h);
            double span = up[std::size_t(d)] - um[std::size_t(d)];
            g[std::size_t(d)] = span > 0 ? (eval(up) - eval(um)) / span : 0.0;
        }
        double gnorm = std::sqrt(g[0] * g[0] + g[1] * g[1]);
        if (!(gnorm > 0) || !std::isfinite(gnorm)) {
            converged = true;
            break;
        }
        std::array<double, 2> dir{g[0] / gnorm, g[1] / gnorm};
        double step = 0.25;
        bool accepted = false;
        while (step > 1e-12) {
            std::array<double, 2> un{clamp01(u[0] - step * dir[0]), clamp01(u[1] - step * dir[1])};
            double fn = eval(un);
            if (fn <= fu - 1e-4 * step * gnorm) {
                double moved = std::abs(un[0] - u[0]) + std::abs(un[1] - u[1]);
                u = un;
                fu = fn;
                accepted = true;
                if (moved < 1e-10) converged = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            converged = true;
            break;
        }
        if (converged) break;
    }

    DescentResult r;
    r.x = denorm(u);
    r.value = fu;
    r.iterations = it;
    r.converged = converged;
    return r;
}

} // namespace lsmtune
