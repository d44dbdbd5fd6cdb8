#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsmtune/cost_model.hpp"
#include "lsmtune/minimize.hpp"
#include "lsmtune/nominal_tuner.hpp"
#include "lsmtune/types.hpp"
#include "lsmtune/workloads.hpp"

namespace lsmtune {

// Numerical floor for the KL-constraint multiplier; below it the dual term is
// replaced by its pointwise-max limit.
inline constexpr double kLambdaMin = 1e-6;

struct DualVars {
    double lambda = kLambdaMin;
    double eta = 0.0;
};

// Convex conjugate of t*ln(t) - t + 1: exp(s) - 1. Exponents past 700 would
// overflow and are reported as +inf.
inline double kl_conjugate(double s) {
    if (s > 700.0) return std::numeric_limits<double>::infinity();
    return std::expm1(s);
}

// Lagrangian dual of the inner worst-case maximization:
//   g(lambda, eta) = eta + rho*lambda + lambda * sum_i w_i * (e^((c_i - eta)/lambda) - 1)
// Non-finite when an exponent overflows; minimizers treat that as +inf.
inline double dual_objective(const CostVector& cvec, const Workload& wkl, double rho,
                             const DualVars& dv) {
    wkl.validate();
    if (!(dv.lambda >= kLambdaMin)) throw std::invalid_argument("lambda below numerical floor");
    if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
    auto c = cvec.as_array();
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (wkl[i] == 0.0) continue;
        double conj = kl_conjugate((c[i] - dv.eta) / dv.lambda);
        if (!std::isfinite(conj)) return std::numeric_limits<double>::infinity();
        s += wkl[i] * conj;
    }
    return dv.eta + rho * dv.lambda + dv.lambda * s;
}

struct WorstCase {
    double value = 0.0;
    Workload argmax;
    DualVars dual;
};

namespace detail {

// eta eliminated analytically: min_eta g(lambda, eta) = rho*lambda +
// lambda * ln(sum_i w_i e^(c_i/lambda)), evaluated in log-sum-exp form.
inline double dual_profile(const std::array<double, 4>& c, const Workload& w, double rho,
                           double lambda, double cmax) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (w[i] == 0.0) continue;
        s += w[i] * std::exp((c[i] - cmax) / lambda);
    }
    return rho * lambda + cmax + lambda * std::log(s);
}

inline Workload tilt_toward_costly(const std::array<double, 4>& c, const Workload& w,
                                   double lambda, double cmax) {
    Workload out;
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = w[i] == 0.0 ? 0.0 : w[i] * std::exp((c[i] - cmax) / lambda);
        total += out[i];
    }
    for (std::size_t i = 0; i < 4; ++i) out[i] /= total;
    return out;
}

} // namespace detail

// Value and maximizer of   max { what . c  :  what >= 0, sum = 1,
// KL(what, w) <= rho }  via the one-dimensional dual profile in lambda. The
// maximizer is recovered from the optimal multiplier as what_i proportional to
// w_i * e^(c_i / lambda).
inline WorstCase worst_case_cost(const CostVector& cvec, const Workload& wkl, double rho) {
    wkl.validate();
    if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
    auto c = cvec.as_array();

    WorstCase out;
    if (rho <= 1e-12) {
        out.value = dot(wkl, cvec);
        out.argmax = wkl;
        out.dual = {std::numeric_limits<double>::infinity(), out.value};
        return out;
    }

    double cmax = -std::numeric_limits<double>::infinity();
    double cmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 4; ++i) {
        if (wkl[i] == 0.0) continue;
        cmax = std::max(cmax, c[i]);
        cmin = std::min(cmin, c[i]);
    }
    if (cmax - cmin <= 1e-15) {
        // Constant costs: every feasible workload has the same value.
        out.value = cmax + rho * kLambdaMin;
        out.argmax = wkl;
        out.dual = {kLambdaMin, cmax};
        return out;
    }

    auto h = [&](double lambda) { return detail::dual_profile(c, wkl, rho, lambda, cmax); };

    // Bracket the minimizer, expanding while the profile still decreases.
    double hi = std::max(1.0, cmax - cmin);
    while (hi < 1e9 && h(hi) > h(hi * 2.0)) hi *= 2.0;
    hi *= 2.0;

    // Minimize over log(lambda) for uniform relative precision.
    auto h_log = [&](double u) { return h(std::exp(u)); };
    auto g = golden_min(h_log, std::log(kLambdaMin), std::log(hi), 1e-12, 300);
    double lambda = std::exp(g.x);

    out.value = g.value;
    out.argmax = detail::tilt_toward_costly(c, wkl, lambda, cmax);
    out.dual.lambda = lambda;
    out.dual.eta = out.value - rho * lambda; // eta* = lambda * ln sum w e^(c/lambda)
    return out;
}

// Cross-check path: numeric minimization over (lambda, eta) jointly, with the
// inner eta minimization done by golden section instead of the closed form.
inline WorstCase worst_case_cost_joint(const CostVector& cvec, const Workload& wkl, double rho) {
    wkl.validate();
    auto c = cvec.as_array();
    double cmax = -std::numeric_limits<double>::infinity();
    double cmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 4; ++i) {
        if (wkl[i] == 0.0) continue;
        cmax = std::max(cmax, c[i]);
        cmin = std::min(cmin, c[i]);
    }
    auto inner = [&](double lambda) {
        auto over_eta = [&](double eta) { return dual_objective(cvec, wkl, rho, {lambda, eta}); };
        return golden_min(over_eta, cmin - 1.0, cmax + 1.0, 1e-11, 300).value;
    };
    double hi = std::max(1.0, cmax - cmin);
    while (hi < 1e9 && inner(hi) > inner(hi * 2.0)) hi *= 2.0;
    hi *= 2.0;
    auto h_log = [&](double u) { return inner(std::exp(u)); };
    auto g = golden_min(h_log, std::log(kLambdaMin), std::log(hi), 1e-10, 200);
    double lambda = std::exp(g.x);
    WorstCase out;
    out.value = g.value;
    out.argmax = detail::tilt_toward_costly(c, wkl, lambda, cmax);
    out.dual.lambda = lambda;
    out.dual.eta = out.value - rho * lambda;
    return out;
}

struct RobustResult {
    Tuning tuning;
    double rho = 0.0;
    double objective = 0.0; // worst-case expected I/Os per query
    DualVars dual;
    Workload worst_workload;
    SolverDiagnostics diagnostics;
};

// Minimize the worst-case cost over the KL uncertainty region around `wkl`.
// Same multi-start and grid-verification contract as the nominal tuner, with
// the grid evaluating the full worst-case objective at every cell.
inline RobustResult tune_robust(const SystemParams& sys, const Workload& wkl, double rho) {
    wkl.validate();
    if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
    auto result = tune_over(sys, [&](Policy pi, double t, double mf) {
        return worst_case_cost(cost_vector(sys, Tuning{t, mf, pi}), wkl, rho).value;
    });

    auto wc = worst_case_cost(cost_vector(sys, result.tuning), wkl, rho);
    RobustResult rr;
    rr.tuning = result.tuning;
    rr.rho = rho;
    rr.objective = wc.value;
    rr.dual = wc.dual;
    rr.worst_workload = wc.argmax;
    rr.diagnostics = result.diagnostics;
    return rr;
}

} // namespace lsmtune
