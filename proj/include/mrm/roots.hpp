#pragma once

#include <cmath>
#include <optional>

namespace mrm {

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
};

// Scans [lo, hi] in steps of `step` and returns the first sub-interval on
// which f changes sign (a zero at a scan node counts as a sign change).
template <class F>
std::optional<Bracket> first_sign_change(F&& f, double lo, double hi, double step) {
    double x0 = lo;
    double f0 = f(x0);
    if (f0 == 0.0) return Bracket{x0, x0, f0, f0};
    while (x0 < hi) {
        const double x1 = std::min(hi, x0 + step);
        const double f1 = f(x1);
        if (f1 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) return Bracket{x0, x1, f0, f1};
        x0 = x1;
        f0 = f1;
    }
    return std::nullopt;
}

// Root of f inside a sign-change bracket. Each step tries the secant
// (regula falsi) point and falls back to bisection whenever that point
// would not shrink the bracket by at least half; this keeps the guaranteed
// convergence of bisection with superlinear steps on smooth f.
template <class F>
double solve_bracketed(F&& f, Bracket b, double tol) {
    double lo = b.lo, hi = b.hi, f_lo = b.f_lo, f_hi = b.f_hi;
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    bool bisect_next = false;
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        const double width = hi - lo;
        double x = 0.5 * (lo + hi);
        if (!bisect_next) {
            const double s = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if (s > lo && s < hi) x = s;
        }
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == (f_lo < 0.0)) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        bisect_next = (hi - lo) > 0.5 * width;
    }
    // Secant interpolation across the final bracket.
    if (f_hi != f_lo) {
        const double s = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        if (s >= lo && s <= hi) return s;
    }
    return 0.5 * (lo + hi);
}

}  // namespace mrm
