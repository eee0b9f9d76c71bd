#include "becsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace becsim::num {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double tol,
             int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    // Stop on the Richardson estimate, on hitting the roundoff floor of the
    // panel sums, or when the panel is no longer resolvable in double. The
    // absolute budget tol is fixed across levels; halving it per split
    // drives boundary layers below the roundoff floor and stalls.
    const bool roundoff =
        std::abs(delta) <= 4e-16 * (std::abs(left) + std::abs(right));
    const bool too_narrow =
        (m - a) <= 1e-13 * (std::abs(a) + std::abs(b) + 1e-300);
    if (depth <= 0 || roundoff || too_narrow ||
        std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    // Magnitude estimate for the absolute budget, from a fixed scan so a
    // coarse Simpson hitting near-zeros cannot starve the refinement.
    double scale = std::abs(whole);
    for (int i = 0; i <= 32; ++i) {
        scale = std::max(scale,
                         std::abs(f(a + (b - a) * i / 32.0)) * std::abs(b - a));
    }
    if (scale == 0.0) return 0.0;
    return adapt(f, a, b, fa, fm, fb, whole, rel_tol * scale, max_depth);
}

double integrate_radial(const std::function<double(double)>& f, double r_max,
                        double rel_tol) {
    // Geometric pre-split: resolves integrands whose features live orders of
    // magnitude below r_max (dimple scale vs reservoir scale).
    std::vector<double> knots;
    knots.push_back(r_max);
    double r = r_max;
    while (r > r_max * 1e-9) {
        r *= 0.25;
        knots.push_back(r);
    }
    knots.push_back(0.0);
    std::sort(knots.begin(), knots.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        total += integrate_adaptive(f, knots[i], knots[i + 1], rel_tol);
    }
    return total;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const RootOptions& opt) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi)) {
        throw NoRoot("find_root: no sign change on the bracket");
    }
    double x = lo;
    for (int it = 0; it < opt.max_iter; ++it) {
        // Alternate secant proposals with plain bisection so the bracket
        // provably halves at least every other iteration; the secant step is
        // rejected when it leaves the bracket interior.
        double xs;
        if (it % 2 == 0) {
            xs = hi - fhi * (hi - lo) / (fhi - flo);
            const double margin = 1e-3 * (hi - lo);
            if (!(xs > lo + margin && xs < hi - margin)) {
                xs = 0.5 * (lo + hi);
            }
        } else {
            xs = 0.5 * (lo + hi);
        }
        x = xs;
        const double fx = f(x);
        if (fx == 0.0) return x;
        if (std::signbit(fx) == std::signbit(flo)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (opt.residual_tol > 0.0 && std::abs(fx) < opt.residual_tol) return x;
        if (hi - lo <= opt.x_rel_tol * (std::abs(lo) + std::abs(hi)) * 0.5) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double x_rel_tol) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > x_rel_tol * (std::abs(a) + std::abs(b) + 1e-300)) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

template <std::size_t N>
OdeResult integrate_rk45(
    const std::function<StateVec<N>(double, const StateVec<N>&)>& rhs,
    StateVec<N>& y, double t0, double t1, const OdeOptions& opt,
    const std::function<void(double, const StateVec<N>&)>& on_step,
    const std::function<double(double, const StateVec<N>&)>& stop,
    const std::function<bool(const StateVec<N>&)>& reject) {
    double t = t0;
    StateVec<N> k1 = rhs(t, y);
    double h = opt.h_init;
    if (h <= 0.0) {
        // Scale to the fastest component rate.
        double rate = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double s = std::abs(y[i]) + opt.abs_tol;
            rate = std::max(rate, std::abs(k1[i]) / s);
        }
        h = rate > 0.0 ? 0.01 / rate : (t1 - t0) / 100.0;
    }
    h = std::min({h, opt.h_max, t1 - t0});

    double stop_prev = stop ? stop(t, y) : -1.0;
    if (stop && stop_prev >= 0.0) return {t, true};

    OdeResult res;
    while (t < t1) {
        h = std::min(h, t1 - t);
        StateVec<N> k2, k3, k4, k5, k6, k7, ynew, yerr;
        auto stage = [&](const std::array<double, 6>& w) {
            StateVec<N> s{};
            for (std::size_t i = 0; i < N; ++i) {
                s[i] = y[i] + h * (w[0] * k1[i] + w[1] * k2[i] + w[2] * k3[i] +
                                   w[3] * k4[i] + w[4] * k5[i] + w[5] * k6[i]);
            }
            return s;
        };
        k2 = rhs(t + c2 * h, stage({a21, 0, 0, 0, 0, 0}));
        k3 = rhs(t + c3 * h, stage({a31, a32, 0, 0, 0, 0}));
        k4 = rhs(t + c4 * h, stage({a41, a42, a43, 0, 0, 0}));
        k5 = rhs(t + c5 * h, stage({a51, a52, a53, a54, 0, 0}));
        k6 = rhs(t + h, stage({a61, a62, a63, a64, a65, 0}));
        ynew = stage({b1, 0, b3, b4, b5, b6});
        k7 = rhs(t + h, ynew);

        bool bad = false;
        for (std::size_t i = 0; i < N; ++i) {
            if (!std::isfinite(ynew[i])) bad = true;
        }
        if (!bad && reject && reject(ynew)) bad = true;

        double err = 0.0;
        if (!bad) {
            for (std::size_t i = 0; i < N; ++i) {
                yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                               e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc =
                    opt.abs_tol +
                    opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                err = std::max(err, std::abs(yerr[i]) / sc);
            }
        }

        if (bad || err > 1.0) {
            if (h <= opt.h_min * (1.0 + std::abs(t))) {
                if (bad) {
                    throw NonPhysical(
                        "integrate_rk45: state left the domain at minimum step");
                }
                throw StepFailure(
                    "integrate_rk45: tolerance unmet at minimum step");
            }
            const double shrink =
                bad ? 0.25 : std::max(0.2, 0.9 * std::pow(err, -0.25));
            h = std::max(h * shrink, opt.h_min * (1.0 + std::abs(t)));
            continue;
        }

        const double t_new = t + h;
        if (stop) {
            const double s_new = stop(t_new, ynew);
            if (s_new >= 0.0 && stop_prev < 0.0) {
                const double frac = stop_prev / (stop_prev - s_new);
                for (std::size_t i = 0; i < N; ++i) {
                    y[i] += frac * (ynew[i] - y[i]);
                }
                t += frac * h;
                if (on_step) on_step(t, y);
                res.t_end = t;
                res.stopped = true;
                return res;
            }
            stop_prev = s_new;
        }

        t = t_new;
        y = ynew;
        k1 = k7;  // FSAL
        if (on_step) on_step(t, y);

        const double grow =
            err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
        h = std::min(h * grow, opt.h_max);
    }
    res.t_end = t;
    return res;
}

template OdeResult integrate_rk45<1>(
    const std::function<StateVec<1>(double, const StateVec<1>&)>&, StateVec<1>&,
    double, double, const OdeOptions&,
    const std::function<void(double, const StateVec<1>&)>&,
    const std::function<double(double, const StateVec<1>&)>&,
    const std::function<bool(const StateVec<1>&)>&);

template OdeResult integrate_rk45<2>(
    const std::function<StateVec<2>(double, const StateVec<2>&)>&, StateVec<2>&,
    double, double, const OdeOptions&,
    const std::function<void(double, const StateVec<2>&)>&,
    const std::function<double(double, const StateVec<2>&)>&,
    const std::function<bool(const StateVec<2>&)>&);

}  // namespace becsim::num
