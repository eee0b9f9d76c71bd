#ifndef BECSIM_NUMERICS_HPP
#define BECSIM_NUMERICS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include "becsim/errors.hpp"

namespace becsim::num {

// Adaptive Simpson quadrature on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, int max_depth = 48);

// Quadrature for radially peaked integrands on [0, r_max]: the interval is
// pre-split on a geometric grid before the adaptive pass so that structure
// near the origin (a tight dimple under a wide reservoir) is resolved.
double integrate_radial(const std::function<double(double)>& f, double r_max,
                        double rel_tol);

struct RootOptions {
    double x_rel_tol = 1e-12;    // stop when the bracket is this tight
    double residual_tol = 0.0;   // optional |f| stopping criterion
    int max_iter = 240;
};

// Bracketing bisection refined by secant steps. Requires f(lo)*f(hi) <= 0,
// otherwise throws NoRoot.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const RootOptions& opt = {});

// Golden-section minimisation on [a, b] to a relative x tolerance.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double x_rel_tol = 1e-9);

// (e^x - 1)/x, accurate near zero.
inline double expm1_over(double x) {
    if (std::abs(x) < 1e-7) return 1.0 + x / 2.0 + x * x / 6.0;
    return std::expm1(x) / x;
}

// (1 - e^-x)/x, accurate near zero and safe for large x.
inline double one_minus_exp_over(double x) {
    if (std::abs(x) < 1e-7) return 1.0 - x / 2.0 + x * x / 6.0;
    return -std::expm1(-x) / x;
}

template <std::size_t N> using StateVec = std::array<double, N>;

struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-30;           // per-component absolute floor
    double h_init = 0.0;              // 0: choose automatically
    double h_min = 1e-14;             // s
    double h_max = std::numeric_limits<double>::infinity();
};

struct OdeResult {
    double t_end = 0.0;     // time actually reached
    bool stopped = false;   // true when the stop event fired
};

// Embedded Dormand-Prince 5(4) pair with standard step-size control.
//
// on_step(t, y) runs after every accepted step. stop(t, y), when provided,
// is an event function: integration terminates at its first upward zero
// crossing, located by linear interpolation inside the crossing step, and
// y/t are set to the interpolated crossing point.
//
// reject(y) (optional) marks a candidate state as out of domain so the
// controller retries with a smaller step; StepFailure/NonPhysical are thrown
// when the minimum step size is reached.
template <std::size_t N>
OdeResult integrate_rk45(
    const std::function<StateVec<N>(double, const StateVec<N>&)>& rhs,
    StateVec<N>& y, double t0, double t1, const OdeOptions& opt,
    const std::function<void(double, const StateVec<N>&)>& on_step = {},
    const std::function<double(double, const StateVec<N>&)>& stop = {},
    const std::function<bool(const StateVec<N>&)>& reject = {});

}  // namespace becsim::num

#endif
