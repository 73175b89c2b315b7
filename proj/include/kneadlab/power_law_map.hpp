#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kneadlab/errors.hpp"

namespace kneadlab {

// |x|^p, evaluated as exp(p log|x|) so integer and non-integer exponents go
// through the same code path.  x = 0 is an exact special case.
inline double abs_pow(double x, double p) {
    if (x == 0.0) return 0.0;
    return std::exp(p * std::log(std::fabs(x)));
}

// The family f_a(x) = a - |x|^r.  Critical point is always x = 0, critical
// value f_a(0) = a.
struct PowerLawMap {
    double a;
    double r;

    PowerLawMap(double a_, double r_) : a(a_), r(r_) {
        if (!(r > 1.0)) throw std::invalid_argument("PowerLawMap: requires r > 1");
        if (!(a > 0.0)) throw std::invalid_argument("PowerLawMap: requires a > 0");
    }
};

// Largest a for which f_a maps its core interval into itself: a^{r-1} = 2.
inline double a_full(double r) {
    return std::pow(2.0, 1.0 / (r - 1.0));
}

inline bool in_self_map_window(const PowerLawMap& map) {
    // a few ulps of slack so that a grid endpoint computed as a_full(r)
    // elsewhere is accepted
    return map.a <= a_full(map.r) * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
}

inline double eval(const PowerLawMap& map, double x) {
    return map.a - abs_pow(x, map.r);
}

// f'(x) = -r sgn(x) |x|^{r-1}, and f'(0) = 0.
inline double phase_derivative(const PowerLawMap& map, double x) {
    if (x == 0.0) return 0.0;
    double mag = map.r * abs_pow(x, map.r - 1.0);
    return x > 0.0 ? -mag : mag;
}

// Any |w| beyond this is permanently escaping for every valid parameter.
inline double escape_bound(const PowerLawMap& map) {
    return 4.0 * std::max(map.a, 1.0) + 1.0;
}

// Forward critical orbit w_i = f_a^i(0) together with the parameter
// derivatives D_i = d/da f_a^i(0), via D_1 = 1, D_{i+1} = 1 + f'(w_i) D_i.
struct OrbitBuffer {
    std::vector<double> values;        // w_1 .. w_n
    std::vector<double> param_derivs;  // D_1 .. D_n, empty unless requested

    int depth() const { return static_cast<int>(values.size()); }
};

inline OrbitBuffer critical_orbit(const PowerLawMap& map, int n, bool with_derivs = false) {
    if (n < 1) throw std::invalid_argument("critical_orbit: n >= 1 required");
    OrbitBuffer orbit;
    orbit.values.reserve(static_cast<std::size_t>(n));
    if (with_derivs) orbit.param_derivs.reserve(static_cast<std::size_t>(n));

    const double bound = escape_bound(map);
    double w = map.a;
    double d = 1.0;
    for (int i = 1; i <= n; ++i) {
        if (i > 1) {
            if (with_derivs) d = 1.0 + phase_derivative(map, w) * d;
            w = eval(map, w);
        }
        if (std::fabs(w) > bound) throw OrbitEscaped(i, std::fabs(w));
        orbit.values.push_back(w);
        if (with_derivs) orbit.param_derivs.push_back(d);
    }
    return orbit;
}

// Product of phase derivatives along the orbit held as sign + log magnitude,
// so that long products neither overflow nor underflow.
struct SignedLogProduct {
    int sign = 1;                 // -1, 0, +1
    double log_magnitude = 0.0;   // -inf iff sign == 0

    static SignedLogProduct one() { return {}; }

    void multiply(double factor) {
        if (sign == 0) return;
        if (factor == 0.0) {
            sign = 0;
            log_magnitude = -std::numeric_limits<double>::infinity();
            return;
        }
        if (factor < 0.0) sign = -sign;
        log_magnitude += std::log(std::fabs(factor));
    }

    double value() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_magnitude);
    }
};

// Df^{n-1}(f(0)) = prod_{j=1}^{n-1} f'(w_j).  n = 1 is the empty product.
inline SignedLogProduct orbit_derivative_product(const PowerLawMap& map, int n) {
    if (n < 1) throw std::invalid_argument("orbit_derivative_product: n >= 1 required");
    SignedLogProduct prod = SignedLogProduct::one();
    if (n == 1) return prod;
    OrbitBuffer orbit = critical_orbit(map, n - 1);
    for (double w : orbit.values) prod.multiply(phase_derivative(map, w));
    return prod;
}

struct Interval {
    double lo;
    double hi;
};

// Minimal invariant interval [f(a), a] = [a - a^r, a]; a self-map exactly
// when a <= a_full(r).
inline Interval core_interval(const PowerLawMap& map) {
    if (!in_self_map_window(map)) throw NotSelfMap(map.a, a_full(map.r));
    return {map.a - abs_pow(map.a, map.r), map.a};
}

}  // namespace kneadlab
