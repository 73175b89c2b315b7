#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kneadlab/power_law_map.hpp"

namespace kneadlab {

enum class Symbol : char { L = 'L', C = 'C', R = 'R' };

inline char to_char(Symbol s) { return static_cast<char>(s); }

// Finite itinerary of the critical value over {L, C, R}.  C may only appear
// as the final symbol; it marks an (approximate) return to the critical point.
struct KneadingWord {
    std::vector<Symbol> symbols;

    int length() const { return static_cast<int>(symbols.size()); }

    bool terminated_at_c() const {
        return !symbols.empty() && symbols.back() == Symbol::C;
    }

    std::string str() const {
        std::string s;
        s.reserve(symbols.size());
        for (Symbol sym : symbols) s.push_back(to_char(sym));
        return s;
    }

    // Word without a trailing C (the sign-determined part).
    KneadingWord prefix() const {
        KneadingWord p{symbols};
        if (p.terminated_at_c()) p.symbols.pop_back();
        return p;
    }

    static KneadingWord parse(const std::string& s) {
        KneadingWord w;
        for (std::size_t i = 0; i < s.size(); ++i) {
            switch (s[i]) {
                case 'L': w.symbols.push_back(Symbol::L); break;
                case 'R': w.symbols.push_back(Symbol::R); break;
                case 'C':
                    if (i + 1 != s.size())
                        throw std::invalid_argument("KneadingWord: interior C in \"" + s + "\"");
                    w.symbols.push_back(Symbol::C);
                    break;
                default:
                    throw std::invalid_argument("KneadingWord: bad symbol in \"" + s + "\"");
            }
        }
        if (w.symbols.empty()) throw std::invalid_argument("KneadingWord: empty word");
        return w;
    }

    bool operator==(const KneadingWord& other) const { return symbols == other.symbols; }
    bool operator!=(const KneadingWord& other) const { return !(*this == other); }
};

namespace detail {

// Itinerary that never throws: classifies orbit points until depth n, a C hit,
// or escape.  Used by sweeps, which record failures as flags.
struct ItineraryResult {
    KneadingWord word;
    bool escaped = false;
    double min_abs_w = std::numeric_limits<double>::infinity();
};

inline ItineraryResult itinerary_prefix(const PowerLawMap& map, int n, double c_tol) {
    ItineraryResult result;
    const double bound = escape_bound(map);
    double w = map.a;
    for (int i = 1; i <= n; ++i) {
        if (i > 1) w = eval(map, w);
        if (std::fabs(w) > bound) {
            result.escaped = true;
            return result;
        }
        result.min_abs_w = std::min(result.min_abs_w, std::fabs(w));
        if (std::fabs(w) <= c_tol) {
            result.word.symbols.push_back(Symbol::C);
            return result;
        }
        result.word.symbols.push_back(w < 0.0 ? Symbol::L : Symbol::R);
    }
    return result;
}

}  // namespace detail

// e_i = L if w_i < -c_tol, R if w_i > c_tol, C if |w_i| <= c_tol; the word is
// truncated at the first C.
inline KneadingWord itinerary(const PowerLawMap& map, int n, double c_tol = 0.0) {
    if (n < 1) throw std::invalid_argument("itinerary: n >= 1 required");
    detail::ItineraryResult res = detail::itinerary_prefix(map, n, c_tol);
    if (res.escaped) throw OrbitEscaped(res.word.length() + 1, escape_bound(map));
    return res.word;
}

enum class Ordering { Less, Equal, Greater };

// Signed lexicographic (Sharkovskii) order.  At the first differing position
// the symbol order is L < C < R if the preceding prefix contains an even
// number of orientation-reversing symbols, and R < C < L if odd.  For this
// family f' < 0 exactly on x > 0, so the reversing symbol is R.
// A C-free common prefix compares Equal: truncated words carry no further
// information.
inline Ordering signed_lex_compare(const KneadingWord& u, const KneadingWord& v) {
    const int n = std::min(u.length(), v.length());
    bool reversed = false;
    for (int k = 0; k < n; ++k) {
        Symbol a = u.symbols[static_cast<std::size_t>(k)];
        Symbol b = v.symbols[static_cast<std::size_t>(k)];
        if (a != b) {
            auto rank = [reversed](Symbol s) {
                int base = (s == Symbol::L) ? 0 : (s == Symbol::C) ? 1 : 2;
                return reversed ? 2 - base : base;
            };
            return rank(a) < rank(b) ? Ordering::Less : Ordering::Greater;
        }
        if (a == Symbol::R) reversed = !reversed;
    }
    return Ordering::Equal;
}

// Coefficients (eps_1, .., eps_N) of D(t) = 1 + sum eps_n t^n, with the
// leading 1 implicit.  Once a C zeroes the running product all later
// coefficients stay 0.
struct KneadingSeries {
    std::vector<int> coefficients;

    int depth() const { return static_cast<int>(coefficients.size()); }
};

// eps_n = prod_{i<=n} theta(e_i) with theta(L) = +1, theta(R) = -1,
// theta(C) = 0 (the standard Milnor-Thurston branch orientation product).
inline KneadingSeries kneading_coefficients(const KneadingWord& word) {
    KneadingSeries series;
    series.coefficients.reserve(word.symbols.size());
    int prod = 1;
    for (Symbol s : word.symbols) {
        if (s == Symbol::C) prod = 0;
        else if (s == Symbol::R) prod = -prod;
        series.coefficients.push_back(prod);
    }
    return series;
}

// Series of depth N for a map.  A word that hits C is mathematically
// terminated, so its series is zero-padded to N.  An escaped orbit yields a
// shorter series (coefficients past the escape are unknown).
inline KneadingSeries kneading_series(const PowerLawMap& map, int N, double c_tol = 0.0) {
    detail::ItineraryResult res = detail::itinerary_prefix(map, N, c_tol);
    KneadingSeries series = kneading_coefficients(res.word);
    if (!res.escaped) {
        while (series.depth() < N) series.coefficients.push_back(0);
    }
    return series;
}

struct RootResult {
    double t0 = 1.0;
    double tail_bound = 0.0;  // t0^{N+1} / (1 - t0); +inf when t0 = 1
    bool no_root = false;
};

namespace detail {

inline double eval_series(const KneadingSeries& series, double t) {
    // Horner on 1 + eps_1 t + ... + eps_N t^N
    double acc = 0.0;
    for (auto it = series.coefficients.rbegin(); it != series.coefficients.rend(); ++it)
        acc = acc * t + static_cast<double>(*it);
    return 1.0 + acc * t;
}

// Scan [step, 1] with the given step for the first strictly negative value,
// then bisect the bracketing interval.
inline bool scan_for_root(const KneadingSeries& series, int grid, double tol, double& t0) {
    double prev_t = 0.0;
    for (int k = 1; k <= grid; ++k) {
        double t = static_cast<double>(k) / grid;
        double v = eval_series(series, t);
        if (v < 0.0) {
            double lo = prev_t, hi = t;
            while (hi - lo > tol) {
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                if (eval_series(series, mid) < 0.0) hi = mid;
                else lo = mid;
            }
            t0 = 0.5 * (lo + hi);
            return true;
        }
        if (v == 0.0 && t < 1.0) {  // exact grid hit, interior
            t0 = t;
            return true;
        }
        prev_t = t;
    }
    return false;
}

}  // namespace detail

// Smallest zero of the truncated kneading polynomial in (0, 1]: sign scan on
// a grid of step 1/(4N), bisection to tol, and one refinement pass at half
// the step before declaring that no root exists (t0 = 1, entropy 0).
inline RootResult smallest_positive_root(const KneadingSeries& series, double tol = 1e-12) {
    const int N = series.depth();
    if (N < 8) throw std::invalid_argument("smallest_positive_root: need at least 8 coefficients");

    RootResult result;
    double t0 = 1.0;
    if (detail::scan_for_root(series, 4 * N, tol, t0) ||
        detail::scan_for_root(series, 8 * N, tol, t0)) {
        result.t0 = t0;
        result.no_root = false;
        result.tail_bound = abs_pow(t0, static_cast<double>(N + 1)) / (1.0 - t0);
    } else {
        result.t0 = 1.0;
        result.no_root = true;
        result.tail_bound = std::numeric_limits<double>::infinity();
    }
    return result;
}

enum class EntropyMethod { kneading_root, lap_growth };

struct EntropyEstimate {
    double value = 0.0;       // nats
    EntropyMethod method = EntropyMethod::kneading_root;
    int depth = 0;
    double error_bound = 0.0;
    bool no_root = false;     // kneading series had no zero in (0, 1)
};

namespace detail {

inline double series_derivative(const KneadingSeries& series, double t) {
    double acc = 0.0;
    double tp = 1.0;
    for (int n = 1; n <= series.depth(); ++n) {
        acc += n * series.coefficients[static_cast<std::size_t>(n - 1)] * tp;
        tp *= t;
    }
    return acc;
}

}  // namespace detail

// h = -log t0 for the depth-N series.  If the orbit escapes (only happens by
// floating drift at the very edge of the window), the series is used up to
// the escape depth, which the error bound then reflects.
inline EntropyEstimate entropy_from_kneading(const PowerLawMap& map, int N, double tol = 1e-12) {
    if (N < 16) throw std::invalid_argument("entropy_from_kneading: N >= 16 required");
    KneadingSeries series = kneading_series(map, N, 0.0);
    if (series.depth() < 8)
        throw OrbitEscaped(series.depth() + 1, escape_bound(map));

    RootResult root = smallest_positive_root(series, tol);
    EntropyEstimate est;
    est.method = EntropyMethod::kneading_root;
    est.depth = series.depth();
    if (root.no_root) {
        est.value = 0.0;
        est.no_root = true;
        // D_N > 0 on the grid, but the truncated tail can hide a root
        // wherever D_N(t) <= t^{N+1}/(1-t).  Below the first such t the full
        // determinant is certified positive, so -log of it bounds the
        // entropy that a hidden root could carry.
        const int grid = 8 * series.depth();
        double certified = 1.0 - 1.0 / grid;  // tail(1 - 1/grid) always exceeds |D_N|
        for (int k = 1; k < grid; ++k) {
            double t = static_cast<double>(k) / grid;
            double tail = abs_pow(t, static_cast<double>(series.depth() + 1)) / (1.0 - t);
            if (detail::eval_series(series, t) <= tail) {
                certified = t;
                break;
            }
        }
        est.error_bound = -std::log(certified);
        return est;
    }
    est.value = -std::log(root.t0);
    double slope = std::fabs(detail::series_derivative(series, root.t0));
    est.error_bound = (tol + root.tail_bound / std::max(slope, 1e-12)) / root.t0;
    return est;
}

// All solutions of f_a(x) = y.
inline std::vector<double> critical_preimages(const PowerLawMap& map, double y) {
    if (y > map.a) return {};
    if (y == map.a) return {0.0};
    double m = abs_pow(map.a - y, 1.0 / map.r);
    return {-m, m};
}

struct LapOptions {
    std::size_t node_budget = std::size_t{1} << 24;
};

// Lap number l(f^n) = 1 + #(interior turning points of f^n on the core
// interval).  The turning set is the union of f^{-j}({0}), j < n, grown
// breadth-first through critical_preimages and pruned to the core interval.
// Points produced along different preimage chains may coincide (periodic
// critical orbits), so the union is deduplicated before counting.
inline long long lap_count(const PowerLawMap& map, int n, const LapOptions& opts = {}) {
    if (n < 1) throw std::invalid_argument("lap_count: n >= 1 required");
    Interval core = core_interval(map);

    const double width = core.hi - core.lo;
    const double dedup_tol = 1e-11 * std::max(1.0, width);
    const double edge_tol = 1e-12 * std::max({1.0, std::fabs(core.lo), std::fabs(core.hi)});

    std::vector<double> points;
    std::vector<double> frontier;
    if (core.lo <= 0.0 && 0.0 <= core.hi) frontier.push_back(0.0);
    points = frontier;

    std::size_t nodes = frontier.size();
    for (int j = 1; j < n; ++j) {
        std::vector<double> next;
        next.reserve(2 * frontier.size());
        for (double y : frontier) {
            for (double x : critical_preimages(map, y)) {
                if (x >= core.lo && x <= core.hi) next.push_back(x);
            }
        }
        nodes += next.size();
        if (nodes > opts.node_budget) throw DepthTooLarge(nodes);
        frontier = std::move(next);
        points.insert(points.end(), frontier.begin(), frontier.end());
    }

    std::sort(points.begin(), points.end());
    long long interior = 0;
    double last = -std::numeric_limits<double>::infinity();
    for (double x : points) {
        if (x - last <= dedup_tol) continue;
        last = x;
        if (x > core.lo + edge_tol && x < core.hi - edge_tol) ++interior;
    }
    return 1 + interior;
}

// h ~ log l(f^depth) / depth.  The bound is subadditivity-style slack,
// documented rather than sharp.
inline EntropyEstimate entropy_from_laps(const PowerLawMap& map, int depth,
                                         const LapOptions& opts = {}) {
    if (depth < 8) throw std::invalid_argument("entropy_from_laps: depth >= 8 required");
    long long laps = lap_count(map, depth, opts);
    EntropyEstimate est;
    est.method = EntropyMethod::lap_growth;
    est.depth = depth;
    double log_laps = std::log(static_cast<double>(laps));
    est.value = log_laps / depth;
    est.error_bound = log_laps * (1.0 / depth - 1.0 / (depth + 1.0)) + std::log(2.0) / depth;
    return est;
}

}  // namespace kneadlab
