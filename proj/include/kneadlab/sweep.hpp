#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kneadlab/kneading.hpp"
#include "kneadlab/thurston.hpp"

namespace kneadlab {

// Per-sample flags.  Near-critical grid points keep their sign symbols and
// get flagged instead of a C: a C at a generic grid point is numerically
// meaningless.
enum SweepFlags : unsigned {
    kFlagEscaped = 1u << 0,
    kFlagNearCritical = 1u << 1,
    kFlagNoRoot = 1u << 2,
};

inline std::string flags_to_string(unsigned flags) {
    std::string s;
    auto append = [&s](const char* name) {
        if (!s.empty()) s += '|';
        s += name;
    };
    if (flags & kFlagEscaped) append("escaped");
    if (flags & kFlagNearCritical) append("near_critical");
    if (flags & kFlagNoRoot) append("no_root");
    return s;
}

struct SweepRecord {
    double a = 0.0;
    double r = 0.0;
    KneadingWord word;
    EntropyEstimate entropy_kneading;
    std::optional<EntropyEstimate> entropy_laps;
    unsigned flags = 0;
};

struct Violation {
    enum class Kind { word_order, entropy_order };
    std::size_t i = 0;
    std::size_t j = 0;
    Kind kind = Kind::word_order;
    double magnitude = 0.0;
};

struct SweepReport {
    double r = 0.0;
    std::vector<SweepRecord> records;      // sorted by a ascending
    std::vector<Violation> violations;
    double max_entropy_backstep = 0.0;
};

struct SweepOptions {
    int word_depth = 30;
    int series_depth = 64;
    bool with_laps = false;
    int lap_depth = 18;
    int workers = 1;
    double root_tol = 1e-12;
    double entropy_slack = -1.0;  // < 0: use 2 * max error bound
};

namespace detail {

inline SweepRecord sweep_point(double a, double r, const SweepOptions& opts) {
    SweepRecord rec;
    rec.a = a;
    rec.r = r;
    PowerLawMap map(a, r);

    ItineraryResult itin = itinerary_prefix(map, opts.word_depth, 0.0);
    rec.word = itin.word;
    if (itin.escaped) rec.flags |= kFlagEscaped;
    if (itin.min_abs_w < 1e-12) rec.flags |= kFlagNearCritical;

    try {
        rec.entropy_kneading = entropy_from_kneading(map, opts.series_depth, opts.root_tol);
        if (rec.entropy_kneading.no_root) rec.flags |= kFlagNoRoot;
    } catch (const OrbitEscaped&) {
        rec.flags |= kFlagEscaped;
    }

    if (opts.with_laps) {
        try {
            rec.entropy_laps = entropy_from_laps(map, opts.lap_depth);
        } catch (const OrbitEscaped&) {
            rec.flags |= kFlagEscaped;
        } catch (const NotSelfMap&) {
            rec.flags |= kFlagEscaped;
        }
    }
    return rec;
}

}  // namespace detail

// Checks every pair i < j.  Word order must be exactly monotone; entropy
// order is audited with slack, since both estimators carry truncation error.
inline void monotonicity_audit(SweepReport& report, double entropy_slack = -1.0) {
    report.violations.clear();
    report.max_entropy_backstep = 0.0;
    const std::size_t count = report.records.size();

    if (entropy_slack < 0.0) {
        double max_err = 0.0;
        for (const SweepRecord& rec : report.records)
            max_err = std::max(max_err, rec.entropy_kneading.error_bound);
        entropy_slack = 2.0 * max_err;
    }

    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            const SweepRecord& lo = report.records[i];
            const SweepRecord& hi = report.records[j];
            if (signed_lex_compare(lo.word, hi.word) == Ordering::Greater) {
                Violation v;
                v.i = i;
                v.j = j;
                v.kind = Violation::Kind::word_order;
                v.magnitude = 1.0;
                report.violations.push_back(v);
            }
            double backstep = lo.entropy_kneading.value - hi.entropy_kneading.value;
            if (backstep > 0.0)
                report.max_entropy_backstep = std::max(report.max_entropy_backstep, backstep);
            if (backstep > entropy_slack) {
                Violation v;
                v.i = i;
                v.j = j;
                v.kind = Violation::Kind::entropy_order;
                v.magnitude = backstep;
                report.violations.push_back(v);
            }
        }
    }
}

// One record per grid point; per-point failures become flags, never
// exceptions.  Workers split the grid by stripes, and records land at their
// grid index, so the report does not depend on scheduling.
inline SweepReport entropy_curve(double r, const std::vector<double>& a_grid,
                                 const SweepOptions& opts = {}) {
    SweepReport report;
    report.r = r;
    report.records.resize(a_grid.size());

    const int workers = std::max(1, opts.workers);
    if (workers == 1 || a_grid.size() < 2) {
        for (std::size_t i = 0; i < a_grid.size(); ++i)
            report.records[i] = detail::sweep_point(a_grid[i], r, opts);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t i = static_cast<std::size_t>(w); i < a_grid.size();
                     i += static_cast<std::size_t>(workers))
                    report.records[i] = detail::sweep_point(a_grid[i], r, opts);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    monotonicity_audit(report, opts.entropy_slack);
    return report;
}

struct SymbolChange {
    double a_star = 0.0;
    Symbol before = Symbol::L;  // e_n just below a*
    Symbol after = Symbol::R;   // e_n just above a*
    bool even_parity = true;    // parity of reversing symbols in the shared prefix
};

// Locates the parameter where symbol e_n flips across the bracket and checks
// the transition direction against the signed order: L -> R when the shared
// prefix has an even number of reversing symbols, R -> L when odd.
inline SymbolChange locate_symbol_change(double r, int n, double a_lo, double a_hi,
                                         double tol = 1e-12) {
    if (n < 2) throw std::invalid_argument("locate_symbol_change: n >= 2 required");
    KneadingWord w_lo = itinerary(PowerLawMap(a_lo, r), n, 0.0);
    KneadingWord w_hi = itinerary(PowerLawMap(a_hi, r), n, 0.0);
    if (w_lo.length() < n || w_hi.length() < n)
        throw NoBracket("endpoint itinerary hits C before position n");
    for (int k = 0; k + 1 < n; ++k)
        if (w_lo.symbols[static_cast<std::size_t>(k)] != w_hi.symbols[static_cast<std::size_t>(k)])
            throw PrefixMismatch("endpoint itineraries differ at position " + std::to_string(k + 1));

    SymbolChange change;
    change.before = w_lo.symbols[static_cast<std::size_t>(n - 1)];
    change.after = w_hi.symbols[static_cast<std::size_t>(n - 1)];
    if (change.before == change.after)
        throw NoBracket("symbol e_n does not change across the bracket");

    int reversing = 0;
    for (int k = 0; k + 1 < n; ++k)
        if (w_lo.symbols[static_cast<std::size_t>(k)] == Symbol::R) ++reversing;
    change.even_parity = reversing % 2 == 0;

    double f_lo = detail::orbit_end(PowerLawMap(a_lo, r), n);
    double f_hi = detail::orbit_end(PowerLawMap(a_hi, r), n);
    if (f_lo == 0.0 || f_hi == 0.0) throw NoBracket("f^n(0) vanishes at an endpoint");

    double lo = a_lo, hi = a_hi;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double v = detail::orbit_end(PowerLawMap(mid, r), n);
        if (v == 0.0) { lo = hi = mid; break; }
        if ((v > 0.0) == (f_lo > 0.0)) lo = mid;
        else hi = mid;
    }
    change.a_star = 0.5 * (lo + hi);

    const bool consistent = change.even_parity
                                ? (change.before == Symbol::L && change.after == Symbol::R)
                                : (change.before == Symbol::R && change.after == Symbol::L);
    if (!consistent)
        throw ParityViolation("transition " + std::string(1, to_char(change.before)) + " -> " +
                              std::string(1, to_char(change.after)) + " contradicts " +
                              (change.even_parity ? "even" : "odd") + " parity");
    return change;
}

namespace detail {

// Raw depth-n sign word, iterating f directly with no escape bound: the
// finite word is defined (and locally constant in r) whether or not the
// parameter gives a self-map, and unbounded orbits saturate at -inf with a
// stable L sign.
inline std::string raw_sign_word(double a, double r, int n, double* min_abs = nullptr) {
    std::string word;
    double w = a;
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
        if (i > 1) w = a - abs_pow(w, r);
        lo = std::min(lo, std::fabs(w));
        word.push_back(w < 0.0 ? 'L' : w > 0.0 ? 'R' : 'C');
    }
    if (min_abs) *min_abs = lo;
    return word;
}

}  // namespace detail

// Finite kneading words are locally constant in the exponent away from
// precritical parameters: the depth-n itinerary must agree at r0 - delta, r0,
// and r0 + delta.
inline bool r_continuity_probe(double a, double r0, int n, double delta) {
    double min_abs = 0.0;
    std::string center = detail::raw_sign_word(a, r0, n, &min_abs);
    if (min_abs <= 1e-6) {
        double w = a;
        int index = 1;
        for (int i = 2; std::fabs(w) > 1e-6 && i <= n; ++i) {
            w = a - abs_pow(w, r0);
            index = i;
        }
        throw NearCritical(index, w);
    }
    return detail::raw_sign_word(a, r0 - delta, n) == center &&
           detail::raw_sign_word(a, r0 + delta, n) == center;
}

// Max jump of the kneading entropy over adjacent points of a micro-grid
// around a0.  A zero radius (or zero steps) is a single point.
inline double entropy_continuity_probe(double r, double a0, double radius, int steps,
                                       int series_depth = 64) {
    if (radius < 0.0 || steps < 0) throw std::invalid_argument("entropy_continuity_probe: bad grid");
    if (radius == 0.0 || steps == 0) return 0.0;
    double max_jump = 0.0;
    double prev = 0.0;
    for (int i = 0; i <= steps; ++i) {
        double a = a0 - radius + 2.0 * radius * i / steps;
        double h = entropy_from_kneading(PowerLawMap(a, r), series_depth).value;
        if (i > 0) max_jump = std::max(max_jump, std::fabs(h - prev));
        prev = h;
    }
    return max_jump;
}

}  // namespace kneadlab
