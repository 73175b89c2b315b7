#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kneadlab/report_io.hpp"
#include "kneadlab/sweep.hpp"
#include "kneadlab/thurston.hpp"

namespace kneadlab {

// Exit codes, one per outcome class.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,       // invalid parameters / configuration
    kExitEscaped = 3,      // orbit escaped
    kExitInadmissible = 4, // word has no superstable parameter
    kExitViolations = 5,   // sweep found word-order violations
    kExitVerifyFailed = 6, // a verification check failed
};

struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    long count = 0;
};

// lo:hi:count with inclusive endpoints; reproducible grids without
// floating-step drift.
inline std::optional<RangeSpec> parse_range(const std::string& text) {
    RangeSpec spec;
    std::size_t c1 = text.find(':');
    if (c1 == std::string::npos) return std::nullopt;
    std::size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) return std::nullopt;
    try {
        spec.lo = std::stod(text.substr(0, c1));
        spec.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        spec.count = std::stol(text.substr(c2 + 1));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (spec.count < 1 || spec.hi < spec.lo) return std::nullopt;
    return spec;
}

inline std::vector<double> make_grid(const RangeSpec& spec) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(spec.count));
    if (spec.count == 1) {
        grid.push_back(spec.lo);
        return grid;
    }
    for (long i = 0; i < spec.count; ++i)
        grid.push_back(spec.lo + (spec.hi - spec.lo) * static_cast<double>(i) /
                                     static_cast<double>(spec.count - 1));
    return grid;
}

inline double display_entropy(double nats, bool log2) {
    return log2 ? nats / std::log(2.0) : nats;
}

// ---------------------------------------------------------------------------

struct EntropyConfig {
    double r = 2.0;
    double a = 1.0;
    int word_depth = 16;
    int series_depth = 64;
    int lap_depth = 14;
    double tol = 1e-12;
    bool log2 = false;
};

inline int cmd_entropy(const EntropyConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!(cfg.r > 1.0) || !(cfg.a > 0.0) || cfg.a > a_full(cfg.r)) {
        err << "entropy: a = " << cfg.a << " outside the valid window (0, "
            << format_double(a_full(cfg.r)) << "] for r = " << cfg.r << '\n';
        return kExitConfig;
    }
    try {
        PowerLawMap map(cfg.a, cfg.r);
        EntropyEstimate h_kneading = entropy_from_kneading(map, cfg.series_depth, cfg.tol);
        EntropyEstimate h_laps = entropy_from_laps(map, cfg.lap_depth);
        detail::ItineraryResult itin = detail::itinerary_prefix(map, cfg.word_depth, 0.0);
        out << "a=" << format_double(cfg.a) << " r=" << format_double(cfg.r)
            << " h_kneading=" << format_double(display_entropy(h_kneading.value, cfg.log2))
            << " (err<=" << format_double(display_entropy(h_kneading.error_bound, cfg.log2))
            << ", depth " << h_kneading.depth << ")"
            << " h_laps=" << format_double(display_entropy(h_laps.value, cfg.log2))
            << " (err<=" << format_double(display_entropy(h_laps.error_bound, cfg.log2))
            << ", depth " << h_laps.depth << ")"
            << " word=" << itin.word.str() << (itin.escaped ? "!" : "") << '\n';
        return kExitOk;
    } catch (const OrbitEscaped& e) {
        err << "entropy: " << e.what() << '\n';
        return kExitEscaped;
    }
}

// ---------------------------------------------------------------------------

struct SuperstableConfig {
    double r = 2.0;
    std::string word;
    double tol = 1e-10;
    double fixed_point_tol = 1e-12;
    std::uint64_t seed = 20240901u;
    bool log2 = false;
};

inline int cmd_superstable(const SuperstableConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!(cfg.r > 1.0)) {
        err << "superstable: r must exceed 1\n";
        return kExitConfig;
    }
    KneadingWord word;
    try {
        word = KneadingWord::parse(cfg.word);
    } catch (const std::exception& e) {
        err << "superstable: " << e.what() << '\n';
        return kExitConfig;
    }
    if (!word.terminated_at_c() || word.length() < 2) {
        err << "superstable: word must end in C at position >= 2\n";
        return kExitConfig;
    }

    std::optional<double> a_bisect = superstable_from_word(cfg.r, word, cfg.tol);
    if (!a_bisect) {
        err << "superstable: word " << word.str() << " is inadmissible for r = " << cfg.r
            << " (no sign change of f^n(0) on its prefix cylinder)\n";
        return kExitInadmissible;
    }

    FixedPointResult fp;
    try {
        SignPattern sigma = SignPattern::from_word(word.prefix());
        fp = thurston_fixed_point(sigma, cfg.r, default_initial_vector(sigma),
                                  cfg.fixed_point_tol);
    } catch (const std::exception& e) {
        err << "superstable: Thurston solver failed: " << e.what() << '\n';
        return kExitInadmissible;
    }

    PositivityResult pos = positivity_check(cfg.r, *a_bisect, word.length(), cfg.seed);
    out << "word=" << word.str() << " r=" << format_double(cfg.r)
        << " a_bisect=" << format_double(*a_bisect)
        << " a_thurston=" << format_double(fp.omega.z.front())
        << " diff=" << format_double(std::fabs(*a_bisect - fp.omega.z.front()))
        << " iterations=" << fp.iterations << (fp.newton_fallback ? " (newton)" : "")
        << " det=" << format_double(pos.det) << " spec_rad=" << format_double(pos.spec_rad)
        << " positivity=" << (pos.ok ? "OK" : "FAIL") << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepConfig {
    double r = 2.0;
    RangeSpec range;
    SweepOptions options;
    std::string out_path;        // empty: stdout
    std::string format = "csv";  // csv | json
};

inline int cmd_sweep(const SweepConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!(cfg.r > 1.0) || cfg.range.count < 1 || !(cfg.range.lo > 0.0) ||
        cfg.range.hi > a_full(cfg.r) * (1.0 + 1e-12)) {
        err << "sweep: range (" << cfg.range.lo << ", " << cfg.range.hi
            << ") x " << cfg.range.count << " invalid; window is (0, "
            << format_double(a_full(cfg.r)) << "]\n";
        return kExitConfig;
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        err << "sweep: unknown format " << cfg.format << '\n';
        return kExitConfig;
    }
    if (cfg.options.word_depth < 10 || cfg.options.series_depth < 32) {
        err << "sweep: word depth >= 10 and series depth >= 32 required\n";
        return kExitConfig;
    }

    SweepReport report = entropy_curve(cfg.r, make_grid(cfg.range), cfg.options);

    std::ostringstream payload;
    if (cfg.format == "csv") write_csv(report, payload);
    else write_json(report, payload);

    if (cfg.out_path.empty()) {
        out << payload.str();
    } else {
        std::ofstream file(cfg.out_path, std::ios::binary);
        if (!file) {
            err << "sweep: cannot open " << cfg.out_path << '\n';
            return kExitConfig;
        }
        file << payload.str();
    }

    for (const Violation& v : report.violations)
        if (v.kind == Violation::Kind::word_order) return kExitViolations;
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyConfig {
    std::vector<double> r_values = {2.0};
    int max_n = 10;
    double identity_tol = 1e-8;
    double telescoping_tol = 1e-8;
    double jacobian_tol = 1e-6;
    double fixed_point_tol = 1e-8;
    double spectral_margin = 1e-3;
    double bisect_tol = 1e-8;
    std::uint64_t seed = 20240901u;
    std::string out_path;  // empty: stdout
};

namespace detail {

struct CheckLine {
    std::string name;
    double r = 0.0;
    std::size_t words = 0;
    double statistic = 0.0;  // max residual, or worst margin
    double tol = 0.0;
    bool pass = false;
    const char* kind = "max_residual";
};

inline void print_check(std::ostream& out, const CheckLine& line) {
    out << "check=" << line.name << " r=" << format_double(line.r) << " words=" << line.words
        << ' ' << line.kind << '=' << format_double(line.statistic)
        << " tol=" << format_double(line.tol) << (line.pass ? " PASS" : " FAIL") << '\n';
}

// Max relative entrywise deviation between the analytic Jacobian and central
// finite differences of T.  The step shrinks with the smallest branch
// argument: near-critical orbit vectors have entries with curvature ~
// argument^{rho-3}, and a fixed step would drown the comparison in quadratic
// truncation error.
inline double jacobian_fd_error(const CriticalOrbitVector& omega, const SignPattern& sigma,
                                double r, double h_base = 1e-6) {
    SquareMatrix jac = thurston_jacobian(omega, sigma, r);
    const int d = omega.dim();
    double margin = omega.z[0];
    for (int j = 1; j < d; ++j)
        margin = std::min(margin, omega.z[0] - omega.z[static_cast<std::size_t>(j)]);
    const double h = std::min(h_base, 1e-3 * margin);
    double worst = 0.0;
    for (int col = 0; col < d; ++col) {
        CriticalOrbitVector plus = omega, minus = omega;
        plus.z[static_cast<std::size_t>(col)] += h;
        minus.z[static_cast<std::size_t>(col)] -= h;
        CriticalOrbitVector t_plus = thurston_apply(plus, sigma, r);
        CriticalOrbitVector t_minus = thurston_apply(minus, sigma, r);
        for (int row = 0; row < d; ++row) {
            double fd = (t_plus.z[static_cast<std::size_t>(row)] -
                         t_minus.z[static_cast<std::size_t>(row)]) /
                        (2.0 * h);
            double exact = jac.at(row, col);
            double denom = std::max({std::fabs(exact), std::fabs(fd), 1.0});
            worst = std::max(worst, std::fabs(fd - exact) / denom);
        }
    }
    return worst;
}

}  // namespace detail

inline int cmd_verify(const VerifyConfig& cfg, std::ostream& out_stream, std::ostream& err) {
    std::ostringstream table;
    std::string first_failure;

    for (double r : cfg.r_values) {
        if (!(r > 1.0)) {
            err << "verify: r must exceed 1\n";
            return kExitConfig;
        }
        std::vector<SuperstablePoint> points = enumerate_superstable(r, cfg.max_n, cfg.bisect_tol);

        double fixed_point_res = 0.0;
        double identity_res = 0.0;
        double telescoping_res = 0.0;
        double jacobian_err = 0.0;
        double min_det = std::numeric_limits<double>::infinity();
        double min_margin = std::numeric_limits<double>::infinity();

        for (const SuperstablePoint& point : points) {
            const int n = point.word.length();
            auto [omega, sigma] = orbit_vector(PowerLawMap(point.a, r), n);

            CriticalOrbitVector image = thurston_apply(omega, sigma, r);
            fixed_point_res = std::max(fixed_point_res, detail::sup_distance(image, omega));

            IdentityResidual identity = determinant_identity_residual(r, point.a, n);
            identity_res = std::max(identity_res, identity.relative_residual);

            double telescoped = telescoping_sum(r, point.a, n);
            telescoping_res =
                std::max(telescoping_res, std::fabs(telescoped - identity.rhs) /
                                              std::max({std::fabs(identity.rhs), 1e-30}));

            jacobian_err = std::max(jacobian_err, detail::jacobian_fd_error(omega, sigma, r));

            PositivityResult pos = positivity_check(r, point.a, n, cfg.seed);
            min_det = std::min(min_det, pos.det);
            min_margin = std::min(min_margin, 1.0 - pos.spec_rad);
        }

        detail::CheckLine lines[] = {
            {"fixed_point", r, points.size(), fixed_point_res, cfg.fixed_point_tol,
             fixed_point_res <= cfg.fixed_point_tol, "max_residual"},
            {"identity", r, points.size(), identity_res, cfg.identity_tol,
             identity_res <= cfg.identity_tol, "max_residual"},
            {"telescoping", r, points.size(), telescoping_res, cfg.telescoping_tol,
             telescoping_res <= cfg.telescoping_tol, "max_residual"},
            {"jacobian_fd", r, points.size(), jacobian_err, cfg.jacobian_tol,
             jacobian_err <= cfg.jacobian_tol, "max_residual"},
            {"positivity_det", r, points.size(), min_det, 0.0, min_det > 0.0, "min_value"},
            {"positivity_spectral", r, points.size(), min_margin, cfg.spectral_margin,
             min_margin >= cfg.spectral_margin, "min_margin"},
        };
        for (const detail::CheckLine& line : lines) {
            detail::print_check(table, line);
            if (!line.pass && first_failure.empty()) first_failure = line.name;
        }
    }

    table << "verify: " << (first_failure.empty() ? "PASS" : "FAIL " + first_failure) << '\n';

    if (cfg.out_path.empty()) {
        out_stream << table.str();
    } else {
        std::ofstream file(cfg.out_path, std::ios::binary);
        if (!file) {
            err << "verify: cannot open " << cfg.out_path << '\n';
            return kExitConfig;
        }
        file << table.str();
    }

    if (!first_failure.empty()) {
        err << "verify failed: " << first_failure << '\n';
        return kExitVerifyFailed;
    }
    return kExitOk;
}

}  // namespace kneadlab
