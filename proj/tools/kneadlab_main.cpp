#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kneadlab/cli_commands.hpp"

namespace {

int workers_from_env(int fallback) {
    const char* env = std::getenv("KNEADLAB_WORKERS");
    if (!env) return fallback;
    char* end = nullptr;
    long value = std::strtol(env, &end, 10);
    if (end == env || value < 1) return fallback;
    return static_cast<int>(value);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kneading sequences, kneading-determinant entropy, and Thurston "
                 "fixed points for the family f_a(x) = a - |x|^r"};
    app.require_subcommand(1);

    kneadlab::EntropyConfig entropy_cfg;
    CLI::App* entropy = app.add_subcommand("entropy", "entropy estimates at a single (a, r)");
    entropy->add_option("--r", entropy_cfg.r, "exponent r > 1")->required();
    entropy->add_option("--a", entropy_cfg.a, "parameter a")->required();
    entropy->add_option("--series-depth", entropy_cfg.series_depth, "kneading series depth");
    entropy->add_option("--lap-depth", entropy_cfg.lap_depth, "lap-count iterate depth");
    entropy->add_option("--word-depth", entropy_cfg.word_depth, "printed word length");
    entropy->add_option("--tol", entropy_cfg.tol, "root bisection tolerance");
    entropy->add_flag("--log2", entropy_cfg.log2, "display entropies in bits");

    kneadlab::SuperstableConfig super_cfg;
    CLI::App* super = app.add_subcommand("superstable", "locate a superstable parameter by word");
    super->add_option("--r", super_cfg.r, "exponent r > 1")->required();
    super->add_option("--word", super_cfg.word, "kneading word over {R, L} ending in C")->required();
    super->add_option("--tol", super_cfg.tol, "|f^n(0)| tolerance for bisection");
    super->add_option("--fp-tol", super_cfg.fixed_point_tol, "Thurston fixed-point tolerance");
    super->add_option("--seed", super_cfg.seed, "seed for spectral-radius restarts");

    kneadlab::SweepConfig sweep_cfg;
    std::string range_text;
    int sweep_workers = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep with monotonicity audit");
    sweep->add_option("--r", sweep_cfg.r, "exponent r > 1")->required();
    sweep->add_option("--a-range", range_text, "grid as lo:hi:count (inclusive)")->required();
    sweep->add_option("--word-depth", sweep_cfg.options.word_depth, "itinerary depth");
    sweep->add_option("--series-depth", sweep_cfg.options.series_depth, "kneading series depth");
    sweep->add_flag("--with-laps", sweep_cfg.options.with_laps, "also estimate entropy from laps");
    sweep->add_option("--lap-depth", sweep_cfg.options.lap_depth, "lap-count iterate depth");
    sweep->add_option("--workers", sweep_workers, "worker threads");
    sweep->add_option("--out", sweep_cfg.out_path, "output file (default stdout)");
    sweep->add_option("--format", sweep_cfg.format, "csv or json");

    kneadlab::VerifyConfig verify_cfg;
    CLI::App* verify = app.add_subcommand("verify", "run the structural verification suites");
    verify->add_option("--r", verify_cfg.r_values, "exponents to verify (repeatable)");
    verify->add_option("--max-n", verify_cfg.max_n, "largest word length");
    verify->add_option("--identity-tol", verify_cfg.identity_tol, "determinant identity tolerance");
    verify->add_option("--telescoping-tol", verify_cfg.telescoping_tol, "telescoping sum tolerance");
    verify->add_option("--jacobian-tol", verify_cfg.jacobian_tol, "Jacobian vs FD tolerance");
    verify->add_option("--fixed-point-tol", verify_cfg.fixed_point_tol, "T(w) = w tolerance");
    verify->add_option("--spectral-margin", verify_cfg.spectral_margin,
                       "required margin below spectral radius 1");
    verify->add_option("--seed", verify_cfg.seed, "seed for spectral-radius restarts");
    verify->add_option("--out", verify_cfg.out_path, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (entropy->parsed()) return kneadlab::cmd_entropy(entropy_cfg, std::cout, std::cerr);
        if (super->parsed()) return kneadlab::cmd_superstable(super_cfg, std::cout, std::cerr);
        if (sweep->parsed()) {
            auto range = kneadlab::parse_range(range_text);
            if (!range) {
                std::cerr << "sweep: bad range \"" << range_text << "\" (want lo:hi:count)\n";
                return kneadlab::kExitConfig;
            }
            sweep_cfg.range = *range;
            sweep_cfg.options.workers = workers_from_env(sweep_workers);
            return kneadlab::cmd_sweep(sweep_cfg, std::cout, std::cerr);
        }
        if (verify->parsed()) return kneadlab::cmd_verify(verify_cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kneadlab::kExitConfig;
    }
    return kneadlab::kExitConfig;
}
