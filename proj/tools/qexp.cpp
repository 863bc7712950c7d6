// qexp: command-line front end for the double-base expansion library.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <qexp/io.hpp>
#include <qexp/qexp.hpp>
#include <qexp/verify.hpp>

namespace {

using namespace qexp;

enum Exit { ok = 0, domain_error = 1, verification_failure = 2, io_failure = 3 };

struct BaseArgs {
    double q0 = 0.0;
    double q1 = 0.0;

    void add_to(CLI::App* cmd, bool required = true) {
        auto* a = cmd->add_option("--q0", q0, "base for digit 0");
        auto* b = cmd->add_option("--q1", q1, "base for digit 1");
        if (required) {
            a->required();
            b->required();
        }
    }
    BasePair make() const { return new_base(q0, q1); }
};

struct OutputArgs {
    std::string format = "csv";
    std::string output = "-";

    void add_to(CLI::App* cmd, const std::string& default_format = "csv") {
        format = default_format;
        cmd->add_option("--format", format, "csv, json or table")
            ->check(CLI::IsMember({"csv", "json", "table"}))
            ->capture_default_str();
        cmd->add_option("--output", output, "output file, '-' for stdout")->capture_default_str();
    }
    Format parsed() const {
        if (format == "json") return Format::json;
        if (format == "table") return Format::table;
        return Format::csv;
    }
    void write(const Table& t) const { write_output(output, emit(t, parsed())); }
};

MapKind parse_kind(const std::string& s) { return s == "lazy" ? MapKind::lazy : MapKind::greedy; }

CLI::Option* add_kind(CLI::App* cmd, std::string& kind) {
    return cmd->add_option("--kind", kind, "greedy or lazy")
        ->check(CLI::IsMember({"greedy", "lazy"}))
        ->capture_default_str();
}

Tail parse_tail(const std::string& s) { return s == "ones" ? Tail::ones : Tail::zeros; }

/// Gnuplot-ready outline of a step function: two points per piece.
std::string gnuplot_data(const StepFunction& f) {
    std::string out = "# x value\n";
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        out += format_real(f.piece_left(i)) + ' ' + format_real(f.values()[i]) + '\n';
        out += format_real(f.piece_right(i)) + ' ' + format_real(f.values()[i]) + '\n';
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Greedy and lazy double-base expansions: maps, invariant densities, transfer operators"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");

    // base
    BaseArgs base_args;
    OutputArgs base_out;
    auto* base_cmd = app.add_subcommand("base", "validate a base pair and print its derived constants");
    base_args.add_to(base_cmd);
    base_out.add_to(base_cmd, "json");

    // expand
    BaseArgs expand_base;
    OutputArgs expand_out;
    double expand_x = 0.0;
    std::size_t expand_n = 20;
    std::string expand_kind = "greedy";
    auto* expand_cmd = app.add_subcommand("expand", "orbit and digits of a point (columns step,x,digit)");
    expand_base.add_to(expand_cmd);
    expand_cmd->add_option("--x", expand_x, "start point in [0, 1/(q1-1)]")->required();
    expand_cmd->add_option("--n", expand_n, "number of digits")->capture_default_str();
    add_kind(expand_cmd, expand_kind);
    expand_out.add_to(expand_cmd);

    // density
    BaseArgs density_base;
    OutputArgs density_out;
    std::string density_kind = "greedy";
    std::size_t density_depth = kDefaultTruncation;
    bool density_csv = false;
    bool density_figure1 = false;
    bool density_raw = false;
    std::string density_gnuplot;
    auto* density_cmd = app.add_subcommand("density", "invariant density as a step function");
    density_base.add_to(density_cmd, false);
    add_kind(density_cmd, density_kind);
    density_cmd->add_option("--depth", density_depth, "truncation depth of the jump function")->capture_default_str();
    density_cmd->add_flag("--csv", density_csv, "same as --format csv");
    density_cmd->add_flag("--figure1", density_figure1,
                          "use the base whose critical expansions are 1110^inf and 001^inf");
    density_cmd->add_flag("--unnormalized", density_raw, "print the jump function instead of the density");
    density_cmd->add_option("--gnuplot", density_gnuplot, "also write an x/value outline for plotting");
    density_out.add_to(density_cmd);

    // transfer
    BaseArgs transfer_base;
    OutputArgs transfer_out;
    std::string transfer_kind = "greedy";
    std::size_t transfer_n = 60;
    std::size_t transfer_cap = 20000;
    bool transfer_no_stop = false;
    auto* transfer_cmd = app.add_subcommand("transfer", "iterate the transfer operator from the uniform density");
    transfer_base.add_to(transfer_cmd);
    add_kind(transfer_cmd, transfer_kind);
    transfer_cmd->add_option("--n", transfer_n, "number of applications")->capture_default_str();
    transfer_cmd->add_option("--cap", transfer_cap, "breakpoint cap")->capture_default_str();
    transfer_cmd->add_flag("--no-early-stop", transfer_no_stop, "run all n steps even after convergence");
    transfer_out.add_to(transfer_cmd);

    // partition
    BaseArgs partition_base;
    OutputArgs partition_out;
    std::string partition_kind = "greedy";
    std::size_t partition_level = 2;
    auto* partition_cmd = app.add_subcommand("partition", "cylinder intervals of one level");
    partition_base.add_to(partition_cmd);
    partition_cmd->add_option("--level", partition_level, "word length (at most 20)")->capture_default_str();
    add_kind(partition_cmd, partition_kind);
    partition_out.add_to(partition_cmd);

    // ergodic
    BaseArgs ergodic_base;
    OutputArgs ergodic_out;
    std::string ergodic_stat = "birkhoff";
    std::string ergodic_kind = "greedy";
    std::uint64_t ergodic_seed = 1;
    std::size_t ergodic_samples = 1000;
    std::vector<std::size_t> ergodic_depths;
    std::size_t ergodic_nmax = 30;
    std::vector<double> ergodic_a;
    std::vector<double> ergodic_b;
    auto* ergodic_cmd = app.add_subcommand("ergodic", "Monte Carlo statistics");
    ergodic_base.add_to(ergodic_cmd);
    ergodic_cmd->add_option("--stat", ergodic_stat, "birkhoff, gap, univoque, mixing or count")
        ->check(CLI::IsMember({"birkhoff", "gap", "univoque", "mixing", "count"}))
        ->capture_default_str();
    add_kind(ergodic_cmd, ergodic_kind);
    ergodic_cmd->add_option("--seed", ergodic_seed, "RNG seed")->capture_default_str();
    ergodic_cmd->add_option("--samples", ergodic_samples, "number of samples or orbits")->capture_default_str();
    ergodic_cmd->add_option("--depth", ergodic_depths,
                            "orbit length (birkhoff) or digit depth; repeat for one row per depth");
    ergodic_cmd->add_option("--n-max", ergodic_nmax, "largest lag for mixing")->capture_default_str();
    ergodic_cmd->add_option("--a", ergodic_a, "set A as 'lo hi' (mixing)")->expected(2);
    ergodic_cmd->add_option("--b", ergodic_b, "set B as 'lo hi' (mixing)")->expected(2);
    ergodic_out.add_to(ergodic_cmd);

    // solve-base
    std::string solve_greedy;
    std::string solve_lazy;
    std::string solve_greedy_tail = "zeros";
    std::string solve_lazy_tail = "ones";
    OutputArgs solve_out;
    auto* solve_cmd = app.add_subcommand("solve-base", "find the base whose critical points have given expansions");
    solve_cmd->add_option("--greedy", solve_greedy, "greedy word of r_Q before its tail")->required();
    solve_cmd->add_option("--lazy", solve_lazy, "lazy word of ell_Q before its tail")->required();
    solve_cmd->add_option("--greedy-tail", solve_greedy_tail, "zeros or ones")
        ->check(CLI::IsMember({"zeros", "ones"}))
        ->capture_default_str();
    solve_cmd->add_option("--lazy-tail", solve_lazy_tail, "zeros or ones")
        ->check(CLI::IsMember({"zeros", "ones"}))
        ->capture_default_str();
    solve_out.add_to(solve_cmd, "json");

    // verify
    std::string verify_profile = "desk";
    std::uint64_t verify_seed = VerifyOptions{}.seed;
    std::vector<int> verify_only;
    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
    verify_cmd->add_option("--profile", verify_profile, "desk or ci")
        ->check(CLI::IsMember({"desk", "ci"}))
        ->capture_default_str();
    verify_cmd->add_option("--seed", verify_seed, "seed for the sampled criteria")->capture_default_str();
    verify_cmd->add_option("--only", verify_only, "run only these criteria")->check(CLI::Range(1, 10));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Exit::domain_error;
    }

    try {
        if (*base_cmd) {
            base_out.write(base_table(base_args.make()));
        } else if (*expand_cmd) {
            expand_out.write(orbit_table(expansion(expand_base.make(), expand_x, expand_n, parse_kind(expand_kind))));
        } else if (*density_cmd) {
            const BasePair Q = density_figure1 ? figure_one_base() : density_base.make();
            if (!density_figure1 && (density_base.q0 == 0.0 || density_base.q1 == 0.0)) {
                throw Error(ErrorKind::InvalidBase, "--q0 and --q1 are required unless --figure1 is given");
            }
            const MapKind kind = parse_kind(density_kind);
            StepFunction f = density_raw ? jump_function(Q, kind, density_depth).h
                                         : invariant_density(Q, kind, density_depth).first;
            if (density_csv) density_out.format = "csv";
            density_out.write(step_table(f));
            if (!density_gnuplot.empty()) write_output(density_gnuplot, gnuplot_data(f));
        } else if (*transfer_cmd) {
            const BasePair Q = transfer_base.make();
            IterateOptions opt;
            opt.breakpoint_cap = transfer_cap;
            opt.stop_early = !transfer_no_stop;
            const auto trace = iterate(FPOperator{Q, parse_kind(transfer_kind)},
                                       StepFunction::constant(Q.right(), 1.0 / Q.right()), transfer_n, opt);
            transfer_out.write(transfer_table(trace.records));
        } else if (*partition_cmd) {
            const auto level = level_partition(partition_base.make(), partition_level, parse_kind(partition_kind));
            partition_out.write(partition_table(partition_rows(level)));
        } else if (*ergodic_cmd) {
            const BasePair Q = ergodic_base.make();
            const MapKind kind = parse_kind(ergodic_kind);
            auto depths = ergodic_depths;
            if (ergodic_stat == "birkhoff") {
                if (depths.empty()) depths = {100000};
                std::vector<SampleReport> reps;
                for (std::size_t n : depths) reps.push_back(birkhoff_report(Q, kind, ergodic_samples, n, ergodic_seed));
                ergodic_out.write(report_table(reps));
            } else if (ergodic_stat == "gap") {
                ergodic_out.write(gap_table(chebyshev_gap(Q, invariant_densities(Q))));
            } else if (ergodic_stat == "univoque" || ergodic_stat == "count") {
                if (depths.empty()) depths = {8, 16, 32, 64};
                std::vector<SampleReport> reps;
                for (std::size_t d : depths) {
                    reps.push_back(ergodic_stat == "univoque" ? univoque_fraction(Q, d, ergodic_samples, ergodic_seed)
                                                              : multiplicity_fraction(Q, d, ergodic_samples, ergodic_seed));
                }
                ergodic_out.write(report_table(reps));
            } else {
                const double lo = kind == MapKind::greedy ? 0.0 : Q.ell();
                const double hi = kind == MapKind::greedy ? Q.r() : Q.right();
                const double mid = 0.5 * (lo + hi);
                const Interval A = ergodic_a.size() == 2 ? Interval{ergodic_a[0], ergodic_a[1], true, false}
                                                         : Interval{lo, mid, true, false};
                const Interval B = ergodic_b.size() == 2 ? Interval{ergodic_b[0], ergodic_b[1], true, false} : A;
                ergodic_out.write(correlation_table(mixing_correlation(Q, invariant_densities(Q), kind, A, B,
                                                                       ergodic_nmax, ergodic_samples, ergodic_seed)));
            }
        } else if (*solve_cmd) {
            const BasePair Q = solve_base({DigitWord::parse(solve_greedy), parse_tail(solve_greedy_tail)},
                                          {DigitWord::parse(solve_lazy), parse_tail(solve_lazy_tail)});
            solve_out.write(base_table(Q));
        } else if (*verify_cmd) {
            VerifyOptions opt;
            opt.profile = verify_profile == "ci" ? Profile::ci : Profile::desk;
            opt.seed = verify_seed;
            std::vector<CriterionResult> results;
            if (verify_only.empty()) {
                results = run_verification(opt);
            } else {
                for (int id : verify_only) results.push_back(run_criterion(id, opt));
            }
            bool all = true;
            for (const auto& r : results) {
                std::printf("[%s] %2d %-22s %8.3fs  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                            r.detail.c_str());
                all = all && r.passed;
            }
            std::fflush(stdout);
            return all ? Exit::ok : Exit::verification_failure;
        }
    } catch (const Error& e) {
        std::cerr << "qexp: " << e.what() << '\n';
        return e.kind() == ErrorKind::IoError ? Exit::io_failure : Exit::domain_error;
    } catch (const std::exception& e) {
        std::cerr << "qexp: " << e.what() << '\n';
        return Exit::domain_error;
    }
    return Exit::ok;
}
