#include "cli.hpp"

#include "faan/bounds.hpp"
#include "faan/doa.hpp"
#include "faan/matrix_io.hpp"
#include "faan/parallel.hpp"
#include "faan/portfolio.hpp"
#include "faan/ranksel.hpp"
#include "faan/report.hpp"
#include "faan/solvers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace faan::cli {

namespace {

using nlohmann::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Whole output is rendered first so a failing command never leaves a partial file.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw FileError("cannot open for writing: " + path);
    file << content;
    if (!file) throw FileError("write failed: " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

struct SolverFlags {
    double epsilon;
    int max_iter;
    std::string sigma_init = "diag";
    std::string sigma_file;
    std::uint64_t seed = 0;

    explicit SolverFlags(double eps, int iters = 1000) : epsilon(eps), max_iter(iters) {}

    void add_to(CLI::App* cmd, bool with_init) {
        cmd->add_option("--epsilon", epsilon, "Relative loss-decrease stopping tolerance")->capture_default_str();
        cmd->add_option("--max-iter", max_iter, "Maximum number of passes")->capture_default_str();
        if (!with_init) return;
        cmd->add_option("--sigma-init", sigma_init, "Initial noise variances: identity, diag, explicit, random")
            ->capture_default_str();
        cmd->add_option("--sigma-file", sigma_file, "CSV with n initial noise variances (--sigma-init explicit)");
        cmd->add_option("--seed", seed, "Seed for --sigma-init random")->capture_default_str();
    }

    SolverConfig config() const {
        SolverConfig cfg;
        cfg.epsilon = epsilon;
        cfg.max_iter = max_iter;
        cfg.sigma_init = sigma_init_from_string(sigma_init);
        cfg.seed = seed;
        if (cfg.sigma_init == SigmaInit::explicit_vector) {
            if (sigma_file.empty()) throw std::invalid_argument("--sigma-init explicit requires --sigma-file");
            const Matrix v = read_matrix_csv(sigma_file);
            cfg.explicit_sigma_sq = Eigen::Map<const Vector>(v.data(), v.size());
        }
        cfg.validate();
        return cfg;
    }
};

struct FitCmd {
    std::string input, out, method = "faan";
    int rank = 1;
    SolverFlags solver{1e-3};

    int run(std::ostream& os) const {
        FitRequest req{SampleCov(read_matrix_csv(input)), rank, solver.config(), method_from_string(method)};
        const FactorFit f = fit(req);
        emit(out, dump(fit_report(f, req.config)), os);
        if (!f.feasible) return infeasible;
        if (!f.converged) return not_converged;
        return ok;
    }
};

struct BoundsCmd {
    std::string input;
    int n = 0;
    int rank = 0;

    int run(std::ostream& os) const {
        std::optional<SampleCov> scm;
        int dim = n;
        if (!input.empty()) {
            scm.emplace(read_matrix_csv(input));
            if (dim != 0 && dim != scm->dim()) throw std::invalid_argument("--n disagrees with the matrix size");
            dim = scm->dim();
        }
        if (dim < 2) throw std::invalid_argument("bounds: need a matrix file or --n >= 2");

        std::ostringstream s;
        s << "n = " << dim << '\n';
        s << "r_L = " << fmt(ledermann_bound(dim)) << '\n';
        if (scm) {
            s << "r_G = ";
            try {
                s << guttman_bound(*scm) << '\n';
            } catch (const std::domain_error&) {
                s << "unavailable (singular matrix)\n";
            }
        }
        s << "resolvable_sources_isotropic = " << resolvable_sources(dim, false) << '\n';
        s << "resolvable_sources_anisotropic = " << resolvable_sources(dim, true) << '\n';
        s << "r,n_m,n_c,identifiability\n";
        const int lo = rank > 0 ? rank : 1;
        const int hi = rank > 0 ? rank : dim - 1;
        for (int r = lo; r <= hi; ++r) {
            const IdentifiabilityVerdict v = identifiability_class(dim, r);
            s << r << ',' << v.n_m << ',' << v.n_c << ',' << to_string(v.cls) << '\n';
        }
        os << s.str();
        return ok;
    }
};

struct RankCmd {
    std::string input, out, truth;
    long long samples = 0;
    bool returns = false;
    int r_max = 10;
    int threads = 1;
    SolverFlags solver{1e-3};

    int run(std::ostream& os) const {
        std::optional<SampleCov> scm;
        long long n_samples = samples;
        if (returns) {
            const ReturnsTable table = read_returns_csv(input);
            scm.emplace(sample_covariance(table.returns.transpose()));
            if (n_samples == 0) n_samples = table.returns.rows();
        } else {
            scm.emplace(read_matrix_csv(input));
        }
        if (n_samples < 1) throw UsageError("rank: --N is required unless --returns is given");
        const RankScan scan =
            select_rank(*scm, n_samples, std::min(r_max, scm->dim() - 1), solver.config(), threads);
        json report = rank_report(scan, n_samples);
        if (!truth.empty()) {
            const Matrix t = read_matrix_csv(truth);
            report["error"] = {{"faan", normalized_frobenius_error(scan.chosen_fit().covariance(), t)},
                               {"scm", normalized_frobenius_error(scm->matrix(), t)}};
        }
        emit(out, dump(report), os);
        return ok;
    }
};

struct DoaCmd {
    std::string config_path, sweep = "N", out;
    std::vector<double> values;
    int trials = 200;
    std::uint64_t seed = 0;
    double grid_step = 1e-4;
    int threads = 1;
    SolverFlags solver{1e-6};

    ArrayScenario scenario() const {
        ArrayScenario scn = default_scenario(seed);
        if (config_path.empty()) return scn;
        std::ifstream in(config_path);
        if (!in) throw FileError("cannot open: " + config_path);
        const json cfg = json::parse(in);
        scn.n = cfg.value("n", scn.n);
        scn.freqs = cfg.value("freqs", scn.freqs);
        scn.snapshots = cfg.value("snapshots", scn.snapshots);
        scn.snr_db = cfg.value("snr_db", scn.snr_db);
        if (cfg.contains("noise_var")) {
            const auto v = cfg.at("noise_var").get<std::vector<double>>();
            scn.noise_var = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
        } else {
            scn.noise_var = draw_noise_variances(scn.n, ~seed);
        }
        return scn;
    }

    int run(std::ostream& os) const {
        const SweepVariable var = sweep == "N" ? SweepVariable::snapshots : SweepVariable::snr_db;
        std::vector<double> grid = values;
        if (grid.empty())
            grid = var == SweepVariable::snapshots ? std::vector<double>{40, 60, 80, 100, 150, 200, 300, 400, 500}
                                                   : std::vector<double>{-10, -5, 0, 5, 10};
        if (var == SweepVariable::snapshots)
            for (double v : grid)
                if (v < 1 || v != static_cast<int>(v)) throw std::invalid_argument("--values: N must be a positive integer");
        DoaStudyOptions opts;
        opts.trials = trials;
        opts.grid_step = grid_step;
        opts.solver = solver.config();
        opts.threads = threads;
        const auto rows = rmse_sweep(scenario(), var, grid, opts);
        std::ostringstream s;
        write_rmse_csv(s, var, rows);
        emit(out, s.str(), os);
        return ok;
    }
};

struct BacktestCmd {
    std::string input, out, csv, singular = "skip";
    std::vector<int> lookbacks{60};
    std::vector<std::string> estimators{"faan_bic"};
    int rebalance = 20, horizon = 84, r_max = 10, threads = 1;
    bool sample_std = false;
    SolverFlags solver{1e-3};

    int run(std::ostream& os) const {
        const ReturnsTable table = read_returns_csv(input);
        json runs = json::array();
        std::vector<MedianRow> medians;
        for (int lookback : lookbacks) {
            for (const auto& name : estimators) {
                BacktestSpec spec;
                spec.lookback_N = lookback;
                spec.rebalance_days = rebalance;
                spec.horizon_days = horizon;
                spec.estimator = estimator_from_string(name);
                spec.r_max = r_max;
                spec.singular = singular_policy_from_string(singular);
                spec.sample_std = sample_std;
                spec.solver = solver.config();
                spec.threads = threads;
                const BacktestResult result = run_backtest(table.returns, spec);
                runs.push_back(backtest_report(result, spec));
                medians.push_back({lookback, spec.estimator, result.median_std});
            }
        }
        std::string csv_text;
        if (!csv.empty()) {
            std::ostringstream s;
            write_median_csv(s, medians);
            csv_text = s.str();
        }
        emit(out, dump(json{{"assets", table.assets}, {"runs", runs}}), os);
        if (!csv.empty()) emit(csv, csv_text, os);
        return ok;
    }
};

struct SynthCmd {
    std::string kind = "returns", out, cov_out;
    int n = 0, r = 3, T = 500, snapshots = 80;
    double snr_db = 0;
    std::uint64_t seed = 0;

    int run(std::ostream& os) const {
        std::ostringstream s;
        if (kind == "frisch") {
            write_matrix_csv(s, frisch_test_matrix(n > 0 ? n : 5, seed).matrix());
        } else if (kind == "doa") {
            ArrayScenario scn = default_scenario(seed);
            if (n > 0) {
                scn.n = n;
                scn.noise_var = draw_noise_variances(n, ~seed);
            }
            scn.snapshots = snapshots;
            scn.snr_db = snr_db;
            write_matrix_csv(s, simulate_array(scn));
        } else if (kind == "returns") {
            const int dim = n > 0 ? n : 40;
            ReturnsTable table;
            for (int i = 0; i < dim; ++i) table.assets.push_back("a" + std::to_string(i));
            const FactorModel model = synth_factor_model(dim, r, snr_db, seed);
            table.returns = synth_factor_returns(model, T, seed ^ 0x9e3779b97f4a7c15ULL);
            write_returns_csv(s, table);
            if (!cov_out.empty()) {
                std::ostringstream c;
                write_matrix_csv(c, model.covariance());
                emit(cov_out, c.str(), os);
            }
        } else {
            throw std::invalid_argument("unknown --kind: " + kind);
        }
        emit(out, s.str(), os);
        return ok;
    }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Low-rank plus diagonal covariance estimation"};
    app.name("faan");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    FitCmd fit_cmd;
    auto* fit_sc = app.add_subcommand("fit", "Fit R = SS^T + Sigma to a covariance matrix file");
    fit_sc->add_option("matrix", fit_cmd.input, "Square matrix CSV")->required();
    fit_sc->add_option("--method", fit_cmd.method, "faan, fnm, fnm_o or isotropic")
        ->check(CLI::IsMember({"faan", "fnm", "fnm_o", "isotropic"}))
        ->capture_default_str();
    fit_sc->add_option("--rank", fit_cmd.rank, "Number of factors r")->capture_default_str();
    fit_sc->add_option("--out", fit_cmd.out, "JSON report path (default stdout)");
    fit_cmd.solver.add_to(fit_sc, true);

    BoundsCmd bounds_cmd;
    auto* bounds_sc = app.add_subcommand("bounds", "Rank bounds, parameter counts and identifiability");
    bounds_sc->add_option("matrix", bounds_cmd.input, "Square matrix CSV");
    bounds_sc->add_option("--n", bounds_cmd.n, "Dimension (when no matrix is given)");
    bounds_sc->add_option("--rank", bounds_cmd.rank, "Report only this rank");

    RankCmd rank_cmd;
    auto* rank_sc = app.add_subcommand("rank", "Select the number of factors by BIC");
    rank_sc->add_option("matrix", rank_cmd.input, "Sample covariance CSV")->required();
    rank_sc->add_option("--N", rank_cmd.samples, "Number of samples behind the matrix");
    rank_sc->add_flag("--returns", rank_cmd.returns, "Input is a returns table; uses its uncentered SCM and N = rows");
    rank_sc->add_option("--truth", rank_cmd.truth, "True covariance CSV; adds normalized errors to the report");
    rank_sc->add_option("--rmax", rank_cmd.r_max, "Largest rank scanned")->capture_default_str();
    rank_sc->add_option("--threads", rank_cmd.threads, "Worker threads")->default_val(default_thread_count());
    rank_sc->add_option("--out", rank_cmd.out, "JSON report path (default stdout)");
    rank_cmd.solver.add_to(rank_sc, true);

    DoaCmd doa_cmd;
    auto* doa_sc = app.add_subcommand("doa-sim", "Monte-Carlo MUSIC RMSE sweep");
    doa_sc->add_option("--config", doa_cmd.config_path, "Scenario JSON (n, freqs, snapshots, snr_db, noise_var)");
    doa_sc->add_option("--sweep", doa_cmd.sweep, "N or snr")->check(CLI::IsMember({"N", "snr"}))->capture_default_str();
    doa_sc->add_option("--values", doa_cmd.values, "Sweep values")->delimiter(',');
    doa_sc->add_option("--trials", doa_cmd.trials, "Trials per value")->capture_default_str();
    doa_sc->add_option("--seed", doa_cmd.seed, "Base seed")->required();
    doa_sc->add_option("--grid-step", doa_cmd.grid_step, "Frequency grid step")->capture_default_str();
    doa_sc->add_option("--threads", doa_cmd.threads, "Worker threads")->default_val(default_thread_count());
    doa_sc->add_option("--out", doa_cmd.out, "CSV path (default stdout)");
    doa_cmd.solver.add_to(doa_sc, false);

    BacktestCmd bt_cmd;
    auto* bt_sc = app.add_subcommand("backtest", "Rolling minimum-variance portfolio backtest");
    bt_sc->add_option("returns", bt_cmd.input, "Returns CSV with a header of asset ids")->required();
    bt_sc->add_option("--lookback", bt_cmd.lookbacks, "Lookback window(s) N")->delimiter(',')->capture_default_str();
    bt_sc->add_option("--estimator", bt_cmd.estimators, "faan_bic, scm, equal_weight")
        ->delimiter(',')
        ->check(CLI::IsMember({"faan_bic", "scm", "equal_weight"}))
        ->capture_default_str();
    bt_sc->add_option("--rebalance", bt_cmd.rebalance, "Days between investment dates")->capture_default_str();
    bt_sc->add_option("--horizon", bt_cmd.horizon, "Out-of-sample days per date")->capture_default_str();
    bt_sc->add_option("--rmax", bt_cmd.r_max, "Largest rank scanned by BIC")->capture_default_str();
    bt_sc->add_option("--singular", bt_cmd.singular, "skip or min_norm")
        ->check(CLI::IsMember({"skip", "min_norm"}))
        ->capture_default_str();
    bt_sc->add_flag("--sample-std", bt_cmd.sample_std, "Divide by horizon - 1");
    bt_sc->add_option("--threads", bt_cmd.threads, "Worker threads")->default_val(default_thread_count());
    bt_sc->add_option("--out", bt_cmd.out, "JSON report path (default stdout)");
    bt_sc->add_option("--csv", bt_cmd.csv, "CSV of N,estimator,median_std");
    bt_cmd.solver.add_to(bt_sc, false);

    SynthCmd synth_cmd;
    auto* synth_sc = app.add_subcommand("synth", "Generate synthetic inputs");
    synth_sc->add_option("--kind", synth_cmd.kind, "doa, returns or frisch")
        ->check(CLI::IsMember({"doa", "returns", "frisch"}))
        ->capture_default_str();
    synth_sc->add_option("--n", synth_cmd.n, "Dimension (default 15 / 40 / 5 by kind)");
    synth_sc->add_option("--r", synth_cmd.r, "Factors (returns)")->capture_default_str();
    synth_sc->add_option("--snr", synth_cmd.snr_db, "SNR in dB (doa, returns)")->capture_default_str();
    synth_sc->add_option("--T", synth_cmd.T, "Rows (returns)")->capture_default_str();
    synth_sc->add_option("--N", synth_cmd.snapshots, "Snapshots (doa)")->capture_default_str();
    synth_sc->add_option("--seed", synth_cmd.seed, "Seed")->required();
    synth_sc->add_option("--out", synth_cmd.out, "Output path (default stdout)");
    synth_sc->add_option("--cov-out", synth_cmd.cov_out, "Write the true covariance CSV (returns)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (fit_sc->parsed()) return fit_cmd.run(out);
        if (bounds_sc->parsed()) return bounds_cmd.run(out);
        if (rank_sc->parsed()) return rank_cmd.run(out);
        if (doa_sc->parsed()) return doa_cmd.run(out);
        if (bt_sc->parsed()) return bt_cmd.run(out);
        if (synth_sc->parsed()) return synth_cmd.run(out);
    } catch (const UsageError& e) {
        err << "faan: " << e.what() << '\n';
        return usage;
    } catch (const FileError& e) {
        err << "faan: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        err << "faan: " << e.what() << '\n';
        return failure;
    }
    return usage;
}

}  // namespace faan::cli
