// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "oracles.hpp"

#include "faan/bounds.hpp"
#include "faan/doa.hpp"
#include "faan/matrix_io.hpp"
#include "faan/portfolio.hpp"
#include "faan/ranksel.hpp"
#include "faan/solvers.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace faan;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Residual {
    std::string label;
    double value;
};

// diagonal matching residuals of every converged FAAN fit produced below
std::vector<Residual> converged_fits;

void record(const std::string& label, const SampleCov& scm, const FactorFit& f) {
    if (f.method == Method::faan && f.converged)
        converged_fits.push_back({label, diagonal_matching_residual(scm, f)});
}

SampleCov fixture(const char* name) { return SampleCov(read_matrix_csv(oracle::fixture(name))); }

SolverConfig config(SigmaInit init, double epsilon, int max_iter) {
    SolverConfig c;
    c.sigma_init = init;
    c.epsilon = epsilon;
    c.max_iter = max_iter;
    return c;
}

// largest relative step-to-step increase of a loss trace
double worst_increase(const std::vector<double>& trace) {
    double worst = 0;
    for (std::size_t i = 1; i < trace.size(); ++i)
        worst = std::max(worst, (trace[i] - trace[i - 1]) / std::max(std::abs(trace[i - 1]), 1.0));
    return worst;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Outcome golden_frobenius() {
    Outcome o;
    const SampleCov scm = fixture("example_6x6.csv");
    const Vector fnmo_expected = (Vector(6) << 0.8169, 1.9891, 3.1945, -1.4386, 5.3600, -8.0505).finished();
    const Vector fnm_expected = (Vector(6) << 0.7771, 1.5755, 2.8302, 0, 5.0082, 0).finished();
    Matrix ss_expected(6, 6);
    ss_expected << 0.3202, -0.9520, 0.1943, -1.3001, 0.7656, -1.1482, -0.9520, 2.9223, -0.3419, 4.3355, -2.2416,
        2.8172, 0.1943, -0.3419, 0.7264, 0.4222, 0.5551, -2.2374, -1.3001, 4.3355, 0.4222, 7.6905, -2.9293, 1.5966,
        0.7656, -2.2416, 0.5551, -2.9293, 1.8444, -2.9748, -1.1482, 2.8172, -2.2374, 1.5966, -2.9748, 8.0179;

    const FactorFit fo = fnmo_fit(FitRequest{scm, 2, config(SigmaInit::identity, 1e-10, 500), Method::fnm_o});
    const double e_o = (fo.sigma_sq - fnmo_expected).cwiseAbs().maxCoeff();
    const FactorFit fa = fnm_fit(FitRequest{scm, 2, config(SigmaInit::identity, 1e-10, 1000), Method::fnm});
    const FactorFit fb = fnm_fit(FitRequest{scm, 2, config(SigmaInit::diag_of_scm, 1e-10, 1000), Method::fnm});
    const double e_s = (fa.sigma_sq - fnm_expected).cwiseAbs().maxCoeff();
    const double e_ss = (fa.ssT - ss_expected).cwiseAbs().maxCoeff();
    const double e_init = (fa.sigma_sq - fb.sigma_sq).cwiseAbs().maxCoeff();

    std::ostringstream s;
    s << "fnm_o max|dSigma| " << fmt(e_o) << " (sigma_6 = " << fmt(fo.sigma_sq(5)) << "), fnm max|dSigma| "
      << fmt(e_s) << ", max|dSS^T| " << fmt(e_ss) << ", init gap " << fmt(e_init);
    o.detail = s.str();
    o.pass = e_o <= 1e-3 && !fo.feasible && e_s <= 1e-3 && e_ss <= 1e-3 && e_init <= 1e-6;
    return o;
}

Outcome faan_monotone_example() {
    const SampleCov scm = fixture("example_5x5.csv");
    const FactorFit f = faan_fit(FitRequest{scm, 3, config(SigmaInit::identity, 1e-3, 1000)});
    record("5x5 fixture, eps 1e-3", scm, f);
    const double worst = worst_increase(f.loss_trace);
    Outcome o;
    o.pass = f.converged && worst <= 1e-10;
    o.detail = "passes " + std::to_string(f.loss_trace.size()) + ", converged " + (f.converged ? "yes" : "no") +
               ", worst relative increase " + fmt(worst);
    return o;
}

Outcome faan_monotone_at_scale() {
    std::mt19937_64 rng(2024);
    double worst = 0;
    int bad = 0, runs = 0;
    const auto t0 = std::chrono::steady_clock::now();
    auto check = [&](int n, int samples, int r, SolverConfig cfg, const std::string& label) {
        const Matrix y = oracle::gaussian_matrix(n, samples, rng);
        const SampleCov scm = sample_covariance(y);
        const FactorFit f = faan_fit(FitRequest{scm, r, cfg});
        record(label, scm, f);
        const double w = worst_increase(f.loss_trace);
        worst = std::max(worst, w);
        bad += w > 1e-10;
        ++runs;
    };
    for (int k = 0; k < 100; ++k) check(10, 20, 4, config(SigmaInit::diag_of_scm, 1e-8, 5000), "n=10 #" + std::to_string(k));
    for (int k = 0; k < 3; ++k) check(200, 400, 20, config(SigmaInit::diag_of_scm, 1e-6, 1000), "n=200 #" + std::to_string(k));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome o;
    o.pass = bad == 0 && secs < 60;
    o.detail = std::to_string(runs) + " runs, " + std::to_string(bad) + " non-monotone, worst relative increase " +
               fmt(worst) + ", " + fmt(secs) + " s";
    return o;
}

Outcome diagonal_matching() {
    // tight refits of both fixtures join the converged fits collected so far
    for (const char* name : {"example_5x5.csv", "example_6x6.csv"}) {
        const SampleCov scm = fixture(name);
        for (int r : {1, 2, 3}) {
            const FactorFit f = faan_fit(FitRequest{scm, r, config(SigmaInit::diag_of_scm, 1e-12, 100000)});
            record(std::string(name) + " r=" + std::to_string(r) + " eps 1e-12", scm, f);
        }
    }
    Outcome o;
    double worst = 0;
    std::string worst_label;
    int bad = 0;
    for (const auto& r : converged_fits) {
        if (r.value >= 1e-6) ++bad;
        if (r.value > worst) {
            worst = r.value;
            worst_label = r.label;
        }
    }
    o.pass = bad == 0 && !converged_fits.empty();
    o.detail = std::to_string(converged_fits.size()) + " converged fits, " + std::to_string(bad) +
               " at or above 1e-6, worst " + fmt(worst) + " (" + worst_label + ")";
    return o;
}

Outcome bounds_suite() {
    Outcome o;
    const bool rl = ledermann_bound(6) == 3.0;
    const int iso = resolvable_sources(15, false);
    const int aniso = resolvable_sources(15, true);

    std::mt19937_64 rng(77);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        const Matrix a = oracle::random_symmetric(4, rng);
        const Matrix b = oracle::random_symmetric(4, rng);
        const Vector ea = sym_eigenvalues(a);
        const Vector eb = sym_eigenvalues(b);
        const double bound = ruhe_lower_bound({ea.data(), 4}, {eb.data(), 4});
        worst = std::max(worst, bound - (a * b).trace());
    }

    std::uniform_real_distribution<double> unit(-2, 2);
    double brute_gap = 0;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a(4), b(4);
        for (auto& v : a) v = unit(rng);
        for (auto& v : b) v = unit(rng);
        std::vector<double> sa = a, sb = b;
        std::sort(sa.rbegin(), sa.rend());
        std::sort(sb.rbegin(), sb.rend());
        brute_gap = std::max(brute_gap, std::abs(ruhe_lower_bound(sa, sb) - oracle::min_permuted_pairing(a, b)));
    }

    o.pass = rl && iso == 7 && aniso == 5 && worst <= 1e-10 && brute_gap <= 1e-12;
    o.detail = std::string("r_L(6) ") + fmt(ledermann_bound(6)) + ", sources " + std::to_string(iso) + "/" +
               std::to_string(aniso) + ", worst violation " + fmt(worst) + ", brute-force gap " + fmt(brute_gap);
    return o;
}

Outcome guttman_vs_ledermann() {
    Outcome o;
    std::ostringstream s;
    const auto t0 = std::chrono::steady_clock::now();
    for (int n : {5, 10, 20}) {
        std::vector<int> rg;
        bool capped = true;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            rg.push_back(guttman_bound(frisch_test_matrix(n, seed)));
            capped = capped && rg.back() <= n - 1;
        }
        const int mean_g = ceil_mean(rg);
        const int rl = static_cast<int>(std::ceil(ledermann_bound(n)));
        o.pass = o.pass && capped && mean_g >= rl;
        s << "n=" << n << ": ceil mean r_G " << mean_g << " vs ceil r_L " << rl << (capped ? "" : " (r_G > n-1)")
          << "; ";
    }
    s << fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) << " s";
    o.detail = s.str();
    return o;
}

Outcome bic_recovery() {
    const SolverConfig cfg = config(SigmaInit::diag_of_scm, 1e-3, 1000);
    int hits = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Matrix y = synth_factor_returns(40, 3, 0.0, 60, 1000 + s);
        const SampleCov scm = sample_covariance(y.transpose());
        const RankScan scan = select_rank(scm, 60, 10, cfg);
        hits += scan.chosen == 3;
        record("BIC trial " + std::to_string(s), scm, scan.chosen_fit());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome o;
    o.pass = hits >= 45 && secs < 60;
    o.detail = "P(r_hat = 3) = " + fmt(hits / 50.0) + ", " + fmt(secs) + " s";
    return o;
}

Outcome covariance_accuracy() {
    const SolverConfig cfg = config(SigmaInit::diag_of_scm, 1e-3, 1000);
    double e_faan = 0, e_scm = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const FactorModel m = synth_factor_model(40, 3, 0.0, 2000 + s);
        const Matrix y = synth_factor_returns(m, 80, 5000 + s);
        const SampleCov scm = sample_covariance(y.transpose());
        const FactorFit f = faan_fit(FitRequest{scm, 3, cfg});
        record("accuracy trial " + std::to_string(s), scm, f);
        e_faan += normalized_frobenius_error(f.covariance(), m.covariance()) / 50;
        e_scm += normalized_frobenius_error(scm.matrix(), m.covariance()) / 50;
    }
    Outcome o;
    o.pass = e_faan <= 0.95 * e_scm;
    o.detail = "mean error FAAN " + fmt(e_faan) + ", SCM " + fmt(e_scm) + ", ratio " + fmt(e_faan / e_scm);
    return o;
}

Outcome doa_music() {
    DoaStudyOptions opts;
    opts.trials = 200;
    opts.solver = config(SigmaInit::diag_of_scm, 1e-6, 1000);
    const std::vector<double> ns{40, 80, 500};
    const auto rows = rmse_sweep(default_scenario(7), SweepVariable::snapshots, ns, opts);
    auto at = [&](double n, const std::string& method) {
        for (const auto& r : rows)
            if (r.value == n && r.method == method) return r.rmse;
        return double(NAN);
    };
    const double faan80 = at(80, "faan_basis"), van80 = at(80, "vanilla");
    const double faan40 = at(40, "faan_basis"), faan500 = at(500, "faan_basis");
    Outcome o;
    o.pass = faan80 < van80 && faan500 < faan40;
    o.detail = "N=80 FAAN " + fmt(faan80) + " vs vanilla " + fmt(van80) + "; FAAN N=40 " + fmt(faan40) +
               ", N=500 " + fmt(faan500);
    return o;
}

Outcome portfolio_suite() {
    Outcome o;
    double sum_gap = 0;
    for (const char* name : {"example_5x5.csv", "example_6x6.csv", "identity_4.csv"}) {
        const Matrix r = read_matrix_csv(oracle::fixture(name));
        sum_gap = std::max(sum_gap, std::abs(min_norm_weights(r).sum() - 1));
        if (Eigen::LLT<Matrix>(r).info() == Eigen::Success)
            sum_gap = std::max(sum_gap, std::abs(min_variance_weights(r).sum() - 1));
    }
    std::mt19937_64 rng(31);
    double oracle_gap = 0;
    for (int k = 0; k < 20; ++k) {
        const Matrix r = oracle::random_spd(8 + k % 5, rng);
        const Vector w = min_variance_weights(r);
        sum_gap = std::max(sum_gap, std::abs(w.sum() - 1));
        oracle_gap = std::max(oracle_gap, (w - oracle::constrained_min_variance(r)).cwiseAbs().maxCoeff());
    }

    const Matrix ret = synth_factor_returns(40, 3, 0.0, 10 * 20 + 20 + 84, 99);
    std::ostringstream s;
    bool beats = true;
    for (int lb : {10, 15, 20}) {
        double med[2];
        int i = 0;
        for (Estimator e : {Estimator::faan_bic, Estimator::scm}) {
            BacktestSpec spec;
            spec.lookback_N = lb;
            spec.estimator = e;
            spec.singular = SingularPolicy::min_norm;
            spec.solver = config(SigmaInit::diag_of_scm, 1e-3, 1000);
            const BacktestResult res = run_backtest(ret, spec);
            for (const auto& d : res.dates)
                if (!d.skipped) sum_gap = std::max(sum_gap, std::abs(d.weights.sum() - 1));
            med[i++] = res.median_std;
        }
        beats = beats && med[0] < med[1];
        s << "N=" << lb << " faan_bic " << fmt(med[0]) << " scm " << fmt(med[1]) << "; ";
    }
    o.pass = sum_gap <= 1e-10 && oracle_gap <= 1e-8 && beats;
    o.detail = s.str() + "sum gap " + fmt(sum_gap) + ", oracle gap " + fmt(oracle_gap);
    return o;
}

Outcome isotropic_nesting() {
    std::mt19937_64 rng(55);
    double worst = -INFINITY;
    for (int k = 0; k < 50; ++k) {
        const int n = 5 + k % 8;
        const SampleCov scm(oracle::random_spd(n, rng));
        const int r = 1 + k % 3;
        const FactorFit iso = isotropic_ml(scm, r);
        const FactorFit fa = faan_fit(FitRequest{scm, r, config(SigmaInit::diag_of_scm, 1e-10, 20000)});
        record("nesting #" + std::to_string(k), scm, fa);
        const double gap = gaussian_loss(scm, fa.covariance()) - gaussian_loss(scm, iso.covariance());
        worst = std::max(worst, gap);
    }
    Outcome o;
    o.pass = worst <= 1e-9;
    o.detail = "max (FAAN loss - isotropic loss) " + fmt(worst);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        std::function<Outcome()> run;
        Outcome outcome;
    };
    std::vector<Criterion> criteria{
        {"Frobenius golden values", golden_frobenius, {}},
        {"FAAN monotone on 5x5 example", faan_monotone_example, {}},
        {"FAAN monotone at scale", faan_monotone_at_scale, {}},
        {"diagonal matching", diagonal_matching, {}},
        {"bounds", bounds_suite, {}},
        {"Guttman vs Ledermann", guttman_vs_ledermann, {}},
        {"BIC recovery", bic_recovery, {}},
        {"covariance accuracy", covariance_accuracy, {}},
        {"DOA MUSIC", doa_music, {}},
        {"portfolio", portfolio_suite, {}},
        {"isotropic nesting", isotropic_nesting, {}},
    };
    // diagonal matching inspects the fits collected by every other criterion
    const std::size_t last = 3;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < criteria.size(); ++i)
        if (i != last) order.push_back(i);
    order.push_back(last);
    for (std::size_t i : order) {
        try {
            criteria[i].outcome = criteria[i].run();
        } catch (const std::exception& e) {
            criteria[i].outcome = {false, std::string("exception: ") + e.what()};
        }
    }
    int failed = 0;
    for (const auto& c : criteria) {
        failed += !c.outcome.pass;
        std::cout << (c.outcome.pass ? "PASS " : "FAIL ") << c.name << ": " << c.outcome.detail << '\n';
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
