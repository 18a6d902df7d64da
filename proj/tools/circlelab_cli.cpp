// circlelab — command-line front end for the short-interval binary-problem
// laboratory. Subcommands wire the core modules into reproducible runs with
// CSV/JSON output. Exit codes: 0 success, 1 validation error, 2 flagged
// non-convergence, 3 internal error. Data goes to stdout or --out; all
// diagnostics go to stderr.

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "circlelab/experiments.hpp"
#include "circlelab/expsums.hpp"
#include "circlelab/io.hpp"
#include "circlelab/parallel.hpp"
#include "circlelab/quadrature.hpp"
#include "circlelab/representations.hpp"
#include "circlelab/sieve.hpp"
#include "circlelab/special.hpp"

namespace {

using namespace circlelab;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNonConverged = 2;
constexpr int kExitInternal = 3;

struct CommonOpts {
    unsigned threads = 0;  // 0 = auto
    std::string cache_dir;
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--threads", c.threads, "worker threads (0 = hardware)");
    cmd->add_option("--cache-dir", c.cache_dir, "sieve cache directory");
    cmd->add_option("--out", c.out, "output path (default: stdout)");
    cmd->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

void apply_common(const CommonOpts& c) {
    set_max_threads(c.threads);
    // CIRCLE_LAB_CACHE wins over the flag
    const char* env = std::getenv("CIRCLE_LAB_CACHE");
    if (env && *env)
        sieve::set_cache_dir(env);
    else if (!c.cache_dir.empty())
        sieve::set_cache_dir(c.cache_dir);
}

void emit(const CommonOpts& c, const std::string& payload) {
    if (c.out.empty()) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        if (!payload.empty() && payload.back() != '\n') std::fputc('\n', stdout);
    } else {
        io::write_file(c.out, payload);
    }
}

struct WindowOpts {
    int ell1 = 2, ell2 = 3;
    std::uint64_t n = 0;
    std::uint64_t h = 0;
    double h_exp = 0.0;
    double d = 1.0;

    void add_to(CLI::App* cmd, bool need_window = true) {
        cmd->add_option("--ell1", ell1, "first exponent");
        cmd->add_option("--ell2", ell2, "second exponent");
        cmd->add_option("--n", n, "window base N")->required();
        if (need_window) {
            cmd->add_option("--h", h, "window length H");
            cmd->add_option("--h-exp", h_exp, "window exponent theta, H = ceil(N^theta)");
        }
        cmd->add_option("--d", d, "A-factor exponent d (A = exp(d (log N/log log N)^{1/3}))");
    }

    special::ProblemParams params() const {
        special::ProblemParams p;
        p.ell1 = ell1;
        p.ell2 = ell2;
        p.n = n;
        p.h = h != 0 ? h : (h_exp > 0.0 ? special::ProblemParams::h_from_exponent(n, h_exp) : 0);
        p.d = d;
        if (p.h == 0) throw CLI::ValidationError("--h or --h-exp is required");
        return p;
    }
};

int run_count(const CommonOpts& c, const WindowOpts& w, const std::string& problem) {
    apply_common(c);
    const auto p = w.params();
    p.validate();
    representations::Window win{p.n, p.h};
    representations::RepresentationSeries series =
        problem == "rpp" ? representations::count_R(win, p.ell1, p.ell2)
                         : representations::count_r_prime(win, p.ell1, p.ell2, p.a_value());
    if (!c.out.empty()) {
        representations::export_csv(series, c.out);
    } else {
        io::CsvWriter csv;
        csv.row("n", "value");
        for (std::size_t i = 0; i < series.values.size(); ++i)
            csv.row(win.n + 1 + i, series.values[i]);
        std::fwrite(csv.str().data(), 1, csv.str().size(), stdout);
    }
    return kExitOk;
}

int run_verify(const CommonOpts& c, const WindowOpts& w, const std::string& problem) {
    apply_common(c);
    const auto p = w.params();
    const auto kind = problem == "rpp" ? representations::CountKind::Rpp
                                       : representations::CountKind::rPrime;
    const auto chk = experiments::verify_average(p, kind);
    if (!chk.h_in_range) std::fprintf(stderr, "warning: %s\n", chk.note.c_str());
    emit(c, experiments::report_json(chk));
    return kExitOk;
}

int run_expsum(const CommonOpts& c, const WindowOpts& w, const std::string& kind_str,
               double alpha, bool have_alpha, double tail_eps, const std::string& dump) {
    apply_common(c);
    using expsums::SeriesKind;
    SeriesKind kind;
    if (kind_str == "stilde") kind = SeriesKind::StildeSeries;
    else if (kind_str == "vtilde") kind = SeriesKind::VtildeSeries;
    else if (kind_str == "s") kind = SeriesKind::Sfinite;
    else if (kind_str == "v") kind = SeriesKind::Vfinite;
    else if (kind_str == "t") kind = SeriesKind::Tfinite;
    else if (kind_str == "f") kind = SeriesKind::Ffinite;
    else if (kind_str == "u") kind = SeriesKind::Usum;
    else throw CLI::ValidationError("unknown --kind " + kind_str);

    const unsigned ell = static_cast<unsigned>(w.ell1);
    expsums::CoefficientSeries series = [&] {
        switch (kind) {
            case SeriesKind::StildeSeries: return expsums::build_s_tilde(ell, w.n, tail_eps);
            case SeriesKind::VtildeSeries: return expsums::build_v_tilde(ell, w.n, tail_eps);
            case SeriesKind::Usum: return expsums::build_u(w.h != 0 ? w.h : w.n);
            default:
                return expsums::build_finite(kind, static_cast<double>(w.ell1), w.n,
                                             special::a_factor(w.n, w.d));
        }
    }();

    if (!dump.empty()) expsums::dump_series_csv(series, dump);

    io::JsonObject j;
    j.add("schema_version", 1);
    j.add("kind", expsums::kind_name(kind));
    j.add("terms", static_cast<std::uint64_t>(series.size()));
    j.add("max_frequency", series.max_frequency());
    if (have_alpha) {
        const auto v = series.value_at(alpha);
        j.add("alpha", alpha);
        j.add("value", v);
        j.add("abs", std::abs(v));
    } else {
        j.add("weight_sum", series.weight_sum());
        j.add("parseval", series.parseval());
    }
    emit(c, j.str());
    return kExitOk;
}

int run_meansquare(const CommonOpts& c, const WindowOpts& w, const std::string& kind_str,
                   double tau, double omega, double tail_eps) {
    apply_common(c);
    using expsums::SeriesKind;
    const unsigned ell = static_cast<unsigned>(w.ell1);
    const double k = static_cast<double>(w.ell1);
    expsums::CoefficientSeries series = [&] {
        if (kind_str == "stilde") return expsums::build_s_tilde(ell, w.n, tail_eps);
        if (kind_str == "vtilde") return expsums::build_v_tilde(ell, w.n, tail_eps);
        if (kind_str == "v")
            return expsums::build_finite(SeriesKind::Vfinite, k, w.n, special::a_factor(w.n, w.d));
        if (kind_str == "t")
            return expsums::build_finite(SeriesKind::Tfinite, k, w.n, special::a_factor(w.n, w.d));
        throw CLI::ValidationError("meansquare: --kind must be stilde|vtilde|v|t");
    }();

    const double nd = static_cast<double>(w.n);
    const double l = std::log(nd);
    io::JsonObject j;
    j.add("schema_version", 1);
    j.add("kind", kind_str);
    if (tau > 0.0) {
        const double v = quadrature::mean_square(series, tau);
        const double env = (tau * std::pow(nd, 1.0 / k) + std::pow(nd, 2.0 / k - 1.0)) * l * l * l;
        j.add("tau", tau);
        j.add("value", v);
        j.add("envelope", env);
        j.add("ratio", v / env);
    } else {
        const double v = quadrature::tail_mean_square(series, omega);
        const double env = std::pow(nd, 2.0 / k - 1.0) / omega * l * l * l;
        j.add("omega", omega);
        j.add("value", v);
        j.add("envelope", env);
        j.add("ratio", v / env);
    }
    emit(c, j.str());
    return kExitOk;
}

int run_laplace(const CommonOpts& c, std::uint64_t n, std::uint64_t big_n, double mu, double x) {
    apply_common(c);
    const auto lhs = quadrature::laplace_lhs(n, big_n, mu, x);
    const double rhs = special::laplace_rhs(n, big_n, mu);
    io::JsonObject j;
    j.add("schema_version", 1);
    j.add("lhs", lhs.value);
    j.add("rhs", rhs);
    j.add("diff", std::abs(lhs.value - rhs));
    j.add("envelope", 1.0 / (static_cast<double>(n) * std::pow(x, mu)));
    j.add("converged", lhs.converged);
    emit(c, j.str());
    return lhs.converged ? kExitOk : kExitNonConverged;
}

int run_scan(const CommonOpts& c, const std::string& lemma, const std::vector<std::uint64_t>& ns,
             std::uint64_t n_for_rh, const std::string& out_dir) {
    apply_common(c);
    experiments::BoundScanReport report;
    if (lemma == "rh_error") {
        report = experiments::error_vs_H(2, 3, n_for_rh, {0.75, 0.8, 0.85, 0.9, 0.95});
    } else {
        const auto scan = experiments::scan_from_name(lemma);
        if (!scan) throw CLI::ValidationError("unknown --lemma " + lemma);
        auto opt = experiments::default_scan_options(*scan);
        if (!ns.empty()) opt.n_values = ns;
        report = experiments::scan_lemma(*scan, opt);
    }

    bool flagged = false;
    for (const auto& row : report.rows)
        if (row.flag.find("nonconverged") != std::string::npos) flagged = true;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::string base = out_dir + "/" + experiments::report_basename(report);
        io::write_file(base + ".json", experiments::report_json(report) + "\n");
        io::write_file(base + ".csv", experiments::report_csv(report));
        std::fprintf(stderr, "wrote %s.{json,csv}\n", base.c_str());
    }
    emit(c, c.format == "csv" ? experiments::report_csv(report)
                              : experiments::report_json(report));
    return flagged ? kExitNonConverged : kExitOk;
}

int run_decompose(const CommonOpts& c, const WindowOpts& w, const std::string& level,
                  double b_exp, double tail_eps) {
    apply_common(c);
    const auto p = w.params();
    experiments::DecompositionReport report;
    if (level == "series")
        report = experiments::decompose_series_problem(p, b_exp, tail_eps);
    else if (level == "main")
        report = experiments::decompose_main_term(p, b_exp, tail_eps);
    else if (level == "rh")
        report = experiments::decompose_rh_problem(p, tail_eps);
    else
        throw CLI::ValidationError("--level must be series|main|rh");
    emit(c, experiments::report_json(report));
    return report.all_converged ? kExitOk : kExitNonConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circle-method laboratory for binary prime-power problems"};
    app.require_subcommand(1);
    // --h is a data flag here, so the short help alias must go
    app.set_help_flag("--help", "print help");

    // count
    auto* count = app.add_subcommand("count", "weighted representation counts over a window");
    CommonOpts count_c;
    WindowOpts count_w;
    std::string count_problem = "rpp";
    add_common(count, count_c);
    count_w.add_to(count);
    count->add_option("--problem", count_problem, "rpp or rprime")
        ->check(CLI::IsMember({"rpp", "rprime"}));

    // verify
    auto* verify = app.add_subcommand("verify", "window average vs predicted density");
    CommonOpts verify_c;
    WindowOpts verify_w;
    std::string verify_problem = "rpp";
    add_common(verify, verify_c);
    verify_w.add_to(verify);
    verify->add_option("--problem", verify_problem, "rpp or rprime")
        ->check(CLI::IsMember({"rpp", "rprime"}));

    // expsum
    auto* expsum = app.add_subcommand("expsum", "build/evaluate an exponential sum");
    CommonOpts expsum_c;
    WindowOpts expsum_w;
    std::string expsum_kind = "u";
    double expsum_alpha = 0.0, expsum_tail = 1e-8;
    std::string expsum_dump;
    bool expsum_have_alpha = false;
    add_common(expsum, expsum_c);
    expsum->add_option("--kind", expsum_kind, "stilde|vtilde|s|v|t|f|u")->required();
    expsum->add_option("--ell", expsum_w.ell1, "exponent ell (or integer k)");
    expsum->add_option("--k", expsum_w.ell1, "alias of --ell");
    expsum->add_option("--n", expsum_w.n, "N (series/finite kinds)");
    expsum->add_option("--h", expsum_w.h, "H (u kind)");
    expsum->add_option("--d", expsum_w.d, "A-factor exponent");
    expsum->add_option("--tail-eps", expsum_tail, "series truncation budget");
    auto* alpha_opt = expsum->add_option("--alpha", expsum_alpha, "evaluate at alpha");
    expsum->add_option("--dump", expsum_dump, "write frequency,weight CSV + JSON sidecar");

    // meansquare
    auto* ms = app.add_subcommand("meansquare", "mean squares and |alpha|-weighted tails");
    CommonOpts ms_c;
    WindowOpts ms_w;
    std::string ms_kind = "stilde";
    double ms_tau = 0.0, ms_omega = 0.0, ms_tail = 1e-8;
    add_common(ms, ms_c);
    ms->add_option("--kind", ms_kind, "stilde|vtilde|v|t");
    ms->add_option("--ell", ms_w.ell1, "exponent");
    ms->add_option("--k", ms_w.ell1, "alias of --ell");
    ms->add_option("--n", ms_w.n, "N")->required();
    ms->add_option("--d", ms_w.d, "A-factor exponent");
    ms->add_option("--tau", ms_tau, "central interval [-tau, tau]");
    ms->add_option("--omega", ms_omega, "tail I(omega) with dalpha/|alpha|");
    ms->add_option("--tail-eps", ms_tail, "series truncation budget");

    // laplace
    auto* lap = app.add_subcommand("laplace", "z^{-mu} oscillatory integral vs closed form");
    CommonOpts lap_c;
    std::uint64_t lap_n = 0, lap_big_n = 0;
    double lap_mu = 0.5, lap_x = 0.5;
    add_common(lap, lap_c);
    lap->add_option("--mu", lap_mu, "exponent mu > 0")->required();
    lap->add_option("--n", lap_n, "oscillation parameter n")->required();
    lap->add_option("--big-n", lap_big_n, "N in z = 1/N - 2 pi i alpha")->required();
    lap->add_option("--x", lap_x, "half-width X of the integration range");

    // scan
    auto* scan = app.add_subcommand("scan", "lemma-level bound ratio scans");
    CommonOpts scan_c;
    std::string scan_lemma_name;
    std::vector<std::uint64_t> scan_ns;
    std::uint64_t scan_rh_n = 1000000;
    std::string scan_out_dir;
    add_common(scan, scan_c);
    scan->add_option("--lemma", scan_lemma_name,
                     "tolev_series|tolev_finite|zac_l2|tails|sv_diff|tf_diff|lp_meansquare|"
                     "f_l2|u_moments|weighted_ms|ek_meansquare|w_integral|rh_error")
        ->required();
    scan->add_option("--n-list", scan_ns, "override the N grid (or H grid for u_moments)");
    scan->add_option("--rh-n", scan_rh_n, "N for the rh_error family");
    scan->add_option("--out-dir", scan_out_dir, "write <lemma>_<hash>.{json,csv} here");

    // decompose
    auto* dec = app.add_subcommand("decompose", "window-integral dissections");
    CommonOpts dec_c;
    WindowOpts dec_w;
    std::string dec_level = "series";
    double dec_b_exp = 0.1, dec_tail = 1e-12;
    add_common(dec, dec_c);
    dec_w.add_to(dec);
    dec->add_option("--level", dec_level, "series (I), main (frak I), rh (J)");
    dec->add_option("--b-exp", dec_b_exp, "B = N^{b-exp}");
    dec->add_option("--tail-eps", dec_tail, "series truncation budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints help/errors
        return e.get_exit_code() == 0 ? kExitOk : kExitValidation;
    }
    expsum_have_alpha = alpha_opt->count() > 0;

    try {
        if (count->parsed()) return run_count(count_c, count_w, count_problem);
        if (verify->parsed()) return run_verify(verify_c, verify_w, verify_problem);
        if (expsum->parsed())
            return run_expsum(expsum_c, expsum_w, expsum_kind, expsum_alpha, expsum_have_alpha,
                              expsum_tail, expsum_dump);
        if (ms->parsed()) return run_meansquare(ms_c, ms_w, ms_kind, ms_tau, ms_omega, ms_tail);
        if (lap->parsed()) return run_laplace(lap_c, lap_n, lap_big_n, lap_mu, lap_x);
        if (scan->parsed())
            return run_scan(scan_c, scan_lemma_name, scan_ns, scan_rh_n, scan_out_dir);
        if (dec->parsed()) return run_decompose(dec_c, dec_w, dec_level, dec_b_exp, dec_tail);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitValidation;
}
