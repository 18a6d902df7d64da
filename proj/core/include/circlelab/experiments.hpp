#pragma once
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "circlelab/representations.hpp"
#include "circlelab/special.hpp"

namespace circlelab::experiments {

using special::Complex;

struct AverageCheck {
    double observed = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
    bool h_in_range = true;  // inside the driver's stated uniformity range
    std::string note;
};

// Window average of the chosen representation count against the predicted
// density. H outside the uniformity range warns (note + flag), never fails.
AverageCheck verify_average(const special::ProblemParams& p, representations::CountKind problem,
                            double eps = 0.05);

struct DecompositionReport {
    std::string name;
    std::vector<std::string> piece_names;
    std::vector<Complex> pieces;
    Complex total{0.0, 0.0};
    double reconstruction_residual = 0.0;
    bool all_converged = true;
    std::vector<std::string> notes;

    Complex piece_sum() const;
};

// Center/tail dissection of the smoothed window identity into I1..I4:
// I1 and I2 carry the smoothed Lambda-series factors split at |alpha| = B/H
// (exact coefficient kernels), I3 and I4 swap in the prime-series defect.
// total is the exact coefficient-space window integral.
DecompositionReport decompose_series_problem(const special::ProblemParams& p, double b_exponent,
                                             double tail_eps = 1e-12);

// Second-level dissection of I1 into the smooth approximant pieces (the
// main-term route): quadrature against z-powers; total is the exact I1.
DecompositionReport decompose_main_term(const special::ProblemParams& p, double b_exponent,
                                        double tail_eps = 1e-12);

// Full-interval dissection J1..J3 (no center/tail split); all pieces exact.
DecompositionReport decompose_rh_problem(const special::ProblemParams& p,
                                         double tail_eps = 1e-12);

enum class LemmaScan {
    tolev_series,
    tolev_finite,
    zac_l2,
    tails,
    sv_diff,
    tf_diff,
    lp_meansquare,
    f_l2,
    u_moments,
    weighted_ms,
    ek_meansquare,
    w_integral,
};

const char* scan_name(LemmaScan s);
std::optional<LemmaScan> scan_from_name(std::string_view name);
std::vector<LemmaScan> all_scans();

struct ScanRow {
    std::vector<double> params;  // aligned with BoundScanReport::param_names
    double lhs = 0.0;
    double rhs = 1.0;   // envelope with implicit constant 1
    double ratio = 0.0;
    std::string flag;   // "", "clamped", "nonconverged", ...
};

struct BoundScanReport {
    std::string name;
    std::vector<std::string> param_names;
    std::size_t growth_axis = 0;  // param column driving the trend check
    std::vector<ScanRow> rows;
    double max_ratio = 0.0;
    bool non_exploding = false;
    std::string conditional;  // "observational" for RH-shaped envelopes
};

struct ScanOptions {
    std::vector<std::uint64_t> n_values;
    std::vector<double> k_values;
    unsigned random_alphas = 64;
    std::uint64_t seed = 0x5eed5eedULL;
    double eps = 0.05;
    double d = 1.0;         // A-factor exponent
    double tail_eps = 1e-8;
    double h_exponent = 0.8;
};

ScanOptions default_scan_options(LemmaScan s);
BoundScanReport scan_lemma(LemmaScan s);
BoundScanReport scan_lemma(LemmaScan s, const ScanOptions& opt);

// |observed - predicted| against the conditional error envelope
//   H^2 N^{lambda-2} + H^{1/2} N^{1/l1 + 1/(2 l2) - 1/2} (log N)^3
// for a family of window exponents at fixed N (observational only).
BoundScanReport error_vs_H(int ell1, int ell2, std::uint64_t n,
                           const std::vector<double>& h_exponents);

// Trend over a ladder: non-increasing in the least-squares sense (fitted
// slope of dev vs log(growth) <= 0) and endpointwise (last <= first).
bool non_increasing_trend(const std::vector<double>& growth, const std::vector<double>& dev);

std::string report_json(const BoundScanReport& r);
std::string report_csv(const BoundScanReport& r);
std::string report_basename(const BoundScanReport& r);  // <lemma>_<params-hash>
std::string report_json(const DecompositionReport& r);
std::string report_json(const AverageCheck& c);

}  // namespace circlelab::experiments
