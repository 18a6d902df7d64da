#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "circlelab/special.hpp"

namespace circlelab::expsums {

using special::Complex;

// e(x) = exp(2 pi i x) machinery. Phases are reduced per term: the product
// freq*alpha is split with an fma so the fractional part keeps full double
// precision even for frequencies ~1e9 (a naive product loses ~30 bits there).
double reduced_phase(double freq, double alpha);  // freq*alpha mod 1, in [-1/2, 1/2]
Complex unit_phase(double frac);                  // e(frac)
Complex e_of(double freq, double alpha);          // e(freq*alpha), reduced

enum class SeriesKind {
    StildeSeries,  // sum over Lambda-support, smoothed, frequencies n^ell
    VtildeSeries,  // primes only, smoothed
    Sfinite,       // Lambda-weighted, localized to N/A <= m^k <= N
    Vfinite,       // primes only, localized
    Tfinite,       // unit weights, localized
    Ffinite,       // frequencies m, weights m^{1/k-1}/k, N/A <= m <= N
    Usum,          // frequencies 1..H, unit weights
};

const char* kind_name(SeriesKind k);

struct SeriesMeta {
    double k = 0.0;             // ell for series kinds, k for finite kinds
    std::uint64_t n = 0;        // N
    double a = 0.0;             // A (localized kinds), 0 when not applicable
    std::uint64_t h = 0;        // H (Usum), 0 when not applicable
    double tail_eps = 0.0;      // requested truncation budget (series kinds)
    double tail_dropped = 0.0;  // actual dropped weight mass
};

// A truncated exponential sum sum_j w_j e(f_j alpha) with strictly ascending
// nonnegative integer frequencies. Immutable after construction; value_at is
// pure and callable from any thread.
class CoefficientSeries {
public:
    CoefficientSeries(SeriesKind kind, std::vector<std::uint64_t> freqs,
                      std::vector<double> weights, SeriesMeta meta);

    SeriesKind kind() const { return kind_; }
    const std::vector<std::uint64_t>& frequencies() const { return freqs_; }
    const std::vector<double>& weights() const { return weights_; }
    const SeriesMeta& meta() const { return meta_; }
    std::size_t size() const { return freqs_.size(); }
    std::uint64_t max_frequency() const { return freqs_.empty() ? 0 : freqs_.back(); }

    // Compensated evaluation in ascending frequency order. Usum takes the
    // geometric closed form for |alpha| >= 1e-9; contiguous frequency runs
    // use a rotation recurrence re-anchored every 256 steps.
    Complex value_at(double alpha) const;

    // direct compensated loop, no closed form, no recurrence (oracle path)
    Complex value_at_direct(double alpha) const;

    double weight_sum() const;  // = value_at(0), real
    double parseval() const;    // sum of squared weights

private:
    SeriesKind kind_;
    std::vector<std::uint64_t> freqs_;
    std::vector<double> weights_;
    SeriesMeta meta_;
};

// S~_ell: weights Lambda(m) e^{-m^ell/N} at frequency m^ell. The cutoff keeps
// every term with e^{-m^ell/N} >= tail_eps / (log N * N^{1/ell}) and at least
// the range m <= (2 N log N / ell)^{1/ell}; the dropped mass (recorded in
// meta) always stays below tail_eps.
CoefficientSeries build_s_tilde(unsigned ell, std::uint64_t n, double tail_eps);

// V~_ell: same truncation, support restricted to primes.
CoefficientSeries build_v_tilde(unsigned ell, std::uint64_t n, double tail_eps);

// Finite sums S_k, V_k, T_k at frequencies m^k and f_k at frequencies m.
// Only integer k >= 2 has an integer frequency set; other k are rejected.
CoefficientSeries build_finite(SeriesKind kind, double k, std::uint64_t n, double a);

CoefficientSeries build_u(std::uint64_t h);

// a - b over the merged support (exact weight arithmetic per frequency)
CoefficientSeries series_difference(const CoefficientSeries& a, const CoefficientSeries& b);

// Gamma(1/ell) / (ell z^{1/ell}) — the smooth approximant to S~_ell
Complex main_term_factor(unsigned ell, std::uint64_t n, double alpha);

// Slow direct evaluation for real (non-integer) k: the localized finite sums
// at real exponents have non-integer frequencies, so no CoefficientSeries
// exists for them. Used by pointwise lemma scans only.
Complex direct_value(SeriesKind kind, double k, std::uint64_t n, double a, double alpha);

// CSV dump (`frequency,weight`) plus a JSON sidecar with the meta fields;
// the sidecar replaces the .csv suffix with .json.
void dump_series_csv(const CoefficientSeries& s, const std::string& csv_path);

}  // namespace circlelab::expsums
