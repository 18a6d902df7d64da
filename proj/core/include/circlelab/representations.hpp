#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "circlelab/special.hpp"

namespace circlelab::representations {

// The summation window [N+1, N+H].
struct Window {
    std::uint64_t n = 0;
    std::uint64_t h = 0;
    void validate() const;
};

enum class CountKind { Rpp, rPrime };

// Per-n weighted representation counts over a window; values[i] belongs to
// n = N+1+i.
struct RepresentationSeries {
    Window window;
    CountKind kind = CountKind::Rpp;
    int ell1 = 2, ell2 = 2;
    double a = 0.0;  // localization parameter A (rPrime only)
    std::vector<double> values;
    std::uint64_t table_hash = 0;  // provenance of the underlying sieve tables
};

// R''(n) = sum over p1^ell1 + p2^ell2 = n of log p1 log p2. Meet-in-the-middle
// over the two prime-power tables; window elements are independent and the
// parallel split is over fixed n-ranges, so results do not depend on the
// thread count.
RepresentationSeries count_R(Window w, int ell1, int ell2);

// r'(n) = sum over p^ell1 + m^ell2 = n, with both parts localized to
// [N/A, N], of log p (m runs over all positive integers).
RepresentationSeries count_r_prime(Window w, int ell1, int ell2, double a);

// sum over the window of values * (e^{-n/N} when smooth); compensated with
// pairwise blocking
double window_sum(const RepresentationSeries& s, bool smooth);

// Exact finite main-term sum
//   M(H,N) = (1/(l1 l2)) sum_{n=1}^{H} sum_{m1+m2=n+N, N/A<=m_i<=N}
//            m1^{1/l1-1} m2^{1/l2-1},
// evaluated by banded dot products or a single FFT convolution when the
// band is large. The m1 range carries ell1 exactly as the definition is
// written; the localization is not symmetrized.
enum class ConvPath { automatic, direct, fft };
double main_term_M(Window w, int ell1, int ell2, double a,
                   ConvPath path = ConvPath::automatic);

// c(l1,l2) H N^{lambda-1}, divided by e for the smoothed variant
double predicted_average(const special::ProblemParams& p, bool smooth);

// CSV export `n,value` plus JSON sidecar (params + table provenance hash)
void export_csv(const RepresentationSeries& s, const std::string& csv_path);

}  // namespace circlelab::representations
