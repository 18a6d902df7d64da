#include "circlelab/representations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "circlelab/fft.hpp"
#include "circlelab/io.hpp"
#include "circlelab/parallel.hpp"
#include "circlelab/sieve.hpp"

namespace circlelab::representations {

void Window::validate() const {
    if (n < 2) throw std::domain_error("Window: N must be >= 2");
    if (h < 1 || h > n) throw std::domain_error("Window: H must lie in [1, N]");
    if (n > UINT64_MAX - h) throw std::overflow_error("Window: N + H overflows");
}

namespace {

struct KahanAcc {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

// For each n in [n_lo, n_hi], accumulate sum over q1 of w1 * w2(n - q1) by
// range-scanning the sorted complement table. Per-n accumulation is
// compensated (comp carries the Kahan residuals for out[n_lo..n_hi]).
template <typename Table2Weight>
void accumulate_pairs(const std::vector<sieve::PrimePowerEntry>& t1,
                      const std::vector<std::uint64_t>& q2, const Table2Weight& w2,
                      std::uint64_t n_lo, std::uint64_t n_hi, std::uint64_t base,
                      std::vector<double>& out) {
    std::vector<double> comp(n_hi - n_lo + 1, 0.0);
    for (const auto& e1 : t1) {
        if (e1.q >= n_hi) break;
        const std::uint64_t lo = n_lo > e1.q ? n_lo - e1.q : 1;
        const std::uint64_t hi = n_hi - e1.q;
        auto it = std::lower_bound(q2.begin(), q2.end(), lo);
        for (; it != q2.end() && *it <= hi; ++it) {
            const std::uint64_t n = e1.q + *it;
            const std::size_t i = n - base;
            const std::size_t c = n - n_lo;
            const double x = e1.logp * w2(static_cast<std::size_t>(it - q2.begin()));
            const double y = x - comp[c];
            const double t = out[i] + y;
            comp[c] = (t - out[i]) - y;
            out[i] = t;
        }
    }
}

}  // namespace

RepresentationSeries count_R(Window w, int ell1, int ell2) {
    w.validate();
    if (ell1 < 2 || ell2 < 2) throw std::domain_error("count_R: exponents must be >= 2");

    const std::uint64_t top = w.n + w.h;
    const auto t1 = sieve::prime_powers_in(static_cast<unsigned>(ell1), 1, top);
    const auto t2 = sieve::prime_powers_in(static_cast<unsigned>(ell2), 1, top);

    std::vector<std::uint64_t> q2(t2.entries.size());
    std::vector<double> logs2(t2.entries.size());
    for (std::size_t i = 0; i < t2.entries.size(); ++i) {
        q2[i] = t2.entries[i].q;
        logs2[i] = t2.entries[i].logp;
    }

    RepresentationSeries s;
    s.window = w;
    s.kind = CountKind::Rpp;
    s.ell1 = ell1;
    s.ell2 = ell2;
    s.values.assign(w.h, 0.0);
    s.table_hash = sieve::provenance_hash(t1) ^ (sieve::provenance_hash(t2) * 0x9e3779b97f4a7c15ULL);

    // fixed n-range chunks; each n is written by exactly one chunk
    parallel_chunks(w.h, 4096, [&](std::size_t, std::uint64_t b, std::uint64_t e) {
        accumulate_pairs(
            t1.entries, q2, [&](std::size_t i) { return logs2[i]; },
            w.n + 1 + b, w.n + e, w.n + 1, s.values);
    });
    return s;
}

RepresentationSeries count_r_prime(Window w, int ell1, int ell2, double a) {
    w.validate();
    if (ell1 < 2 || ell2 < 2) throw std::domain_error("count_r_prime: exponents must be >= 2");
    if (!(a > 1.0)) throw std::domain_error("count_r_prime: A must be > 1");

    const double lo_q = static_cast<double>(w.n) / a;
    const std::uint64_t lo_int =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(lo_q)));

    sieve::PrimePowerTable t1;
    if (lo_int <= w.n)
        t1 = sieve::prime_powers_in(static_cast<unsigned>(ell1), lo_int, w.n);

    // all integer ell2-th powers in [N/A, N]
    std::vector<std::uint64_t> q2;
    {
        const std::uint64_t m_hi = sieve::nth_root_floor(w.n, static_cast<unsigned>(ell2));
        for (std::uint64_t m = 1; m <= m_hi; ++m) {
            const std::uint64_t q = sieve::checked_pow(m, static_cast<unsigned>(ell2));
            if (static_cast<double>(q) >= lo_q) q2.push_back(q);
        }
    }

    RepresentationSeries s;
    s.window = w;
    s.kind = CountKind::rPrime;
    s.ell1 = ell1;
    s.ell2 = ell2;
    s.a = a;
    s.values.assign(w.h, 0.0);
    s.table_hash = sieve::provenance_hash(t1);

    parallel_chunks(w.h, 4096, [&](std::size_t, std::uint64_t b, std::uint64_t e) {
        accumulate_pairs(
            t1.entries, q2, [](std::size_t) { return 1.0; },
            w.n + 1 + b, w.n + e, w.n + 1, s.values);
    });
    return s;
}

double window_sum(const RepresentationSeries& s, bool smooth) {
    const double nd = static_cast<double>(s.window.n);
    // pairwise blocking on top of compensated block sums
    constexpr std::uint64_t kBlock = 1024;
    const std::uint64_t blocks =
        (s.values.size() + kBlock - 1) / std::max<std::uint64_t>(kBlock, 1);
    KahanAcc total;
    for (std::uint64_t blk = 0; blk < blocks; ++blk) {
        const std::uint64_t b = blk * kBlock;
        const std::uint64_t e = std::min<std::uint64_t>(b + kBlock, s.values.size());
        KahanAcc acc;
        for (std::uint64_t i = b; i < e; ++i) {
            const double v = s.values[i];
            if (v == 0.0) continue;
            if (smooth) {
                const double n = static_cast<double>(s.window.n + 1 + i);
                acc.add(v * std::exp(-n / nd));
            } else {
                acc.add(v);
            }
        }
        total.add(acc.s);
    }
    return total.s;
}

double main_term_M(Window w, int ell1, int ell2, double a, ConvPath path) {
    w.validate();
    if (ell1 < 2 || ell2 < 2) throw std::domain_error("main_term_M: exponents must be >= 2");
    if (!(a > 1.0)) throw std::domain_error("main_term_M: A must be > 1");

    const double lo_q = static_cast<double>(w.n) / a;
    const std::uint64_t m_lo =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(lo_q)));
    if (m_lo > w.n) return 0.0;
    const std::size_t len = static_cast<std::size_t>(w.n - m_lo + 1);

    const double e1 = 1.0 / ell1 - 1.0;
    const double e2 = 1.0 / ell2 - 1.0;
    std::vector<double> pw1(len), pw2(len);
    parallel_chunks(len, 8192, [&](std::size_t, std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) {
            const double m = static_cast<double>(m_lo + i);
            pw1[i] = std::pow(m, e1);
            pw2[i] = std::pow(m, e2);
        }
    });

    const double inv = 1.0 / (static_cast<double>(ell1) * ell2);

    // band of the convolution needed: t = N+1 .. N+H, index t - 2*m_lo
    const std::uint64_t band_work = w.h * static_cast<std::uint64_t>(len);
    const bool use_direct =
        path == ConvPath::direct || (path == ConvPath::automatic && band_work <= (1ULL << 32));
    if (use_direct) {
        // direct banded dot products, parallel over n
        const double total =
            parallel_sum(w.h, 256, [&](std::size_t, std::uint64_t b, std::uint64_t e) {
                KahanAcc acc;
                for (std::uint64_t i = b; i < e; ++i) {
                    const std::uint64_t t = w.n + 1 + i;
                    // m1 in [max(m_lo, t-N), min(N, t-m_lo)]
                    const std::uint64_t m1_lo = std::max(m_lo, t - w.n);
                    const std::uint64_t m1_hi = std::min(w.n, t - m_lo);
                    if (m1_lo > m1_hi) continue;
                    KahanAcc row;
                    for (std::uint64_t m1 = m1_lo; m1 <= m1_hi; ++m1)
                        row.add(pw1[m1 - m_lo] * pw2[t - m1 - m_lo]);
                    acc.add(row.s);
                }
                return acc.s;
            });
        return inv * total;
    }

    // single length-2(N-m_lo) FFT convolution, band extracted afterwards
    const std::vector<double> conv = fft::convolve_real(pw1, pw2);
    KahanAcc acc;
    for (std::uint64_t i = 0; i < w.h; ++i) {
        const std::uint64_t t = w.n + 1 + i;
        const std::uint64_t idx = t - 2 * m_lo;
        if (idx < conv.size()) acc.add(conv[idx]);
    }
    return inv * acc.s;
}

double predicted_average(const special::ProblemParams& p, bool smooth) {
    p.validate_theorem();
    const double main = p.density() * static_cast<double>(p.h) *
                        std::pow(static_cast<double>(p.n), p.lambda() - 1.0);
    return smooth ? main / std::exp(1.0) : main;
}

void export_csv(const RepresentationSeries& s, const std::string& csv_path) {
    io::CsvWriter csv(csv_path);
    csv.row("n", "value");
    for (std::size_t i = 0; i < s.values.size(); ++i)
        csv.row(s.window.n + 1 + i, s.values[i]);
    csv.close();

    std::string sidecar = csv_path;
    if (sidecar.size() > 4 && sidecar.ends_with(".csv")) sidecar.resize(sidecar.size() - 4);
    sidecar += ".json";
    io::JsonObject j;
    j.add("schema_version", 1);
    j.add("kind", s.kind == CountKind::Rpp ? "rpp" : "rprime");
    j.add("n", s.window.n);
    j.add("h", s.window.h);
    j.add("ell1", s.ell1);
    j.add("ell2", s.ell2);
    if (s.a > 0.0) j.add("a", s.a);
    j.add("table_hash", io::hex8(s.table_hash >> 32) + io::hex8(s.table_hash));
    j.write(sidecar);
}

}  // namespace circlelab::representations
