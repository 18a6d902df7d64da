#include "circlelab/expsums.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "circlelab/io.hpp"
#include "circlelab/sieve.hpp"

namespace circlelab::expsums {

double reduced_phase(double freq, double alpha) {
    const double p = freq * alpha;
    const double err = std::fma(freq, alpha, -p);  // exact product residue
    double frac = (p - std::nearbyint(p)) + err;
    frac -= std::nearbyint(frac);
    return frac;
}

Complex unit_phase(double frac) {
    const double t = special::kTwoPi * frac;
    return {std::cos(t), std::sin(t)};
}

Complex e_of(double freq, double alpha) { return unit_phase(reduced_phase(freq, alpha)); }

const char* kind_name(SeriesKind k) {
    switch (k) {
        case SeriesKind::StildeSeries: return "stilde";
        case SeriesKind::VtildeSeries: return "vtilde";
        case SeriesKind::Sfinite: return "s_finite";
        case SeriesKind::Vfinite: return "v_finite";
        case SeriesKind::Tfinite: return "t_finite";
        case SeriesKind::Ffinite: return "f_finite";
        case SeriesKind::Usum: return "u";
    }
    return "?";
}

CoefficientSeries::CoefficientSeries(SeriesKind kind, std::vector<std::uint64_t> freqs,
                                     std::vector<double> weights, SeriesMeta meta)
    : kind_(kind), freqs_(std::move(freqs)), weights_(std::move(weights)), meta_(meta) {
    if (freqs_.size() != weights_.size())
        throw std::invalid_argument("CoefficientSeries: frequency/weight length mismatch");
    for (std::size_t i = 1; i < freqs_.size(); ++i)
        if (freqs_[i] <= freqs_[i - 1])
            throw std::invalid_argument("CoefficientSeries: frequencies must be strictly ascending");
    if (!freqs_.empty() && freqs_.back() > (1ULL << 53))
        throw std::overflow_error("CoefficientSeries: frequency exceeds exact double range");
}

namespace {

struct KahanComplex {
    double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
    void add(double xr, double xi) {
        const double yr = xr - cre;
        const double tr = re + yr;
        cre = (tr - re) - yr;
        re = tr;
        const double yi = xi - cim;
        const double ti = im + yi;
        cim = (ti - im) - yi;
        im = ti;
    }
    Complex value() const { return {re, im}; }
};

Complex u_closed_form(std::uint64_t h, double alpha) {
    // U = e(alpha) (e(H alpha) - 1) / (e(alpha) - 1), written with the stable
    // identity e(x) - 1 = 2i sin(pi x) e(x/2) on reduced phases
    const double fh = reduced_phase(static_cast<double>(h), alpha);
    const double f1 = alpha - std::nearbyint(alpha);
    const double sh = std::sin(special::kPi * fh);
    const double s1 = std::sin(special::kPi * f1);
    const Complex phase = unit_phase(f1 + 0.5 * (fh - f1));
    return phase * (sh / s1);
}

}  // namespace

Complex CoefficientSeries::value_at_direct(double alpha) const {
    KahanComplex acc;
    for (std::size_t i = 0; i < freqs_.size(); ++i) {
        const Complex e = e_of(static_cast<double>(freqs_[i]), alpha);
        acc.add(weights_[i] * e.real(), weights_[i] * e.imag());
    }
    return acc.value();
}

Complex CoefficientSeries::value_at(double alpha) const {
    if (kind_ == SeriesKind::Usum && meta_.h == freqs_.size() && std::abs(alpha) >= 1e-9)
        return u_closed_form(meta_.h, alpha);

    const Complex step = e_of(1.0, alpha);
    KahanComplex acc;
    std::size_t i = 0;
    const std::size_t n = freqs_.size();
    while (i < n) {
        // find the contiguous run starting at i
        std::size_t j = i + 1;
        while (j < n && freqs_[j] == freqs_[j - 1] + 1) ++j;
        if (j - i >= 16) {
            Complex rot = e_of(static_cast<double>(freqs_[i]), alpha);
            for (std::size_t t = i; t < j; ++t) {
                if ((t - i) % 256 == 0 && t != i)
                    rot = e_of(static_cast<double>(freqs_[t]), alpha);
                acc.add(weights_[t] * rot.real(), weights_[t] * rot.imag());
                rot *= step;
            }
        } else {
            for (std::size_t t = i; t < j; ++t) {
                const Complex e = e_of(static_cast<double>(freqs_[t]), alpha);
                acc.add(weights_[t] * e.real(), weights_[t] * e.imag());
            }
        }
        i = j;
    }
    return acc.value();
}

double CoefficientSeries::weight_sum() const {
    double s = 0.0, c = 0.0;
    for (double w : weights_) {
        const double y = w - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double CoefficientSeries::parseval() const {
    double s = 0.0, c = 0.0;
    for (double w : weights_) {
        const double y = w * w - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

namespace {

struct TailCut {
    std::size_t keep;      // number of leading entries kept
    double dropped;        // total dropped weight mass
};

// Keeps at least `floor_keep` entries, then extends the cut until the
// dropped suffix mass fits the budget.
TailCut cut_tail(const std::vector<double>& weights, std::size_t floor_keep, double tail_eps) {
    const std::size_t n = weights.size();
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i > 0; --i) suffix[i - 1] = suffix[i] + weights[i - 1];
    std::size_t keep = std::min(floor_keep, n);
    while (keep < n && suffix[keep] > tail_eps) ++keep;
    return {keep, suffix[keep]};
}

CoefficientSeries build_tilde(SeriesKind kind, unsigned ell, std::uint64_t n, double tail_eps) {
    if (ell < 1) throw std::domain_error("build_tilde: ell must be >= 1");
    if (n < 2) throw std::domain_error("build_tilde: N must be >= 2");
    if (!(tail_eps > 0.0) || tail_eps > 1e-6)
        throw std::domain_error("build_tilde: tail_eps must lie in (0, 1e-6]");

    const double nd = static_cast<double>(n);
    const double logn = std::log(nd);

    // keep every term with weight >= weight_floor and at least the range
    // m <= P = (2 N log N / ell)^{1/ell}
    const double weight_floor = tail_eps / (logn * std::pow(nd, 1.0 / ell));
    const double p_cut = std::pow(2.0 * nd * logn / ell, 1.0 / ell);

    // enumerate out to where e^{-q/N} underflows, then cut the tail
    const double q_hard = std::min(nd * 745.0, 9.0e18);
    const std::uint64_t q_bound = static_cast<std::uint64_t>(q_hard);

    std::vector<std::uint64_t> freqs;
    std::vector<double> weights;
    std::size_t floor_keep = 0;

    auto push = [&](std::uint64_t q, double logp) {
        const double qd = static_cast<double>(q);
        const double w = logp * std::exp(-qd / nd);
        freqs.push_back(q);
        weights.push_back(w);
        if (w >= weight_floor || std::pow(qd, 1.0 / ell) <= p_cut) floor_keep = freqs.size();
    };

    if (kind == SeriesKind::StildeSeries) {
        const auto table = sieve::mangoldt_support(ell, q_bound);
        for (const auto& e : table.entries) push(e.q, e.lambda);
    } else {
        const auto table = sieve::prime_powers_in(ell, 1, q_bound);
        for (const auto& e : table.entries) push(e.q, e.logp);
    }

    const TailCut cut = cut_tail(weights, floor_keep, tail_eps);
    freqs.resize(cut.keep);
    weights.resize(cut.keep);

    SeriesMeta meta;
    meta.k = ell;
    meta.n = n;
    meta.tail_eps = tail_eps;
    meta.tail_dropped = cut.dropped;
    return CoefficientSeries(kind, std::move(freqs), std::move(weights), meta);
}

}  // namespace

CoefficientSeries build_s_tilde(unsigned ell, std::uint64_t n, double tail_eps) {
    return build_tilde(SeriesKind::StildeSeries, ell, n, tail_eps);
}

CoefficientSeries build_v_tilde(unsigned ell, std::uint64_t n, double tail_eps) {
    return build_tilde(SeriesKind::VtildeSeries, ell, n, tail_eps);
}

CoefficientSeries build_finite(SeriesKind kind, double k, std::uint64_t n, double a) {
    const double k_round = std::nearbyint(k);
    if (!(k > 1.0) || k != k_round)
        throw std::invalid_argument(
            "build_finite: only integer k >= 2 supported (real k has non-integer frequencies)");
    if (!(a > 1.0)) throw std::domain_error("build_finite: A must be > 1");
    if (n < 2) throw std::domain_error("build_finite: N must be >= 2");
    const unsigned ku = static_cast<unsigned>(k_round);
    const double lo_q = static_cast<double>(n) / a;  // parts live in [N/A, N]

    std::vector<std::uint64_t> freqs;
    std::vector<double> weights;

    SeriesMeta meta;
    meta.k = k;
    meta.n = n;
    meta.a = a;

    switch (kind) {
        case SeriesKind::Sfinite: {
            const auto table = sieve::mangoldt_support(ku, n);
            for (const auto& e : table.entries)
                if (static_cast<double>(e.q) >= lo_q) {
                    freqs.push_back(e.q);
                    weights.push_back(e.lambda);
                }
            break;
        }
        case SeriesKind::Vfinite: {
            const std::uint64_t lo = static_cast<std::uint64_t>(std::ceil(lo_q));
            const auto table = sieve::prime_powers_in(ku, std::max<std::uint64_t>(1, lo), n);
            for (const auto& e : table.entries)
                if (static_cast<double>(e.q) >= lo_q) {
                    freqs.push_back(e.q);
                    weights.push_back(e.logp);
                }
            break;
        }
        case SeriesKind::Tfinite: {
            const std::uint64_t m_hi = sieve::nth_root_floor(n, ku);
            for (std::uint64_t m = 1; m <= m_hi; ++m) {
                const std::uint64_t q = sieve::checked_pow(m, ku);
                if (static_cast<double>(q) >= lo_q) {
                    freqs.push_back(q);
                    weights.push_back(1.0);
                }
            }
            break;
        }
        case SeriesKind::Ffinite: {
            // f_k localizes m itself: N/A <= m <= N, weight m^{1/k-1}/k
            const std::uint64_t m_lo =
                std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(lo_q)));
            freqs.reserve(n - m_lo + 1);
            weights.reserve(n - m_lo + 1);
            for (std::uint64_t m = m_lo; m <= n; ++m) {
                if (static_cast<double>(m) < lo_q) continue;
                freqs.push_back(m);
                weights.push_back(std::pow(static_cast<double>(m), 1.0 / k - 1.0) / k);
            }
            break;
        }
        default:
            throw std::invalid_argument("build_finite: kind must be one of S/V/T/f");
    }
    return CoefficientSeries(kind, std::move(freqs), std::move(weights), meta);
}

CoefficientSeries build_u(std::uint64_t h) {
    if (h < 1) throw std::domain_error("build_u: H must be >= 1");
    std::vector<std::uint64_t> freqs(h);
    std::vector<double> weights(h, 1.0);
    for (std::uint64_t m = 0; m < h; ++m) freqs[m] = m + 1;
    SeriesMeta meta;
    meta.h = h;
    return CoefficientSeries(SeriesKind::Usum, std::move(freqs), std::move(weights), meta);
}

CoefficientSeries series_difference(const CoefficientSeries& a, const CoefficientSeries& b) {
    std::vector<std::uint64_t> freqs;
    std::vector<double> weights;
    freqs.reserve(a.size() + b.size());
    weights.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        const std::uint64_t fa = i < a.size() ? a.frequencies()[i] : UINT64_MAX;
        const std::uint64_t fb = j < b.size() ? b.frequencies()[j] : UINT64_MAX;
        if (fa < fb) {
            freqs.push_back(fa);
            weights.push_back(a.weights()[i++]);
        } else if (fb < fa) {
            freqs.push_back(fb);
            weights.push_back(-b.weights()[j++]);
        } else {
            const double w = a.weights()[i++] - b.weights()[j++];
            if (w != 0.0) {
                freqs.push_back(fa);
                weights.push_back(w);
            }
        }
    }
    SeriesMeta meta = a.meta();
    return CoefficientSeries(a.kind(), std::move(freqs), std::move(weights), meta);
}

Complex main_term_factor(unsigned ell, std::uint64_t n, double alpha) {
    if (ell < 1) throw std::domain_error("main_term_factor: ell must be >= 1");
    return special::gamma(1.0 / ell) / static_cast<double>(ell) *
           special::z_pow_neg(alpha, n, 1.0 / ell);
}

Complex direct_value(SeriesKind kind, double k, std::uint64_t n, double a, double alpha) {
    if (!(k > 1.0)) throw std::domain_error("direct_value: requires k > 1");
    if (!(a > 1.0)) throw std::domain_error("direct_value: requires A > 1");
    const double nd = static_cast<double>(n);
    const double lo_q = nd / a;
    KahanComplex acc;
    auto add_term = [&](double weight, double freq) {
        // freq is m^k, generally non-integer: reduce in long double
        const long double prod = static_cast<long double>(freq) * alpha;
        const double frac = static_cast<double>(prod - std::nearbyintl(prod));
        const Complex e = unit_phase(frac);
        acc.add(weight * e.real(), weight * e.imag());
    };
    switch (kind) {
        case SeriesKind::Tfinite: {
            const std::uint64_t m_hi =
                static_cast<std::uint64_t>(std::floor(std::pow(nd, 1.0 / k)));
            for (std::uint64_t m = 1; m <= m_hi; ++m) {
                const double q = std::pow(static_cast<double>(m), k);
                if (q >= lo_q && q <= nd) add_term(1.0, q);
            }
            break;
        }
        case SeriesKind::Ffinite: {
            const std::uint64_t m_lo =
                std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(lo_q)));
            for (std::uint64_t m = m_lo; m <= n; ++m)
                add_term(std::pow(static_cast<double>(m), 1.0 / k - 1.0) / k,
                         static_cast<double>(m));
            break;
        }
        case SeriesKind::Vfinite: {
            const std::uint64_t m_hi =
                static_cast<std::uint64_t>(std::floor(std::pow(nd, 1.0 / k)));
            const auto primes = sieve::sieve_primes(std::max<std::uint64_t>(2, m_hi));
            for (std::size_t i = 0; i < primes.primes.size(); ++i) {
                const double q = std::pow(static_cast<double>(primes.primes[i]), k);
                if (q >= lo_q && q <= nd) add_term(primes.logs[i], q);
            }
            break;
        }
        case SeriesKind::Sfinite: {
            const std::uint64_t m_hi =
                static_cast<std::uint64_t>(std::floor(std::pow(nd, 1.0 / k)));
            const auto table = sieve::mangoldt_support(1, std::max<std::uint64_t>(2, m_hi));
            for (const auto& e : table.entries) {
                const double q = std::pow(static_cast<double>(e.q), k);
                if (q >= lo_q && q <= nd) add_term(e.lambda, q);
            }
            break;
        }
        default:
            throw std::invalid_argument("direct_value: kind must be a localized finite sum");
    }
    return acc.value();
}

void dump_series_csv(const CoefficientSeries& s, const std::string& csv_path) {
    io::CsvWriter csv(csv_path);
    csv.row("frequency", "weight");
    for (std::size_t i = 0; i < s.size(); ++i)
        csv.row(s.frequencies()[i], s.weights()[i]);
    csv.close();

    std::string sidecar = csv_path;
    if (sidecar.size() > 4 && sidecar.ends_with(".csv")) sidecar.resize(sidecar.size() - 4);
    sidecar += ".json";
    io::JsonObject j;
    j.add("schema_version", 1);
    j.add("kind", kind_name(s.kind()));
    j.add("k", s.meta().k);
    j.add("n", s.meta().n);
    if (s.meta().a > 0.0) j.add("a", s.meta().a);
    if (s.meta().h > 0) j.add("h", s.meta().h);
    if (s.meta().tail_eps > 0.0) {
        j.add("tail_eps", s.meta().tail_eps);
        j.add("tail_dropped", s.meta().tail_dropped);
    }
    j.add("count", static_cast<std::uint64_t>(s.size()));
    j.add("max_frequency", s.max_frequency());
    j.write(sidecar);
}

}  // namespace circlelab::expsums
