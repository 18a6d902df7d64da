#include "circlelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "circlelab/parallel.hpp"

namespace circlelab::quadrature {

void Interval::validate() const {
    if (!(lo < hi) || lo < -0.5 - 1e-15 || hi > 0.5 + 1e-15)
        throw std::domain_error("Interval: need -1/2 <= lo < hi <= 1/2");
    if (symmetric_tail && !(lo > 0.0 && lo < 0.5))
        throw std::domain_error("Interval: tail form needs 0 < omega < 1/2");
}

GridSpec nyquist_grid(const expsums::CoefficientSeries& s, QuadRule rule) {
    const std::int64_t f = static_cast<std::int64_t>(s.max_frequency());
    return {4 * f + 4, rule};
}

namespace {

double weight_value(WeightKind w, double param, double alpha) {
    switch (w) {
        case WeightKind::one:
            return 1.0;
        case WeightKind::inv_abs_alpha:
            return 1.0 / std::abs(alpha);
        case WeightKind::abs_u: {
            const std::uint64_t h = static_cast<std::uint64_t>(param);
            if (std::abs(alpha) < 1e-12) return static_cast<double>(h);
            const double sh = std::sin(special::kPi * expsums::reduced_phase(param, alpha));
            const double s1 = std::sin(special::kPi * (alpha - std::nearbyint(alpha)));
            return std::abs(sh / s1);
        }
        case WeightKind::one_plus_alpha_n:
            return 1.0 + std::abs(alpha) * param;
    }
    return 1.0;
}

double composite_pass(const std::function<double(double)>& f, double lo, double hi,
                      std::int64_t points, QuadRule rule, WeightKind w, double param) {
    const double h = (hi - lo) / static_cast<double>(points);
    if (rule == QuadRule::midpoint) {
        return h * parallel_sum(points, 8192, [&](std::size_t, std::uint64_t b, std::uint64_t e) {
                   double s = 0.0, c = 0.0;
                   for (std::uint64_t i = b; i < e; ++i) {
                       const double x = lo + (static_cast<double>(i) + 0.5) * h;
                       const double y = f(x) * weight_value(w, param, x);
                       const double t = s + (y - c);
                       c = (t - s) - (y - c);
                       s = t;
                   }
                   return s;
               });
    }
    // trapezoid: interior points plus half-weight endpoints
    double ends = 0.5 * (f(lo) * weight_value(w, param, lo) + f(hi) * weight_value(w, param, hi));
    double interior =
        parallel_sum(points - 1, 8192, [&](std::size_t, std::uint64_t b, std::uint64_t e) {
            double s = 0.0, c = 0.0;
            for (std::uint64_t i = b; i < e; ++i) {
                const double x = lo + static_cast<double>(i + 1) * h;
                const double y = f(x) * weight_value(w, param, x);
                const double t = s + (y - c);
                c = (t - s) - (y - c);
                s = t;
            }
            return s;
        });
    return h * (ends + interior);
}

}  // namespace

QuadResult grid_integral(const std::function<double(double)>& f, Interval iv, GridSpec grid,
                         WeightKind weight, double weight_param, double rel_tol,
                         std::int64_t max_points) {
    iv.validate();
    if (weight == WeightKind::inv_abs_alpha && !iv.symmetric_tail && iv.lo <= 0.0 && iv.hi >= 0.0)
        throw std::domain_error("grid_integral: 1/|alpha| weight needs an interval away from 0");

    struct Piece {
        double lo, hi;
    };
    std::vector<Piece> pieces;
    if (iv.symmetric_tail) {
        pieces.push_back({-0.5, -iv.lo});
        pieces.push_back({iv.lo, 0.5});
    } else {
        pieces.push_back({iv.lo, iv.hi});
    }

    std::int64_t points = std::max<std::int64_t>(grid.points, 2);
    QuadResult res;
    double prev = 0.0;
    bool have_prev = false;
    for (;;) {
        double total = 0.0;
        for (const auto& p : pieces) total += composite_pass(f, p.lo, p.hi, points, grid.rule, weight, weight_param);
        res.points = points;
        res.value = total;
        if (have_prev) {
            res.last_delta = std::abs(total - prev);
            const double scale = std::max(std::abs(total), 1e-300);
            if (res.last_delta <= rel_tol * scale) {
                res.converged = true;
                return res;
            }
        }
        prev = total;
        have_prev = true;
        if (points > max_points / 2) {
            res.converged = false;  // flagged, never silent
            return res;
        }
        points *= 2;
    }
}

namespace {

// binary search for `freq` in the ascending frequency list; returns weight or 0
double weight_at(const expsums::CoefficientSeries& s, std::int64_t freq) {
    if (freq < 0) return 0.0;
    const auto& fr = s.frequencies();
    const std::uint64_t key = static_cast<std::uint64_t>(freq);
    const auto it = std::lower_bound(fr.begin(), fr.end(), key);
    if (it == fr.end() || *it != key) return 0.0;
    return s.weights()[static_cast<std::size_t>(it - fr.begin())];
}

}  // namespace

Complex integral_product(std::span<const Factor> factors, std::int64_t shift) {
    if (factors.empty() || factors.size() > 3)
        throw std::invalid_argument("integral_product: need 1 to 3 factors");

    // order by size so the pair loop runs over the two smallest factors
    std::vector<Factor> fs(factors.begin(), factors.end());
    std::sort(fs.begin(), fs.end(),
              [](const Factor& a, const Factor& b) { return a.series->size() < b.series->size(); });

    auto signed_freq = [](const Factor& f, std::size_t i) {
        const std::int64_t v = static_cast<std::int64_t>(f.series->frequencies()[i]);
        return f.conjugate ? -v : v;
    };

    double sum = 0.0, comp = 0.0;
    auto accumulate = [&](double term) {
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };

    if (fs.size() == 1) {
        const auto& f = fs[0];
        const std::int64_t want = f.conjugate ? -shift : shift;
        accumulate(weight_at(*f.series, want));
    } else if (fs.size() == 2) {
        const auto& a = fs[0];
        const auto& b = fs[1];
        const int sb = b.conjugate ? -1 : 1;
        for (std::size_t i = 0; i < a.series->size(); ++i) {
            const std::int64_t rem = shift - signed_freq(a, i);
            accumulate(a.series->weights()[i] * weight_at(*b.series, sb * rem));
        }
    } else {
        const auto& a = fs[0];
        const auto& b = fs[1];
        const auto& c = fs[2];
        const int sc = c.conjugate ? -1 : 1;
        for (std::size_t i = 0; i < a.series->size(); ++i) {
            const std::int64_t ra = shift - signed_freq(a, i);
            const double wa = a.series->weights()[i];
            for (std::size_t j = 0; j < b.series->size(); ++j) {
                const std::int64_t rem = ra - signed_freq(b, j);
                accumulate(wa * b.series->weights()[j] * weight_at(*c.series, sc * rem));
            }
        }
    }
    return {sum, 0.0};
}

double mean_square(const expsums::CoefficientSeries& s, double tau, std::size_t term_cap) {
    if (!(tau > 0.0) || tau > 0.5) throw std::domain_error("mean_square: need 0 < tau <= 1/2");
    const std::size_t n = s.size();
    if (n == 0) return 0.0;
    if (tau == 0.5) return s.parseval();
    if (n > term_cap) {
        auto f = [&s](double a) -> Complex { return {std::norm(s.value_at(a)), 0.0}; };
        const double hint = 2.0 * static_cast<double>(s.max_frequency());
        return oscillatory_integral(f, -tau, tau, hint, 1e-9).value.real();
    }
    const auto& fr = s.frequencies();
    const auto& w = s.weights();
    // diagonal + twice the upper triangle (kernel even in the difference)
    const double diag = 2.0 * tau * s.parseval();
    const double off = parallel_sum(n, 64, [&](std::size_t, std::uint64_t b, std::uint64_t e) {
        double sum = 0.0, comp = 0.0;
        for (std::uint64_t i = b; i < e; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = static_cast<double>(fr[j] - fr[i]);
                double kern;
                if (d < 1e-12) {
                    kern = 2.0 * tau;  // 0/0 guard at the diagonal limit
                } else {
                    kern = std::sin(special::kTwoPi * d * tau) / (special::kPi * d);
                }
                const double y = w[i] * w[j] * kern - comp;
                const double t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
        }
        return sum;
    });
    return diag + 2.0 * off;
}

namespace {

// Ci(x) = gamma + log x + int_0^x (cos t - 1)/t dt. Power series below 16,
// asymptotic auxiliary expansion above (Abramowitz-Stegun 5.2).
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

double cosint_series(double x) {
    const double x2 = -x * x;
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 120; ++k) {
        term *= x2 / ((2.0 * k - 1.0) * (2.0 * k));
        const double add = term / (2.0 * k);
        sum += add;
        if (std::abs(add) < 1e-18 * std::max(1.0, std::abs(sum))) break;
    }
    return kEulerGamma + std::log(x) + sum;
}

void cosint_aux(double x, double& f, double& g) {
    // f(x) ~ (1/x)   sum (-1)^k (2k)!   / x^{2k}
    // g(x) ~ (1/x^2) sum (-1)^k (2k+1)! / x^{2k}
    // truncated at the smallest term (the series are asymptotic)
    const double ix2 = 1.0 / (x * x);
    double sf = 1.0, sg = 1.0;
    double num_f = 1.0, num_g = 1.0, xp = 1.0;
    double prev_f = 1.0, prev_g = 1.0;
    bool done_f = false, done_g = false;
    for (int k = 1; k <= 24 && !(done_f && done_g); ++k) {
        num_f *= (2.0 * k - 1.0) * (2.0 * k);
        num_g *= (2.0 * k) * (2.0 * k + 1.0);
        xp *= ix2;
        const double sign = (k & 1) ? -1.0 : 1.0;
        if (!done_f) {
            const double add = sign * num_f * xp;
            if (std::abs(add) >= prev_f) {
                done_f = true;
            } else {
                sf += add;
                prev_f = std::abs(add);
            }
        }
        if (!done_g) {
            const double add = sign * num_g * xp;
            if (std::abs(add) >= prev_g) {
                done_g = true;
            } else {
                sg += add;
                prev_g = std::abs(add);
            }
        }
    }
    f = sf / x;
    g = sg * ix2;
}

}  // namespace

double cosint(double x) {
    if (!(x > 0.0)) throw std::domain_error("cosint: requires x > 0");
    if (x <= 20.0) return cosint_series(x);
    double f, g;
    cosint_aux(x, f, g);
    return f * std::sin(x) - g * std::cos(x);
}

double tail_mean_square(const expsums::CoefficientSeries& s, double omega, std::size_t term_cap) {
    if (!(omega > 0.0) || omega >= 0.5)
        throw std::domain_error("tail_mean_square: need 0 < omega < 1/2");
    const std::size_t n = s.size();
    if (n == 0) return 0.0;
    if (n > term_cap) {
        // conjugate symmetry: integrate [omega, 1/2] and double
        auto f = [&s](double a) -> Complex { return {std::norm(s.value_at(a)) / a, 0.0}; };
        const double hint = 2.0 * static_cast<double>(s.max_frequency());
        return 2.0 * oscillatory_integral(f, omega, 0.5, hint, 1e-9).value.real();
    }
    const auto& fr = s.frequencies();
    const auto& w = s.weights();
    const double k0 = 2.0 * std::log(1.0 / (2.0 * omega));
    const double diag = k0 * s.parseval();
    const double off = parallel_sum(n, 64, [&](std::size_t, std::uint64_t b, std::uint64_t e) {
        double sum = 0.0, comp = 0.0;
        for (std::uint64_t i = b; i < e; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = static_cast<double>(fr[j] - fr[i]);
                const double kern = 2.0 * (cosint(special::kPi * d) - cosint(special::kTwoPi * d * omega));
                const double y = w[i] * w[j] * kern - comp;
                const double t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
        }
        return sum;
    });
    return diag + 2.0 * off;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGl16X[8] = {
    0.09501250983763744018531934, 0.28160355077925891323046050,
    0.45801677765722738634241944, 0.61787624440264374844667176,
    0.75540440835500303389510119, 0.86563120238783174388046790,
    0.94457502307323257607798842, 0.98940093499164993259615417,
};
constexpr double kGl16W[8] = {
    0.18945061045506849628539672, 0.18260341504492358886676366,
    0.16915651939500253818931208, 0.14959598881657673208150173,
    0.12462897125553387205247628, 0.09515851168249278480992511,
    0.06225352393864789286284384, 0.02715245941175409485178057,
};

Complex gl16_panel(const std::function<Complex(double)>& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    Complex acc{0.0, 0.0};
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kGl16X[i];
        acc += kGl16W[i] * (f(mid + dx) + f(mid - dx));
    }
    return half * acc;
}

}  // namespace

ComplexQuadResult oscillatory_integral(const std::function<Complex(double)>& f, double lo,
                                       double hi, double freq_hint, double rel_tol,
                                       std::int64_t max_evals) {
    if (!(hi > lo)) throw std::domain_error("oscillatory_integral: empty interval");
    // ~1.5 oscillations of e(freq_hint * alpha) per 16-point panel
    std::int64_t panels = std::max<std::int64_t>(
        8, static_cast<std::int64_t>(std::abs(freq_hint) * (hi - lo) / 1.5) + 1);

    ComplexQuadResult res;
    Complex prev{0.0, 0.0};
    bool have_prev = false;
    for (;;) {
        const double h = (hi - lo) / static_cast<double>(panels);
        std::vector<Complex> partials(chunk_count(panels, 256));
        parallel_chunks(panels, 256, [&](std::size_t c, std::uint64_t b, std::uint64_t e) {
            Complex s{0.0, 0.0};
            for (std::uint64_t i = b; i < e; ++i)
                s += gl16_panel(f, lo + static_cast<double>(i) * h, lo + static_cast<double>(i + 1) * h);
            partials[c] = s;
        });
        Complex total{0.0, 0.0};
        for (const auto& p : partials) total += p;

        res.evals += panels * 16;
        res.value = total;
        if (have_prev) {
            res.last_delta = std::abs(total - prev);
            const double scale = std::max(std::abs(total), 1e-300);
            if (res.last_delta <= rel_tol * scale) {
                res.converged = true;
                return res;
            }
        }
        prev = total;
        have_prev = true;
        if (res.evals + 32 * panels > max_evals) {
            res.converged = false;
            return res;
        }
        panels *= 2;
    }
}

ComplexQuadResult laplace_lhs(std::uint64_t n, std::uint64_t big_n, double mu, double X) {
    if (n < 1) throw std::domain_error("laplace_lhs: requires n >= 1");
    if (!(mu > 0.0)) throw std::domain_error("laplace_lhs: requires mu > 0");
    if (!(X > 0.0)) throw std::domain_error("laplace_lhs: requires X > 0");
    auto f = [n, big_n, mu](double a) {
        return special::z_pow_neg(a, big_n, mu) * expsums::e_of(static_cast<double>(n), -a);
    };
    return oscillatory_integral(f, -X, X, static_cast<double>(n), 1e-11);
}

QuadResult u_moment(double mu, std::uint64_t h, double rel_tol) {
    if (!(mu >= 1.0)) throw std::domain_error("u_moment: requires mu >= 1");
    if (h < 1) throw std::domain_error("u_moment: requires H >= 1");
    const double hd = static_cast<double>(h);
    auto f = [mu, hd](double a) {
        double u;
        if (std::abs(a) < 1e-12) {
            u = hd;
        } else {
            const double sh = std::sin(special::kPi * expsums::reduced_phase(hd, a));
            const double s1 = std::sin(special::kPi * (a - std::nearbyint(a)));
            u = std::abs(sh / s1);
        }
        return mu == 2.0 ? u * u : std::pow(u, mu);
    };
    const std::int64_t start = static_cast<std::int64_t>(std::min<std::uint64_t>(h, 1 << 14)) * 8;
    return grid_integral(f, Interval::full(), GridSpec{start, QuadRule::midpoint}, WeightKind::one,
                         0.0, rel_tol);
}

double w_integral_exact(std::uint64_t big_n, std::uint64_t h, double b) {
    if (h < 1) throw std::domain_error("w_integral_exact: requires H >= 1");
    const double tau = b / static_cast<double>(h);
    if (!(tau > 0.0) || tau > 0.5)
        throw std::domain_error("w_integral_exact: B/H must lie in (0, 1/2]");
    // |U|^2 = sum_{|d|<H} (H-|d|) e(d alpha); integrate each mode against
    // (1 + |alpha| N) over [-tau, tau]:
    //   K0(d) = sin(2 pi d tau)/(pi d),               K0(0) = 2 tau
    //   K1(d) = tau sin(2 pi d tau)/(pi d)
    //           + (cos(2 pi d tau) - 1)/(2 pi^2 d^2), K1(0) = tau^2
    const double nd = static_cast<double>(big_n);
    const std::int64_t hh = static_cast<std::int64_t>(h);
    double sum = 0.0, comp = 0.0;
    for (std::int64_t d = -(hh - 1); d <= hh - 1; ++d) {
        const double cd = static_cast<double>(hh - std::llabs(d));
        double k0, k1;
        if (d == 0) {
            k0 = 2.0 * tau;
            k1 = tau * tau;
        } else {
            const double dd = static_cast<double>(d);
            const double s = std::sin(special::kTwoPi * dd * tau);
            const double c = std::cos(special::kTwoPi * dd * tau);
            k0 = s / (special::kPi * dd);
            k1 = tau * s / (special::kPi * dd) + (c - 1.0) / (2.0 * special::kPi * special::kPi * dd * dd);
        }
        const double y = cd * (k0 + nd * k1) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace circlelab::quadrature
