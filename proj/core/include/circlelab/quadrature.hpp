#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "circlelab/expsums.hpp"

namespace circlelab::quadrature {

using special::Complex;

// Subinterval of [-1/2, 1/2]. With symmetric_tail set the interval stands
// for I(omega) = [-1/2, -omega] u [omega, 1/2] with omega = lo.
struct Interval {
    double lo = -0.5;
    double hi = 0.5;
    bool symmetric_tail = false;

    static Interval full() { return {-0.5, 0.5, false}; }
    static Interval centered(double tau) { return {-tau, tau, false}; }
    static Interval tail(double omega) { return {omega, 0.5, true}; }
    void validate() const;
};

enum class QuadRule { midpoint, trapezoid };

struct GridSpec {
    std::int64_t points = 64;
    QuadRule rule = QuadRule::midpoint;
};

enum class WeightKind {
    one,
    inv_abs_alpha,     // 1/|alpha|; requires an interval away from 0
    abs_u,             // |U(alpha, H)|, closed form; param = H
    one_plus_alpha_n,  // 1 + |alpha| N; param = N
};

struct QuadResult {
    double value = 0.0;
    bool converged = false;
    std::int64_t points = 0;
    double last_delta = 0.0;
};

struct ComplexQuadResult {
    Complex value{0.0, 0.0};
    bool converged = false;
    std::int64_t evals = 0;
    double last_delta = 0.0;
};

// Nyquist-safe grid for trigonometric-polynomial integrands built from a
// series: 4F+4 points, exact below the aliasing rate.
GridSpec nyquist_grid(const expsums::CoefficientSeries& s, QuadRule rule = QuadRule::midpoint);

// Composite midpoint/trapezoid quadrature of f(alpha)*weight(alpha) with a
// doubling refinement loop: stops when successive values agree to rel_tol
// or the point cap is hit (then flagged, never silent). Evaluations are
// parallel over fixed chunks with a chunk-ordered reduction.
QuadResult grid_integral(const std::function<double(double)>& f, Interval iv, GridSpec grid,
                         WeightKind weight = WeightKind::one, double weight_param = 0.0,
                         double rel_tol = 1e-8, std::int64_t max_points = (std::int64_t{1} << 26));

// Exact integral over [-1/2,1/2] of prod_i G_i(alpha) * e(-shift*alpha),
// where G_i is the factor or its complex conjugate: equals the coefficient
// at `shift` of the product series. Sorted-merge / binary-search convolution
// with compensated accumulation; 1 to 3 factors.
struct Factor {
    const expsums::CoefficientSeries* series;
    bool conjugate = false;
};
Complex integral_product(std::span<const Factor> factors, std::int64_t shift);

inline constexpr std::size_t kTermCap = 20000;  // dense double-sum cap

// int_{-tau}^{tau} |F|^2: exact Dirichlet-kernel double sum
//   sum_{a,b} w_a w_b sin(2 pi (f_a - f_b) tau) / (pi (f_a - f_b)),
// diagonal 2 tau. Above term_cap terms the dense sum is replaced by
// oscillation-tracking panel quadrature of |F|^2 (tau = 1/2 short-circuits
// to Parseval).
double mean_square(const expsums::CoefficientSeries& s, double tau,
                   std::size_t term_cap = kTermCap);

// int_{I(omega)} |F|^2 dalpha/|alpha|: exact cosine-integral kernel
//   K(d) = 2 (Ci(pi d) - Ci(2 pi d omega)), K(0) = 2 log(1/(2 omega)),
// same panel fallback above the term cap.
double tail_mean_square(const expsums::CoefficientSeries& s, double omega,
                        std::size_t term_cap = kTermCap);

// int_{-X}^{X} z^{-mu} e(-n alpha) dalpha via oscillatory panels; the
// imaginary part is reported as a symmetry check.
ComplexQuadResult laplace_lhs(std::uint64_t n, std::uint64_t big_n, double mu, double X);

// Composite 16-point Gauss-Legendre panels with the same doubling/flagging
// policy as grid_integral. freq_hint sizes the initial panel count (panels
// track oscillations of e(freq_hint * alpha)).
ComplexQuadResult oscillatory_integral(const std::function<Complex(double)>& f, double lo,
                                       double hi, double freq_hint, double rel_tol = 1e-10,
                                       std::int64_t max_evals = (std::int64_t{1} << 26));

// cosine integral Ci(x) for x > 0
double cosint(double x);

// U-moment curly-U(mu, H) = int |U(alpha,H)|^mu dalpha over [-1/2,1/2]
QuadResult u_moment(double mu, std::uint64_t h, double rel_tol = 1e-7);

// W(N,H,B) = int_{-B/H}^{B/H} (1 + |alpha| N) |U(-alpha,H)|^2 dalpha,
// exact via the autocorrelation of U and closed-form |alpha|-kernels
double w_integral_exact(std::uint64_t big_n, std::uint64_t h, double b);

}  // namespace circlelab::quadrature
