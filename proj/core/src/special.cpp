#include "circlelab/special.hpp"

#include <cmath>
#include <stdexcept>

namespace circlelab::special {

namespace {

// Lanczos coefficients, g = 607/128, 15 terms (Godfrey 2001; same set as
// the Boost/GSL double-precision tables). Gives ~15 significant digits on
// the positive axis.
constexpr double kLanczosG = 4.7421875;  // 607/128
constexpr double kLanczos[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

double lanczos_gamma(double x) {
    // valid for x >= 0.5; caller handles the reflection
    const double z = x - 1.0;
    double acc = kLanczos[0];
    for (int i = 1; i < 15; ++i) acc += kLanczos[i] / (z + i);
    const double t = z + kLanczosG + 0.5;
    // split the power to keep t^(z+0.5) in range for z up to ~170
    const double half = std::pow(t, 0.5 * z + 0.25);
    return std::sqrt(2.0 * kPi) * half * (half * std::exp(-t)) * acc;
}

}  // namespace

double gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma: requires x > 0");
    if (x < 0.5) {
        // reflection; 1-x lands in [0.5, 1)
        return kPi / (std::sin(kPi * x) * lanczos_gamma(1.0 - x));
    }
    return lanczos_gamma(x);
}

double lambda_of(int ell1, int ell2) {
    if (ell1 < 1 || ell2 < 1) throw std::domain_error("lambda_of: exponents must be >= 1");
    return 1.0 / ell1 + 1.0 / ell2;
}

double density_constant(int ell1, int ell2) {
    if (ell1 < 2 || ell2 < 2) throw std::domain_error("density_constant: exponents must be >= 2");
    const double lam = lambda_of(ell1, ell2);
    return gamma(1.0 / ell1) * gamma(1.0 / ell2) / (static_cast<double>(ell1) * ell2 * gamma(lam));
}

double a_factor(std::uint64_t n, double d) {
    if (n < 16) throw std::domain_error("a_factor: requires N >= 16");
    const double logn = std::log(static_cast<double>(n));
    return std::exp(d * std::cbrt(logn / std::log(logn)));
}

Complex z_of(double alpha, std::uint64_t n) {
    if (n < 1) throw std::domain_error("z_of: requires N >= 1");
    return {1.0 / static_cast<double>(n), -kTwoPi * alpha};
}

Complex z_pow_neg(double alpha, std::uint64_t n, double mu) {
    if (!(mu > 0.0)) throw std::domain_error("z_pow_neg: requires mu > 0");
    const Complex z = z_of(alpha, n);
    // principal branch in log-polar form; Re z > 0 keeps arg in (-pi/2, pi/2)
    const double r = std::hypot(z.real(), z.imag());
    const double theta = std::atan2(z.imag(), z.real());
    const double mod = std::exp(-mu * std::log(r));
    return {mod * std::cos(-mu * theta), mod * std::sin(-mu * theta)};
}

double laplace_rhs(std::uint64_t n, std::uint64_t big_n, double mu) {
    if (n < 1 || big_n < 1) throw std::domain_error("laplace_rhs: requires n, N >= 1");
    if (!(mu > 0.0)) throw std::domain_error("laplace_rhs: requires mu > 0");
    const double nd = static_cast<double>(n);
    return std::exp(-nd / static_cast<double>(big_n)) * std::pow(nd, mu - 1.0) / gamma(mu);
}

void ProblemParams::validate() const {
    if (ell1 < 2 || ell2 < 2) throw std::domain_error("ProblemParams: exponents must be >= 2");
    if (n < 2) throw std::domain_error("ProblemParams: N must be >= 2");
    if (h < 1 || h > n) throw std::domain_error("ProblemParams: H must lie in [1, N]");
}

void ProblemParams::validate_theorem() const {
    validate();
    if (lambda() >= 1.0)
        throw std::domain_error(
            "ProblemParams: asymptotic drivers require lambda < 1 (ell1 = ell2 = 2 rejected)");
}

std::uint64_t ProblemParams::h_from_exponent(std::uint64_t n, double theta) {
    const double v = std::pow(static_cast<double>(n), theta);
    return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace circlelab::special
