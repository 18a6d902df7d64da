#pragma once
#include <complex>
#include <cstdint>

namespace circlelab::special {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Euler Gamma for positive real arguments.
// Relative error <= 1e-12 on [1e-3, 170] (regression-tested).
double gamma(double x);

// lambda = 1/ell1 + 1/ell2
double lambda_of(int ell1, int ell2);

// density constant Gamma(1/l1) Gamma(1/l2) / (l1 l2 Gamma(lambda)),
// symmetric in its arguments
double density_constant(int ell1, int ell2);

// quasi-exponential factor exp(d (log N / log log N)^{1/3}); requires N >= 16
double a_factor(std::uint64_t n, double d);

// z = 1/N - 2 pi i alpha
Complex z_of(double alpha, std::uint64_t n);

// principal-branch z^{-mu}; Re z = 1/N > 0, so the branch cut is never met
Complex z_pow_neg(double alpha, std::uint64_t n, double mu);

// closed form e^{-n/N} n^{mu-1} / Gamma(mu)
double laplace_rhs(std::uint64_t n, std::uint64_t big_n, double mu);

// Global experiment configuration: exponents, window position/size, and the
// A-factor exponent d. Library primitives accept any lambda; the asymptotic
// drivers additionally require lambda < 1.
struct ProblemParams {
    int ell1 = 2;
    int ell2 = 3;
    std::uint64_t n = 0;   // window base N
    std::uint64_t h = 0;   // window length H, window is [N+1, N+H]
    double d = 1.0;        // A-factor exponent

    double lambda() const { return lambda_of(ell1, ell2); }
    double density() const { return density_constant(ell1, ell2); }
    double a_value() const { return a_factor(n, d); }

    void validate() const;          // basic field checks
    void validate_theorem() const;  // also rejects lambda >= 1

    static std::uint64_t h_from_exponent(std::uint64_t n, double theta);
};

}  // namespace circlelab::special
