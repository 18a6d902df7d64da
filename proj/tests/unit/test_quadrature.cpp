#include <doctest.h>

#include <cmath>
#include <complex>

#include "circlelab/expsums.hpp"
#include "circlelab/quadrature.hpp"

using namespace circlelab;
using expsums::SeriesKind;
using quadrature::Factor;
using quadrature::Interval;
using special::Complex;

namespace {
double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }
}  // namespace

TEST_CASE("interval validation") {
    CHECK_THROWS_AS((Interval{0.3, 0.1, false}).validate(), std::domain_error);
    CHECK_THROWS_AS((Interval{-0.7, 0.5, false}).validate(), std::domain_error);
    CHECK_NOTHROW(Interval::tail(0.01).validate());
    CHECK_THROWS_AS(Interval::tail(0.7).validate(), std::domain_error);
}

TEST_CASE("integral_product orthogonality for U") {
    const auto u = expsums::build_u(20);
    for (std::int64_t m = 1; m <= 20; ++m) {
        const Factor plain[] = {{&u, false}};
        CHECK(integral_product(plain, m).real() == doctest::Approx(1.0).epsilon(1e-15));
        const Factor conj[] = {{&u, true}};
        CHECK(integral_product(conj, -m).real() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(integral_product(conj, m).real() == doctest::Approx(0.0));
    }
    const Factor plain[] = {{&u, false}};
    CHECK(integral_product(plain, 0).real() == 0.0);
    CHECK(integral_product(plain, 21).real() == 0.0);
}

TEST_CASE("integral_product Parseval pairing") {
    const auto s = expsums::build_s_tilde(2, 3000, 1e-8);
    const Factor fs[] = {{&s, false}, {&s, true}};
    const double via_product = integral_product(fs, 0).real();
    CHECK(rel(via_product, s.parseval()) <= 1e-13);
}

TEST_CASE("integral_product single factor reads off the stored weight") {
    const auto s = expsums::build_s_tilde(2, 500, 1e-8);
    const Factor f[] = {{&s, false}};
    for (std::size_t i = 0; i < s.size(); i += 3)
        CHECK(integral_product(f, static_cast<std::int64_t>(s.frequencies()[i])).real() ==
              s.weights()[i]);
    CHECK(integral_product(f, 3).real() == 0.0);  // 3 is not a square of a prime power
}

TEST_CASE("grid_integral: |U|^2 over the full interval is H") {
    const std::uint64_t h = 50;
    const auto u = expsums::build_u(h);
    auto f = [&u](double a) { return std::norm(u.value_at(a)); };
    const auto q = quadrature::grid_integral(f, Interval::full(), quadrature::nyquist_grid(u),
                                             quadrature::WeightKind::one, 0.0, 1e-8);
    CHECK(q.converged);
    CHECK(rel(q.value, static_cast<double>(h)) <= 1e-8);
}

TEST_CASE("grid_integral: 1/|alpha| over I(omega)") {
    for (double omega : {0.01, 0.1}) {
        auto one = [](double) { return 1.0; };
        const auto q =
            quadrature::grid_integral(one, Interval::tail(omega), {128, quadrature::QuadRule::trapezoid},
                                      quadrature::WeightKind::inv_abs_alpha, 0.0, 1e-10);
        CHECK(q.converged);
        CHECK(rel(q.value, 2.0 * std::log(1.0 / (2.0 * omega))) <= 1e-8);
    }
}

TEST_CASE("grid_integral flags non-convergence at the cap") {
    auto f = [](double a) { return 1.0 / std::sqrt(std::abs(a - 0.299999)); };
    const auto q = quadrature::grid_integral(f, Interval{0.0, 0.5, false},
                                             {16, quadrature::QuadRule::midpoint},
                                             quadrature::WeightKind::one, 0.0, 1e-14, 1 << 10);
    CHECK_FALSE(q.converged);
}

TEST_CASE("mean_square basics") {
    const auto s = expsums::build_s_tilde(2, 4000, 1e-8);
    CHECK(rel(quadrature::mean_square(s, 0.5), s.parseval()) <= 1e-12);

    double prev = 0.0;
    for (double tau : {1e-4, 1e-3, 1e-2, 0.1, 0.5}) {
        const double v = quadrature::mean_square(s, tau);
        CHECK(v >= prev * (1.0 - 1e-12));
        prev = v;
    }
}

TEST_CASE("mean_square agrees with grid quadrature") {
    const auto s = expsums::build_s_tilde(2, 800, 1e-8);
    const double tau = 0.01;
    const double exact = quadrature::mean_square(s, tau);
    auto f = [&s](double a) { return std::norm(s.value_at(a)); };
    const auto grid =
        quadrature::grid_integral(f, Interval::centered(tau), quadrature::nyquist_grid(s),
                                  quadrature::WeightKind::one, 0.0, 1e-10);
    CHECK(rel(exact, grid.value) <= 1e-8);
}

TEST_CASE("mean_square ratio against the truncated mean-square envelope") {
    const std::uint64_t n = 100000;
    const double l = std::log(static_cast<double>(n));
    const auto s = expsums::build_s_tilde(2, n, 1e-8);
    const double tau = std::pow(static_cast<double>(n), -0.5);
    const double lhs = quadrature::mean_square(s, tau);
    const double rhs = (tau * std::sqrt(static_cast<double>(n)) + 1.0) * l * l * l;
    CHECK(lhs / rhs <= 10.0);
}

TEST_CASE("mean_square and tail fall back to quadrature above the term cap") {
    // force the over-cap route on a low-bandwidth series and check it
    // against the exact kernel route on the same series
    const auto s = expsums::build_finite(SeriesKind::Ffinite, 2.0, 400, 100.0);
    REQUIRE(s.size() > 100);
    for (double tau : {0.003, 0.05}) {
        const double kernel = quadrature::mean_square(s, tau);
        const double quad = quadrature::mean_square(s, tau, /*term_cap=*/100);
        CHECK(rel(quad, kernel) <= 1e-7);
    }
    for (double omega : {0.01, 0.1}) {
        const double kernel = quadrature::tail_mean_square(s, omega);
        const double quad = quadrature::tail_mean_square(s, omega, /*term_cap=*/100);
        CHECK(rel(quad, kernel) <= 1e-6);
    }
    // tau = 1/2 short-circuits to Parseval even above the cap
    const auto f = expsums::build_finite(SeriesKind::Ffinite, 2.0, 30000, 4.0);
    REQUIRE(f.size() > quadrature::kTermCap);
    CHECK(quadrature::mean_square(f, 0.5) == f.parseval());
}

TEST_CASE("cosint reference values") {
    // mpmath ci at 20 digits
    CHECK(rel(quadrature::cosint(1.0), 0.33740392290096813466) <= 1e-13);
    CHECK(rel(quadrature::cosint(10.0), -0.045456433004455372635) <= 4e-12);
    CHECK(std::abs(quadrature::cosint(19.0) - 0.0051503710084261285699) <= 1e-9);
    CHECK(std::abs(quadrature::cosint(20.1) - 0.04622447178897614512) <= 1e-9);
    CHECK(rel(quadrature::cosint(100.0), -0.0051488251426104921444) <= 1e-10);
    CHECK(rel(quadrature::cosint(1000.0), 0.000826315511090682282) <= 1e-9);
    CHECK_THROWS_AS(quadrature::cosint(0.0), std::domain_error);
}

TEST_CASE("tail_mean_square: constant series and monotonicity") {
    // single frequency: |F| is the constant |c|
    expsums::SeriesMeta meta;
    const expsums::CoefficientSeries c(SeriesKind::Tfinite, {5}, {1.7}, meta);
    for (double omega : {0.01, 0.05, 0.2}) {
        CHECK(rel(quadrature::tail_mean_square(c, omega),
                  2.0 * 1.7 * 1.7 * std::log(1.0 / (2.0 * omega))) <= 1e-12);
    }

    const auto s = expsums::build_s_tilde(2, 3000, 1e-8);
    double prev = 1e300;
    for (double omega : {0.001, 0.01, 0.1}) {
        const double v = quadrature::tail_mean_square(s, omega);
        CHECK(v <= prev * (1.0 + 1e-12));
        prev = v;
    }
}

TEST_CASE("tail_mean_square kernel agrees with grid quadrature") {
    const auto s = expsums::build_s_tilde(2, 500, 1e-8);
    const double omega = 0.02;
    const double kernel = quadrature::tail_mean_square(s, omega);
    auto f = [&s](double a) { return std::norm(s.value_at(a)); };
    const auto grid = quadrature::grid_integral(
        f, Interval{omega, 0.5, false}, quadrature::nyquist_grid(s),
        quadrature::WeightKind::inv_abs_alpha, 0.0, 1e-6);
    CHECK(rel(kernel, 2.0 * grid.value) <= 1e-5);
}

TEST_CASE("laplace lemma: single points and the large-X limit") {
    const std::uint64_t n = 10000;
    SUBCASE("mu = 1, X large") {
        const auto lhs = quadrature::laplace_lhs(1000, 1000, 1.0, 64.0);
        CHECK(lhs.converged);
        CHECK(std::abs(lhs.value.real() - std::exp(-1.0)) <= 10.0 / (1000.0 * 64.0));
    }
    SUBCASE("imaginary part vanishes by symmetry") {
        const auto lhs = quadrature::laplace_lhs(n / 2, n, 0.5, 0.5);
        CHECK(lhs.converged);
        CHECK(std::abs(lhs.value.imag()) <= 1e-10 * std::abs(lhs.value.real()));
    }
}

TEST_CASE("oscillatory_integral with a known antiderivative") {
    auto f = [](double a) -> Complex { return expsums::e_of(37.0, a); };
    const auto q = quadrature::oscillatory_integral(f, -0.25, 0.25, 37.0, 1e-12);
    const double want = std::sin(special::kTwoPi * 37.0 * 0.25) * 2.0 / (special::kTwoPi * 37.0);
    CHECK(q.converged);
    CHECK(std::abs(q.value.real() - want) <= 1e-12);
    CHECK(std::abs(q.value.imag()) <= 1e-13);
}

TEST_CASE("u_moment: Parseval at mu = 2 and the log H bound at mu = 1") {
    for (std::uint64_t h : {std::uint64_t{10}, std::uint64_t{100}, std::uint64_t{1000}}) {
        const auto q = quadrature::u_moment(2.0, h);
        CHECK(q.converged);
        CHECK(rel(q.value, static_cast<double>(h)) <= 1e-12);
    }
    for (std::uint64_t h : {std::uint64_t{100}, std::uint64_t{1000}}) {
        const auto q = quadrature::u_moment(1.0, h);
        CHECK(q.converged);
        CHECK(q.value <= 4.0 * std::log(static_cast<double>(h)));
    }
}

TEST_CASE("w_integral_exact agrees with grid quadrature") {
    const std::uint64_t n = 2000, h = 100;
    const double b = 2.0;
    const double exact = quadrature::w_integral_exact(n, h, b);
    const auto u = expsums::build_u(h);
    auto f = [&u](double a) { return std::norm(u.value_at(a)); };
    const auto grid = quadrature::grid_integral(
        f, Interval::centered(b / static_cast<double>(h)), {1 << 12, quadrature::QuadRule::midpoint},
        quadrature::WeightKind::one_plus_alpha_n, static_cast<double>(n), 1e-10);
    CHECK(grid.converged);
    CHECK(rel(exact, grid.value) <= 1e-8);
}

TEST_CASE("nyquist grid is exact for trigonometric polynomials") {
    // random-ish sparse series; 4F+4 points must integrate |F|^2 exactly
    expsums::SeriesMeta meta;
    const expsums::CoefficientSeries s(SeriesKind::Tfinite, {3, 17, 40, 41, 97},
                                       {0.3, -1.2, 2.0, 0.11, -0.7}, meta);
    auto f = [&s](double a) { return std::norm(s.value_at(a)); };
    const auto q = quadrature::grid_integral(f, Interval::full(), quadrature::nyquist_grid(s),
                                             quadrature::WeightKind::one, 0.0, 1e-12);
    CHECK(rel(q.value, s.parseval()) <= 1e-13);
}
