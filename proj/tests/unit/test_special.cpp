#include <doctest.h>

#include <cmath>
#include <complex>

#include "circlelab/special.hpp"

using namespace circlelab;
using special::Complex;

namespace {
double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
}  // namespace

TEST_CASE("gamma against a high-precision reference table") {
    // 25-digit values computed with arbitrary-precision arithmetic at the
    // exact double arguments
    static const struct {
        double x, g;
    } kRef[] = {
        {0.001, 999.423772484595445298321},
        {0.01, 99.43258511915060163206699},
        {0.1, 9.51350769866873128580798},
        {0.25, 3.625609908221908311930685},
        {0.3333333333333333, 2.678938534707747788911612},
        {0.5, 1.772453850905516027298167},
        {0.75, 1.225416702465177645129098},
        {0.8333333333333334, 1.128787029908125924052006},
        {1.0, 1.0},
        {1.4616321449683622, 0.8856031944108887002788159},
        {2.5, 1.329340388179137020473626},
        {5.0, 24.0},
        {7.75, 3057.822671192607210440251},
        {10.0, 362880.0},
        {15.5, 334838609873.5564569724182},
        {23.25, 2451444254672248147452.996},
        {33.3, 7.487577596522632327444354e+35},
        {47.0, 5.502622159812088949850305e+57},
        {61.75, 1.813450402717521744591687e+83},
        {88.8, 7.568544632197465949364894e+133},
        {111.1, 2.542574377622211903643989e+178},
        {133.75, 4.376442002218743227877488e+225},
        {152.5, 1.062759517022905395739766e+266},
        {163.0, 1.229694218739449434110179e+289},
        {169.99, 4.055472849484991335418088e+304},
        {170.0, 4.269068009004705274939252e+304},
    };
    for (const auto& r : kRef) {
        CAPTURE(r.x);
        CHECK(rel_err(special::gamma(r.x), r.g) <= 1e-12);
    }
}

TEST_CASE("gamma recurrence on [0.1, 50]") {
    for (int i = 0; i < 100; ++i) {
        const double x = 0.1 + (50.0 - 0.1) * i / 99.0;
        CAPTURE(x);
        CHECK(rel_err(special::gamma(x + 1.0), x * special::gamma(x)) <= 1e-12);
    }
}

TEST_CASE("gamma domain") {
    CHECK_THROWS_AS(special::gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(special::gamma(-1.5), std::domain_error);
}

TEST_CASE("lambda_of") {
    CHECK(special::lambda_of(2, 3) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(special::lambda_of(2, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(special::lambda_of(3, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("density constant") {
    CHECK(rel_err(special::density_constant(2, 2), special::kPi / 4.0) <= 1e-12);
    // regression constants fixed from a 40-digit evaluation of
    // Gamma(1/l1) Gamma(1/l2) / (l1 l2 Gamma(lambda))
    CHECK(rel_err(special::density_constant(2, 3), 0.7010910526627271305875095395) <= 1e-13);
    CHECK(rel_err(special::density_constant(3, 3), 0.5888795834284833191045631665) <= 1e-13);

    for (int l1 = 2; l1 <= 10; ++l1) {
        for (int l2 = 2; l2 <= 10; ++l2) {
            CAPTURE(l1);
            CAPTURE(l2);
            const double a = special::density_constant(l1, l2);
            const double b = special::density_constant(l2, l1);
            CHECK(a > 0.0);
            CHECK(rel_err(a, b) <= 1e-14);
        }
    }
}

TEST_CASE("a_factor") {
    CHECK(special::a_factor(1000000, 0.0) == 1.0);
    for (double d : {0.3, 1.0, 2.5}) {
        for (std::uint64_t n : {std::uint64_t{16}, std::uint64_t{1000}, std::uint64_t{1000000}}) {
            CAPTURE(d);
            CAPTURE(n);
            CHECK(rel_err(special::a_factor(n, d) * special::a_factor(n, -d), 1.0) <= 1e-14);
        }
    }
    CHECK(rel_err(special::a_factor(1000000, 1.0), 5.693228548663632004742638652) <= 1e-13);
    CHECK_THROWS_AS(special::a_factor(15, 1.0), std::domain_error);
}

TEST_CASE("z_of") {
    const Complex z0 = special::z_of(0.0, 1000);
    CHECK(z0.real() == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(z0.imag() == 0.0);
    for (double a : {0.1, 0.31, 0.5}) {
        const Complex zp = special::z_of(a, 777);
        const Complex zm = special::z_of(-a, 777);
        CHECK(zp == std::conj(zm));
        CHECK(std::abs(zp) >= std::max(1.0 / 777.0, special::kTwoPi * a) / std::sqrt(2.0) - 1e-15);
    }
}

TEST_CASE("z_pow_neg") {
    const std::uint64_t n = 5000;
    CHECK(rel_err(special::z_pow_neg(0.0, n, 1.0).real(), static_cast<double>(n)) <= 1e-14);
    CHECK(std::abs(special::z_pow_neg(0.0, n, 1.0).imag()) <= 1e-10);

    for (double a : {-0.41, -0.007, 0.003, 0.29}) {
        CAPTURE(a);
        const Complex z = special::z_of(a, n);
        const Complex inv = 1.0 / z;
        const Complex got = special::z_pow_neg(a, n, 1.0);
        CHECK(std::abs(got - inv) / std::abs(inv) <= 1e-14);

        const Complex sq = special::z_pow_neg(a, n, 2.0);
        CHECK(std::abs(sq - inv * inv) / std::abs(inv * inv) <= 1e-13);

        // exponent additivity
        const Complex m1 = special::z_pow_neg(a, n, 0.4);
        const Complex m2 = special::z_pow_neg(a, n, 1.1);
        const Complex m12 = special::z_pow_neg(a, n, 1.5);
        CHECK(std::abs(m1 * m2 - m12) / std::abs(m12) <= 1e-12);
    }
    CHECK_THROWS_AS(special::z_pow_neg(0.1, n, 0.0), std::domain_error);
}

TEST_CASE("complex scalar field axioms (spot checks)") {
    const Complex a{0.3, -1.7}, b{-2.1, 0.4}, c{5.0, 5.0};
    CHECK(std::abs((a + b) + c - (a + (b + c))) <= 1e-15);
    CHECK(std::abs(a * (b + c) - (a * b + a * c)) <= 1e-14);
    CHECK(std::abs(a * b - b * a) == 0.0);
    CHECK(std::abs(a / b * b - a) <= 1e-15);
}

TEST_CASE("laplace_rhs closed form") {
    const std::uint64_t n = 12345;
    CHECK(rel_err(special::laplace_rhs(n, n, 1.0), std::exp(-1.0)) <= 1e-14);
    CHECK(rel_err(special::laplace_rhs(1, n, 0.5),
                  std::exp(-1.0 / static_cast<double>(n)) / std::sqrt(special::kPi)) <= 1e-13);
    CHECK(rel_err(special::laplace_rhs(777, n, 1.0), std::exp(-777.0 / static_cast<double>(n))) <=
          1e-14);
}

TEST_CASE("ProblemParams validation") {
    special::ProblemParams p;
    p.ell1 = 2;
    p.ell2 = 3;
    p.n = 1000;
    p.h = 100;
    CHECK_NOTHROW(p.validate_theorem());

    p.ell2 = 2;  // lambda = 1
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS(p.validate_theorem(), std::domain_error);

    p.ell2 = 3;
    p.h = 0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.h = p.n + 1;
    CHECK_THROWS_AS(p.validate(), std::domain_error);

    CHECK(special::ProblemParams::h_from_exponent(1000000, 0.9) == 251189);
}
