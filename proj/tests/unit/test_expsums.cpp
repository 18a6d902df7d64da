#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>

#include "circlelab/expsums.hpp"
#include "circlelab/sieve.hpp"
#include "circlelab/special.hpp"

using namespace circlelab;
using expsums::CoefficientSeries;
using expsums::SeriesKind;
using special::Complex;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

// deterministic alpha stream (splitmix64)
struct Alphas {
    std::uint64_t s;
    explicit Alphas(std::uint64_t seed) : s(seed) {}
    double next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
    }
};

bool is_prime_td(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("reduced phase keeps full precision at large frequencies") {
    // reference in quad precision: the double*double product fits a
    // __float128 significand exactly, so frac128 is the true value
    Alphas rng(11);
    for (int i = 0; i < 200; ++i) {
        const double alpha = rng.next();
        const double freq = std::floor(1e9 + 8.9e9 * (rng.next() + 0.5));
        const __float128 prod = static_cast<__float128>(freq) * static_cast<__float128>(alpha);
        const long long nearest = llrintl(static_cast<long double>(prod));
        const __float128 frac128 = prod - static_cast<__float128>(nearest);
        const double got = expsums::reduced_phase(freq, alpha);
        double diff = std::abs(static_cast<double>(frac128 - static_cast<__float128>(got)));
        if (diff > 0.5) diff = 1.0 - diff;  // both representatives are valid mod 1
        CHECK(diff <= 1e-15);
    }
}

TEST_CASE("build_s_tilde single-term readoff at ell=1") {
    const auto s = expsums::build_s_tilde(1, 10, 1e-8);
    bool found = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.frequencies()[i] == 2) {
            CHECK(rel(s.weights()[i], std::log(2.0) * std::exp(-0.2)) <= 1e-15);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("build_s_tilde value at zero tracks the smooth main term") {
    const auto s = expsums::build_s_tilde(2, 1000000, 1e-8);
    const double got = s.value_at(0.0).real();
    const double want = special::gamma(0.5) * 1000.0 / 2.0;
    CHECK(std::abs(got - want) / want <= 0.15);
}

TEST_CASE("conjugate symmetry of tilde series") {
    const auto s = expsums::build_s_tilde(2, 5000, 1e-8);
    for (double a : {0.3, -0.3, 0.11}) {
        const Complex left = s.value_at(-a);
        const Complex right = std::conj(s.value_at(a));
        CHECK(std::abs(left - right) <= 1e-12 * (1.0 + std::abs(right)));
    }
}

TEST_CASE("S~ minus V~ is supported on proper prime powers only") {
    const auto s = expsums::build_s_tilde(2, 10000, 1e-8);
    const auto v = expsums::build_v_tilde(2, 10000, 1e-8);
    const auto d = expsums::series_difference(s, v);
    CHECK(d.size() > 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::uint64_t m = sieve::nth_root_floor(d.frequencies()[i], 2);
        REQUIRE(m * m == d.frequencies()[i]);  // q = m^2 exactly
        CHECK_FALSE(is_prime_td(m));           // prime entries cancel exactly
    }
}

TEST_CASE("sup of |S~ - V~| obeys the N^{1/(2l)} envelope") {
    Alphas rng(42);
    for (std::uint64_t n : {std::uint64_t{10000}, std::uint64_t{100000}}) {
        const auto s = expsums::build_s_tilde(2, n, 1e-8);
        const auto v = expsums::build_v_tilde(2, n, 1e-8);
        const auto d = expsums::series_difference(s, v);
        double sup = 0.0;
        for (int i = 0; i < 64; ++i) sup = std::max(sup, std::abs(d.value_at(rng.next())));
        CHECK(sup <= 5.0 * std::pow(static_cast<double>(n), 0.25));
    }
}

TEST_CASE("V~ frequencies start at the prime squares") {
    const auto v = expsums::build_v_tilde(2, 100, 1e-8);
    REQUIRE(v.size() >= 3);
    CHECK(v.frequencies()[0] == 4);
    CHECK(v.frequencies()[1] == 9);
    CHECK(v.frequencies()[2] == 25);
}

TEST_CASE("finite sums: T2 count, f_k(0), V2 support") {
    const auto t2 = expsums::build_finite(SeriesKind::Tfinite, 2.0, 100, 4.0);
    CHECK(t2.size() == 6);  // m in {5..10}
    CHECK(t2.value_at(0.0).real() == doctest::Approx(6.0).epsilon(1e-14));

    const auto f3 = expsums::build_finite(SeriesKind::Ffinite, 3.0, 100, 4.0);
    double direct = 0.0;
    for (std::uint64_t m = 25; m <= 100; ++m)
        direct += std::pow(static_cast<double>(m), 1.0 / 3.0 - 1.0) / 3.0;
    CHECK(rel(f3.value_at(0.0).real(), direct) <= 1e-13);

    const auto v2 = expsums::build_finite(SeriesKind::Vfinite, 2.0, 100, 100.0);
    std::vector<std::uint64_t> qs(v2.frequencies().begin(), v2.frequencies().end());
    CHECK(qs == std::vector<std::uint64_t>{4, 9, 25, 49});
}

TEST_CASE("non-integer k is rejected for coefficient series") {
    CHECK_THROWS_AS(expsums::build_finite(SeriesKind::Tfinite, 2.5, 1000, 4.0),
                    std::invalid_argument);
}

TEST_CASE("direct_value matches the series on integer k") {
    const std::uint64_t n = 2000;
    const double a = 4.0;
    const auto t = expsums::build_finite(SeriesKind::Tfinite, 2.0, n, a);
    const auto f = expsums::build_finite(SeriesKind::Ffinite, 2.0, n, a);
    Alphas rng(5);
    for (int i = 0; i < 10; ++i) {
        const double alpha = rng.next();
        CHECK(std::abs(expsums::direct_value(SeriesKind::Tfinite, 2.0, n, a, alpha) -
                       t.value_at(alpha)) <= 1e-9 * (1.0 + std::abs(t.value_at(alpha))));
        CHECK(std::abs(expsums::direct_value(SeriesKind::Ffinite, 2.0, n, a, alpha) -
                       f.value_at(alpha)) <= 1e-9 * (1.0 + std::abs(f.value_at(alpha))));
    }
}

TEST_CASE("U basics and the min(H, 1/|alpha|) majorant") {
    const auto u2 = expsums::build_u(2);
    CHECK(std::abs(u2.value_at(0.5)) <= 1e-14);  // e(1/2) + e(1) = 0
    const auto u9 = expsums::build_u(9);
    CHECK(u9.value_at(0.0).real() == doctest::Approx(9.0).epsilon(1e-15));

    Alphas rng(77);
    for (int i = 0; i < 1000; ++i) {
        const double alpha = rng.next();
        const std::uint64_t h = 1 + (static_cast<std::uint64_t>((rng.next() + 0.5) * 997) % 997);
        const auto u = expsums::build_u(h);
        const double bound =
            std::min(static_cast<double>(h), 1.0 / std::max(std::abs(alpha), 1e-300));
        CHECK(std::abs(u.value_at(alpha)) <= bound * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("closed-form and direct evaluation agree for U") {
    Alphas rng(3);
    for (std::uint64_t h : {std::uint64_t{10}, std::uint64_t{1000}, std::uint64_t{100000}}) {
        const auto u = expsums::build_u(h);
        for (int i = 0; i < 8; ++i) {
            const double alpha = rng.next();
            const Complex fast = u.value_at(alpha);
            const Complex slow = u.value_at_direct(alpha);
            CHECK(std::abs(fast - slow) <=
                  1e-11 * (1.0 + std::abs(slow)) + 1e-11 * std::sqrt(static_cast<double>(h)));
        }
    }
}

TEST_CASE("recurrence path agrees with per-term reduction") {
    // f_k has a long contiguous frequency run, exercising the rotation path
    const auto f = expsums::build_finite(SeriesKind::Ffinite, 2.0, 20000, 8.0);
    Alphas rng(9);
    for (int i = 0; i < 12; ++i) {
        const double alpha = rng.next();
        const Complex fast = f.value_at(alpha);
        const Complex slow = f.value_at_direct(alpha);
        CHECK(std::abs(fast - slow) <= 1e-10 * (1.0 + std::abs(slow)));
    }
}

TEST_CASE("value_at(-alpha) is the conjugate") {
    const auto f = expsums::build_finite(SeriesKind::Sfinite, 2.0, 3000, 5.0);
    Alphas rng(21);
    for (int i = 0; i < 10; ++i) {
        const double alpha = rng.next();
        CHECK(std::abs(f.value_at(-alpha) - std::conj(f.value_at(alpha))) <=
              1e-12 * (1.0 + std::abs(f.value_at(alpha))));
    }
}

TEST_CASE("truncation soundness under a tighter budget") {
    const double eps = 1e-7;
    const auto coarse = expsums::build_s_tilde(2, 20000, eps);
    const auto fine = expsums::build_s_tilde(2, 20000, eps / 10.0);
    CHECK(coarse.meta().tail_dropped <= eps);
    CHECK(fine.meta().tail_dropped <= eps / 10.0);
    for (double a : {0.0, 0.17, -0.42}) {
        CHECK(std::abs(coarse.value_at(a) - fine.value_at(a)) <= eps);
    }
}

TEST_CASE("main_term_factor values and bounds") {
    const std::uint64_t n = 40000;
    const unsigned ell = 2;
    const Complex at0 = expsums::main_term_factor(ell, n, 0.0);
    CHECK(rel(at0.real(), special::gamma(0.5) / 2.0 * std::sqrt(static_cast<double>(n))) <= 1e-13);
    CHECK(std::abs(at0.imag()) <= 1e-10 * at0.real());

    Alphas rng(13);
    for (int i = 0; i < 20; ++i) {
        const double a = rng.next();
        const Complex p = expsums::main_term_factor(ell, n, a);
        const Complex m = expsums::main_term_factor(ell, n, -a);
        CHECK(std::abs(p - std::conj(m)) <= 1e-13 * (1.0 + std::abs(p)));
        if (std::abs(a) >= 1.0 / static_cast<double>(n)) {
            const double bound = special::gamma(1.0 / ell) / ell *
                                 std::pow(special::kTwoPi * std::abs(a), -1.0 / ell) *
                                 std::pow(2.0, 0.5 / ell);
            CHECK(std::abs(p) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("series dump writes CSV plus JSON sidecar") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "circlelab_test_dump";
    fs::create_directories(dir);
    const std::string csv = (dir / "u.csv").string();
    expsums::dump_series_csv(expsums::build_u(5), csv);

    std::ifstream in(csv);
    std::string first;
    std::getline(in, first);
    CHECK(first.substr(0, 16) == "frequency,weight");
    CHECK(fs::exists(dir / "u.json"));

    std::ifstream meta(dir / "u.json");
    std::string body((std::istreambuf_iterator<char>(meta)), std::istreambuf_iterator<char>());
    CHECK(body.find("\"kind\":\"u\"") != std::string::npos);
    CHECK(body.find("\"schema_version\":1") != std::string::npos);
    fs::remove_all(dir);
}
