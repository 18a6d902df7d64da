#include "circlelab/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace circlelab::fft {

void transform(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0) return;
    if (n & (n - 1)) throw std::invalid_argument("fft: size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> convolve_real(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(out_len);

    // pack a into the real part and b into the imaginary part
    std::vector<std::complex<double>> buf(n, {0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i) buf[i] = {a[i], buf[i].imag()};
    for (std::size_t i = 0; i < b.size(); ++i) buf[i] = {buf[i].real(), b[i]};
    transform(buf, false);

    // spectra of a and b recovered from the packed transform:
    //   A(k) = (X(k) + conj(X(n-k)))/2, B(k) = (X(k) - conj(X(n-k)))/(2i)
    std::vector<std::complex<double>> prod(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t kc = (n - k) & (n - 1);
        const std::complex<double> x = buf[k];
        const std::complex<double> y = std::conj(buf[kc]);
        const std::complex<double> ak = 0.5 * (x + y);
        const std::complex<double> bk = std::complex<double>(0.0, -0.5) * (x - y);
        prod[k] = ak * bk;
    }
    transform(prod, true);

    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = prod[i].real();
    return out;
}

}  // namespace circlelab::fft
