#include "heatsys/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace heatsys::fft {

Plan::Plan(std::size_t n) : n_(n) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: size must be a power of two");
    bitrev_.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double ang = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
        twiddle_[k] = {std::cos(ang), std::sin(ang)};
    }
}

void Plan::run(std::complex<double>* a, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j = bitrev_[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                std::complex<double> w = twiddle_[k * stride];
                if (inverse) w = std::conj(w);
                const std::complex<double> u = a[start + k];
                const std::complex<double> v = a[start + k + half] * w;
                a[start + k] = u + v;
                a[start + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) a[i] *= s;
    }
}

void Plan::forward(std::complex<double>* a) const { run(a, false); }
void Plan::inverse(std::complex<double>* a) const { run(a, true); }

}  // namespace heatsys::fft
