#pragma once

#include <complex>
#include <vector>

namespace heatsys::fft {

/// Radix-2 Cooley-Tukey plan for a fixed power-of-two size. Twiddles are
/// tabulated at construction; transforms are deterministic.
class Plan {
public:
    explicit Plan(std::size_t n);

    std::size_t size() const { return n_; }

    /// In-place forward transform (negative-exponent convention).
    void forward(std::complex<double>* a) const;
    /// In-place inverse transform, scaled by 1/n.
    void inverse(std::complex<double>* a) const;

private:
    void run(std::complex<double>* a, bool inverse) const;

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> twiddle_;  // exp(-2 pi i k / n), k < n/2
};

}  // namespace heatsys::fft
