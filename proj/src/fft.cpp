#include "fpmode/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace fpmode {

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

namespace {

// One table per transform size, shared across calls.
const std::vector<std::complex<double>>& twiddles(size_t n) {
    static std::mutex mutex;
    static std::map<size_t, std::vector<std::complex<double>>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    std::vector<std::complex<double>> table(n / 2);
    for (size_t k = 0; k < n / 2; ++k) {
        double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        table[k] = {std::cos(angle), std::sin(angle)};
    }
    return cache.emplace(n, std::move(table)).first->second;
}

} // namespace

void fft_inplace(std::vector<std::complex<double>>& data) {
    const size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft size must be a power of two");
    if (n == 1)
        return;

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(data[i], data[j]);
    }

    const auto& w = twiddles(n);
    for (size_t len = 2; len <= n; len <<= 1) {
        const size_t stride = n / len;
        for (size_t i = 0; i < n; i += len) {
            for (size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = data[i + j];
                std::complex<double> v = data[i + j + len / 2] * w[j * stride];
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
            }
        }
    }
}

} // namespace fpmode
