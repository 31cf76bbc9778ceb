// fourier.cpp — FFTW-backed inverse 2D transform

#include "bilayer/fourier.hpp"

#include "bilayer/errors.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace bilayer {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (!ptr) throw NumericalError("allocation_failed", "fftw_malloc failed");
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* ptr;
};

} // namespace

std::vector<std::complex<double>> inverse_dft_2d(const std::vector<std::complex<double>>& in, int n) {
    if (n <= 0) throw ConfigError("bad_grid", "transform size must be positive");
    const std::size_t total = static_cast<std::size_t>(n) * n;
    if (in.size() != total) throw ConfigError("dimension_mismatch", "input is not n x n");
    FftwBuffer buf(total);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(n, n, buf.ptr, buf.ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw NumericalError("fft_plan_failed", "FFTW could not create a plan");
    std::memcpy(buf.ptr, in.data(), sizeof(fftw_complex) * total);
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<std::complex<double>> out(total);
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < total; ++i) out[i] = {buf.ptr[i][0] * scale, buf.ptr[i][1] * scale};
    return out;
}

std::vector<std::complex<double>> inverse_dft_2d(const std::vector<double>& in, int n) {
    std::vector<std::complex<double>> c(in.begin(), in.end());
    return inverse_dft_2d(c, n);
}

} // namespace bilayer
