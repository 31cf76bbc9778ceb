// dispatch.cpp — runtime ISA selection for the row kernels

#include "bilayer/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace bilayer::kernels {

namespace {

Isa detect() {
    if (const char* env = std::getenv("BILATTICE_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    }
    return avx2_supported() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

} // namespace

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_compiled() {
#ifdef BILAYER_HAVE_AVX2
    return true;
#else
    return false;
#endif
}

bool avx2_supported() {
#if defined(BILAYER_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_supported()) isa = Isa::scalar;
    current().store(isa, std::memory_order_relaxed);
}

#ifdef BILAYER_HAVE_AVX2
#define BILAYER_DISPATCH(fn, ...) \
    (active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define BILAYER_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void band_row(const double* f, std::size_t n, double eta, double G,
              double* omega_u, double* omega_l, double* sin_t, double* cos_t) {
    BILAYER_DISPATCH(band_row, f, n, eta, G, omega_u, omega_l, sin_t, cos_t);
}

double self_energy_pair_row(const double* f, std::size_t n, double z, double eta,
                            double G, int layer) {
    return BILAYER_DISPATCH(self_energy_pair_row, f, n, z, eta, G, layer);
}

void resolvent_row(const double* f, std::size_t n, double E, double eta, double G,
                   double* r11, double* r21, double* r22) {
    BILAYER_DISPATCH(resolvent_row, f, n, E, eta, G, r11, r21, r22);
}

#undef BILAYER_DISPATCH

} // namespace bilayer::kernels
