// kernels_avx2.cpp — AVX2 variants of the k-grid row kernels
//
// Same operation sequence as the scalar reference (no FMA contraction), so
// every element and every reduction is bitwise identical to it.

#include "bilayer/kernels.hpp"

#include <immintrin.h>

namespace bilayer::kernels::avx2 {

namespace {

struct Modes {
    __m256d wu, wl, s2, c2;
};

inline Modes modes(__m256d f, __m256d a, __m256d b, __m256d eta, __m256d G2) {
    const __m256d bf = _mm256_mul_pd(b, f);
    const __m256d r = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(bf, bf), G2));
    const __m256d af = _mm256_mul_pd(a, f);
    const __m256d ef = _mm256_mul_pd(eta, f);
    const __m256d wu = _mm256_add_pd(af, r);
    const __m256d wl = _mm256_sub_pd(af, r);
    const __m256d du = _mm256_sub_pd(wl, ef);
    const __m256d dc = _mm256_sub_pd(wu, ef);
    const __m256d s2 = _mm256_div_pd(G2, _mm256_add_pd(G2, _mm256_mul_pd(du, du)));
    const __m256d c2 = _mm256_div_pd(G2, _mm256_add_pd(G2, _mm256_mul_pd(dc, dc)));
    return {wu, wl, s2, c2};
}

inline __m256d weighted(const Modes& m, __m256d z, int layer) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d iu = _mm256_div_pd(one, _mm256_sub_pd(z, m.wu));
    const __m256d il = _mm256_div_pd(one, _mm256_sub_pd(z, m.wl));
    if (layer == 1) return _mm256_add_pd(_mm256_mul_pd(m.s2, iu), _mm256_mul_pd(m.c2, il));
    return _mm256_add_pd(_mm256_mul_pd(m.c2, iu), _mm256_mul_pd(m.s2, il));
}

inline __m256d negate(__m256d x) { return _mm256_xor_pd(x, _mm256_set1_pd(-0.0)); }

} // namespace

void band_row(const double* f, std::size_t n, double eta, double G,
              double* omega_u, double* omega_l, double* sin_t, double* cos_t) {
    const __m256d va = _mm256_set1_pd(0.5 * (1.0 + eta));
    const __m256d vb = _mm256_set1_pd(0.5 * (1.0 - eta));
    const __m256d ve = _mm256_set1_pd(eta);
    const __m256d vG2 = _mm256_set1_pd(G * G);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const Modes m = modes(_mm256_loadu_pd(f + i), va, vb, ve, vG2);
        _mm256_storeu_pd(omega_u + i, m.wu);
        _mm256_storeu_pd(omega_l + i, m.wl);
        if (sin_t) _mm256_storeu_pd(sin_t + i, _mm256_sqrt_pd(m.s2));
        if (cos_t) _mm256_storeu_pd(cos_t + i, _mm256_sqrt_pd(m.c2));
    }
    if (i < n) {
        scalar::band_row(f + i, n - i, eta, G, omega_u + i, omega_l + i,
                         sin_t ? sin_t + i : nullptr, cos_t ? cos_t + i : nullptr);
    }
}

double self_energy_pair_row(const double* f, std::size_t n, double z, double eta,
                            double G, int layer) {
    const __m256d va = _mm256_set1_pd(0.5 * (1.0 + eta));
    const __m256d vb = _mm256_set1_pd(0.5 * (1.0 - eta));
    const __m256d ve = _mm256_set1_pd(eta);
    const __m256d vG2 = _mm256_set1_pd(G * G);
    const __m256d vz = _mm256_set1_pd(z);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vf = _mm256_loadu_pd(f + i);
        const __m256d t = _mm256_add_pd(weighted(modes(vf, va, vb, ve, vG2), vz, layer),
                                        weighted(modes(negate(vf), va, vb, ve, vG2), vz, layer));
        acc = _mm256_add_pd(acc, t);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    if (i < n) {
        // Tail continues the lane assignment i mod 4 exactly as the scalar path.
        double f_tail[4] = {0.0, 0.0, 0.0, 0.0};
        const std::size_t rem = n - i;
        for (std::size_t j = 0; j < rem; ++j) f_tail[j] = f[i + j];
        for (std::size_t j = 0; j < rem; ++j) {
            lanes[j] += scalar::self_energy_pair_row(f_tail + j, 1, z, eta, G, layer);
        }
    }
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

void resolvent_row(const double* f, std::size_t n, double E, double eta, double G,
                   double* r11, double* r21, double* r22) {
    const __m256d vE = _mm256_set1_pd(E);
    const __m256d ve = _mm256_set1_pd(eta);
    const __m256d vG = _mm256_set1_pd(G);
    const __m256d vG2 = _mm256_set1_pd(G * G);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vf = _mm256_loadu_pd(f + i);
        const __m256d x1 = _mm256_sub_pd(vE, vf);
        const __m256d x2 = _mm256_sub_pd(vE, _mm256_mul_pd(ve, vf));
        const __m256d inv = _mm256_div_pd(one, _mm256_sub_pd(_mm256_mul_pd(x1, x2), vG2));
        _mm256_storeu_pd(r11 + i, _mm256_mul_pd(x2, inv));
        _mm256_storeu_pd(r21 + i, _mm256_mul_pd(vG, inv));
        _mm256_storeu_pd(r22 + i, _mm256_mul_pd(x1, inv));
    }
    if (i < n) scalar::resolvent_row(f + i, n - i, E, eta, G, r11 + i, r21 + i, r22 + i);
}

} // namespace bilayer::kernels::avx2
