// kernels_scalar.cpp — reference implementations of the k-grid row kernels

#include "bilayer/kernels.hpp"

#include <cmath>

namespace bilayer::kernels::scalar {

namespace {

struct Modes {
    double wu, wl, s2, c2;
};

inline Modes modes(double f, double a, double b, double eta, double G2) {
    const double bf = b * f;
    const double r = std::sqrt(bf * bf + G2);
    const double af = a * f;
    const double ef = eta * f;
    const double wu = af + r;
    const double wl = af - r;
    const double du = wl - ef;
    const double dc = wu - ef;
    return {wu, wl, G2 / (G2 + du * du), G2 / (G2 + dc * dc)};
}

inline double weighted(const Modes& m, double z, int layer) {
    const double iu = 1.0 / (z - m.wu);
    const double il = 1.0 / (z - m.wl);
    return layer == 1 ? m.s2 * iu + m.c2 * il : m.c2 * iu + m.s2 * il;
}

} // namespace

void band_row(const double* f, std::size_t n, double eta, double G,
              double* omega_u, double* omega_l, double* sin_t, double* cos_t) {
    const double a = 0.5 * (1.0 + eta);
    const double b = 0.5 * (1.0 - eta);
    const double G2 = G * G;
    for (std::size_t i = 0; i < n; ++i) {
        const Modes m = modes(f[i], a, b, eta, G2);
        omega_u[i] = m.wu;
        omega_l[i] = m.wl;
        if (sin_t) sin_t[i] = std::sqrt(m.s2);
        if (cos_t) cos_t[i] = std::sqrt(m.c2);
    }
}

double self_energy_pair_row(const double* f, std::size_t n, double z, double eta,
                            double G, int layer) {
    const double a = 0.5 * (1.0 + eta);
    const double b = 0.5 * (1.0 - eta);
    const double G2 = G * G;
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = weighted(modes(f[i], a, b, eta, G2), z, layer) +
                         weighted(modes(-f[i], a, b, eta, G2), z, layer);
        acc[i & 3] += t;
    }
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void resolvent_row(const double* f, std::size_t n, double E, double eta, double G,
                   double* r11, double* r21, double* r22) {
    const double G2 = G * G;
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = E - f[i];
        const double x2 = E - eta * f[i];
        const double inv = 1.0 / (x1 * x2 - G2);
        r11[i] = x2 * inv;
        r21[i] = G * inv;
        r22[i] = x1 * inv;
    }
}

} // namespace bilayer::kernels::scalar
