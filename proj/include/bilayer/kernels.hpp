// kernels.hpp — row kernels over k-grid dispersion values, scalar and AVX2
//
// Each kernel consumes one row of f(k) values. Reductions use four interleaved
// accumulators (lane i mod 4) combined as (a0+a1)+(a2+a3), so the scalar
// reference and the AVX2 variant produce bitwise identical results. The AVX2
// variant is selected at runtime when the CPU supports it; setting
// BILATTICE_SIMD=scalar forces the reference path.

#pragma once

#include <cstddef>

namespace bilayer::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);
bool avx2_compiled();
bool avx2_supported();

/// ISA used by the dispatching entry points below.
Isa active_isa();
/// Overrides the dispatch (tests); requesting avx2 on an unsupported CPU falls back to scalar.
void set_isa(Isa isa);

/// ω_u, ω_l and optionally sinθ, cosθ (pass nullptr to skip) for each f.
void band_row(const double* f, std::size_t n, double eta, double G,
              double* omega_u, double* omega_l, double* sin_t, double* cos_t);

/// Σ_i [w(f_i) + w(−f_i)] where w(f) = s²/(z−ω_u) + c²/(z−ω_l) for layer 1
/// and the weights swapped for layer 2. Pairing f with −f sums each k with
/// its k+Π partner, which makes the η = −1, z = 0 value exactly zero.
double self_energy_pair_row(const double* f, std::size_t n, double z, double eta,
                            double G, int layer);

/// Resolvent entries of (E − H(k))^{-1}: r11 = (E−ηf)/det, r21 = G/det,
/// r22 = (E−f)/det with det = (E−f)(E−ηf) − G².
void resolvent_row(const double* f, std::size_t n, double E, double eta, double G,
                   double* r11, double* r21, double* r22);

namespace scalar {
void band_row(const double* f, std::size_t n, double eta, double G,
              double* omega_u, double* omega_l, double* sin_t, double* cos_t);
double self_energy_pair_row(const double* f, std::size_t n, double z, double eta,
                            double G, int layer);
void resolvent_row(const double* f, std::size_t n, double E, double eta, double G,
                   double* r11, double* r21, double* r22);
} // namespace scalar

namespace avx2 {
void band_row(const double* f, std::size_t n, double eta, double G,
              double* omega_u, double* omega_l, double* sin_t, double* cos_t);
double self_energy_pair_row(const double* f, std::size_t n, double z, double eta,
                            double G, int layer);
void resolvent_row(const double* f, std::size_t n, double E, double eta, double G,
                   double* r11, double* r21, double* r22);
} // namespace avx2

} // namespace bilayer::kernels
