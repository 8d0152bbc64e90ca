#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "entanglekit/model.hpp"

namespace entanglekit {

/// Momentum-representation convention.
///
/// The momentum amplitude is the unitary Fourier image (1/sqrt(2*pi) per
/// variable) of the unit-norm position-space initial state, so the CM/relative
/// Gaussians carry exponent factor 1/2:
///     Psi(kappa, xi, t) = sqrt(B*b/pi)
///                         * exp(-i*hbar*kappa^2*t/(2M)) * exp(-B^2(kappa-K)^2/2)
///                         * exp(-i*omega*t/2)           * exp(-b^2*xi^2/2)
/// and the plain-measure L2 norm  ∫∫|Psi|^2 dkappa dxi  is exactly 1
/// (verified by quadrature in the tests).  With this choice the packet
/// spreading time is exactly tau_b = M*B^2/hbar and the purity decay clock is
/// exactly tau from DerivedScales; commonly quoted variants of the amplitude
/// with exponent factor 2 are inconsistent with those clocks by a factor 4.
inline constexpr double momentum_exponent_factor = 0.5;

// Unit-norm prefactor sqrt(2*f*B*b/pi) for exponent factor f.
double momentum_norm_prefactor(const SystemParams& p);

// Position-space initial state (t = 0 anchor for the normalization convention).
cplx psi_position_initial(double R, double r, const SystemParams& p);

// Time-evolved amplitude in CM/relative wavenumbers.
cplx psi_cm_rel(double kappa, double xi, double t, const SystemParams& p);

// Same amplitude in particle wavenumbers (exponent expanded in k1, k2).
cplx psi_particles(double k1, double k2, double t, const SystemParams& p);

// Pure-state density kernel Psi(k1,k2,t) * conj(Psi(k1p,k2p,t)), evaluated
// from a single expanded exponent.
cplx full_density(double k1, double k2, double k1p, double k2p, double t,
                  const SystemParams& p);

/// Reduced kernel rho1(k1,k1';t) = ∫ dk2 Psi(k1,k2,t) conj(Psi(k1',k2,t)),
/// from a complete-the-square Gaussian integration re-derived from scratch.
/// Trace is exactly 1 for all K and t (the K terms cancel algebraically).
cplx reduced_density_1(double k1, double k1p, double t, const SystemParams& p);

// Particle-2 kernel: particle-1 kernel with m1 and m2 swapped, K unchanged.
cplx reduced_density_2(double k2, double k2p, double t, const SystemParams& p);

/// Reference transcription of a commonly quoted closed form for rho1, kept
/// verbatim for comparison only.  Two of its factors disagree with the
/// re-derivation: its (k1-k1') linear factor is real and antisymmetric
/// (breaking hermiticity) and its (k1+k1') linear coefficient has the wrong
/// structure.  See reference_kernel_report for the factor-by-factor verdict;
/// do not use this kernel for physics.
cplx reduced_density_1_reference(double k1, double k1p, double t,
                                 const SystemParams& p);

struct KernelFactorComparison {
    const char* name;
    cplx transcribed;   // coefficient as quoted
    cplx derived;       // coefficient from the re-derivation (same convention)
    bool match;
    const char* note;
};

struct ReferenceKernelReport {
    std::vector<KernelFactorComparison> factors;
    double hermiticity_violation;   // max |rho_ref(a,b) - conj(rho_ref(b,a))| probe
    double derived_hermiticity;     // same probe on the re-derived kernel
};

ReferenceKernelReport reference_kernel_report(const SystemParams& p, double t);

// Linear entropy Delta(t) = 1 - (b/B)(tau_b/tau)/sqrt(1+t^2/tau^2).
// Even in t; evaluated cancellation-free so values near 0 keep full
// absolute accuracy.
double linear_entropy(double t, const SystemParams& p);

// Entanglement saturation time tau (same value as DerivedScales.tau).
double tau_entanglement(const SystemParams& p);

// Delta(0) as a function of the two dimensionless ratios alone.
double initial_linear_entropy(double alpha, double beta);

// tau/tau_b = (1/beta)/(1 - Delta0(alpha,beta)); equals
// tau_entanglement/tau_b identically (asserted in tests).
double tau_ratio(double alpha, double beta);

/// Mass ratios with Delta0 = 0 at width ratio beta:
///   alpha_pm = (1/(2 beta^2))(1 ± sqrt(1-4 beta^2)) - 1,
/// real only for beta <= 0.5; alpha_minus uses the cancellation-free form
/// (1-s)/(1+s).  Roots satisfy alpha_minus * alpha_plus = 1.
std::optional<std::pair<double, double>> zero_entropy_mass_ratios(double beta);

} // namespace entanglekit
