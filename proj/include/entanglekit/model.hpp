#pragma once

#include <complex>
#include <stdexcept>

namespace entanglekit {

using cplx = std::complex<double>;

/// Physical inputs for two harmonically bound particles whose center of
/// mass moves as a free Gaussian packet.  m1, m2: particle masses;
/// omega: internal oscillator frequency; B: center-of-mass packet width
/// parameter; K: mean total wavenumber; hbar: action scale.
struct SystemParams {
    double m1 = 1.0;
    double m2 = 1.0;
    double omega = 1.0;
    double B = 1.0;
    double K = 0.0;
    double hbar = 1.0;
};

/// Scales derived from SystemParams.  b is the internal (relative) width,
/// B0 the factorization width at which the t=0 state is a product,
/// tau_b the packet spreading time, tau the entanglement saturation time.
struct DerivedScales {
    double M;       // total mass m1+m2
    double mu;      // reduced mass m1*m2/M
    double b;       // sqrt(hbar/(mu*omega))
    double B0;      // b*sqrt(mu/M); Delta(0)=0 iff B=B0
    double tau_b;   // M*B^2/hbar
    double tau;     // tau_b*sqrt((1+m1^2 b^2/(M^2 B^2))(1+m2^2 b^2/(M^2 B^2)))
    double alpha;   // mass ratio m1/m2
    double beta;    // width ratio B/b
};

struct CmWavenumbers {
    double kappa;   // total: k1+k2
    double xi;      // relative: (m1*k2-m2*k1)/M
};

struct ParticleWavenumbers {
    double k1;
    double k2;
};

// Strict validation; throws std::invalid_argument naming the offending field.
void validate(const SystemParams& p);

DerivedScales derive_scales(const SystemParams& p);

CmWavenumbers to_cm(double k1, double k2, const SystemParams& p);
ParticleWavenumbers to_particle(double kappa, double xi, const SystemParams& p);

// Galilean boost: shifts the mean total wavenumber only.
SystemParams boost(const SystemParams& p, double zeta);

/// Params for dimensionless entry: mass ratio alpha and width ratio beta
/// with M = 1, hbar = 1, omega = 1 (so m1 = alpha/(1+alpha), m2 = 1/(1+alpha),
/// b = sqrt(1/(mu)), B = beta*b).
SystemParams params_from_ratios(double alpha, double beta, double K = 0.0);

} // namespace entanglekit
