#include "entanglekit/model.hpp"

#include <cmath>
#include <string>

namespace entanglekit {

namespace {

void require_positive_finite(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0)
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

} // namespace

void validate(const SystemParams& p) {
    require_positive_finite(p.m1, "m1");
    require_positive_finite(p.m2, "m2");
    require_positive_finite(p.omega, "omega");
    require_positive_finite(p.B, "B");
    require_positive_finite(p.hbar, "hbar");
    if (!std::isfinite(p.K))
        throw std::invalid_argument("K must be finite");
}

DerivedScales derive_scales(const SystemParams& p) {
    validate(p);
    DerivedScales s{};
    s.M = p.m1 + p.m2;
    s.mu = p.m1 * p.m2 / s.M;
    s.b = std::sqrt(p.hbar / (s.mu * p.omega));
    s.B0 = s.b * std::sqrt(s.mu / s.M);
    s.tau_b = s.M * p.B * p.B / p.hbar;
    const double x1 = p.m1 * s.b / (s.M * p.B);
    const double x2 = p.m2 * s.b / (s.M * p.B);
    s.tau = s.tau_b * std::sqrt((1.0 + x1 * x1) * (1.0 + x2 * x2));
    s.alpha = p.m1 / p.m2;
    s.beta = p.B / s.b;
    return s;
}

CmWavenumbers to_cm(double k1, double k2, const SystemParams& p) {
    const double M = p.m1 + p.m2;
    return {k1 + k2, (p.m1 * k2 - p.m2 * k1) / M};
}

ParticleWavenumbers to_particle(double kappa, double xi, const SystemParams& p) {
    const double M = p.m1 + p.m2;
    return {p.m1 * kappa / M - xi, p.m2 * kappa / M + xi};
}

SystemParams boost(const SystemParams& p, double zeta) {
    if (!std::isfinite(zeta))
        throw std::invalid_argument("boost must be finite");
    SystemParams q = p;
    q.K += zeta;
    return q;
}

SystemParams params_from_ratios(double alpha, double beta, double K) {
    if (!std::isfinite(alpha) || alpha <= 0.0)
        throw std::invalid_argument("alpha must be positive and finite");
    if (!std::isfinite(beta) || beta <= 0.0)
        throw std::invalid_argument("beta must be positive and finite");
    SystemParams p;
    p.m1 = alpha / (1.0 + alpha);
    p.m2 = 1.0 / (1.0 + alpha);
    p.omega = 1.0;
    p.hbar = 1.0;
    p.K = K;
    const double mu = p.m1 * p.m2;          // M = 1
    const double b = std::sqrt(1.0 / mu);   // hbar = omega = 1
    p.B = beta * b;
    return p;
}

} // namespace entanglekit
