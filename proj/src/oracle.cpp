#include "entanglekit/oracle.hpp"

#include <cmath>
#include <stdexcept>

// The system lapack.h defaults to C99 _Complex; route it to std::complex
// so Eigen buffers can be passed straight through.
#include <complex>
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "entanglekit/analytic.hpp"

namespace entanglekit {

namespace {

std::vector<double> axis_nodes(double center, double halfspan, int n) {
    std::vector<double> k(n);
    const double h = 2.0 * halfspan / (n - 1);
    for (int i = 0; i < n; ++i) k[i] = center - halfspan + i * h;
    return k;
}

std::vector<double> axis_weights(double halfspan, int n) {
    const double h = 2.0 * halfspan / (n - 1);
    std::vector<double> w(n, h);
    w.front() = 0.5 * h;   // endpoint amplitudes are ~e^-18 at 6 sigma,
    w.back() = 0.5 * h;    // so halving them only keeps the rule honest
    return w;
}

void finalize_norm(WaveMatrix& w) {
    const double pre = w.values.norm();
    w.norm_deficit = std::abs(1.0 - pre);
    if (w.norm_deficit > 1e-6)
        throw std::runtime_error("grid does not resolve the state: normalization deficit " +
                                 std::to_string(w.norm_deficit));
    w.values /= pre;
}

} // namespace

MarginalMoments marginal_moments(const SystemParams& p) {
    const DerivedScales s = derive_scales(p);
    // |Psi|^2 ~ exp(-B^2(kappa-K)^2 - b^2 xi^2): Var kappa = 1/(2B^2),
    // Var xi = 1/(2b^2), independent; k1 = (m1/M)kappa - xi, k2 = (m2/M)kappa + xi.
    const double vk = 1.0 / (2.0 * p.B * p.B);
    const double vx = 1.0 / (2.0 * s.b * s.b);
    const double r1 = p.m1 / s.M, r2 = p.m2 / s.M;
    MarginalMoments m{};
    m.mean1 = r1 * p.K;
    m.mean2 = r2 * p.K;
    m.sigma1 = std::sqrt(r1 * r1 * vk + vx);
    m.sigma2 = std::sqrt(r2 * r2 * vk + vx);
    return m;
}

GridSpec build_grid(const SystemParams& p, double t, int n) {
    (void)t;   // |Psi| is t-invariant; grid geometry depends on params only
    if (n < 8) throw std::invalid_argument("grid needs n >= 8");
    if (n > 512) throw std::invalid_argument("grid capped at n = 512");
    const MarginalMoments m = marginal_moments(p);
    GridSpec g;
    g.n = n;
    g.k1_center = m.mean1;
    g.k2_center = m.mean2;
    g.k1_halfspan = 6.0 * m.sigma1;
    g.k2_halfspan = 6.0 * m.sigma2;
    return g;
}

void validate_grid(const GridSpec& g, const SystemParams& p) {
    if (g.n < 8) throw std::invalid_argument("grid needs n >= 8");
    if (g.n > 512) throw std::invalid_argument("grid capped at n = 512");
    if (!(g.k1_halfspan > 0.0) || !(g.k2_halfspan > 0.0))
        throw std::invalid_argument("grid halfspans must be positive");
    const MarginalMoments m = marginal_moments(p);
    // Coverage, not just width: a grid centered away from the marginal means
    // (stale parameters, missed boost) must fail here, not at the norm check.
    const double slack = 1.0 + 1e-12;
    if (std::abs(g.k1_center - m.mean1) + 6.0 * m.sigma1 > g.k1_halfspan * slack ||
        std::abs(g.k2_center - m.mean2) + 6.0 * m.sigma2 > g.k2_halfspan * slack)
        throw std::invalid_argument("grid must cover 6 marginal sigma around the state");
}

WaveMatrix sample_wave(const SystemParams& p, double t, const GridSpec& g) {
    validate_grid(g, p);
    WaveMatrix w;
    w.grid = g;
    w.k1 = axis_nodes(g.k1_center, g.k1_halfspan, g.n);
    w.k2 = axis_nodes(g.k2_center, g.k2_halfspan, g.n);
    w.w1 = axis_weights(g.k1_halfspan, g.n);
    w.w2 = axis_weights(g.k2_halfspan, g.n);
    w.values.resize(g.n, g.n);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            w.values(i, j) = psi_particles(w.k1[i], w.k2[j], t, p) *
                             std::sqrt(w.w1[i] * w.w2[j]);
    finalize_norm(w);
    return w;
}

WaveMatrix sample_reversed_wave(const SystemParams& p, double T, double t,
                                const GridSpec& g) {
    SystemParams reflected = p;
    reflected.K = -p.K;
    validate_grid(g, reflected);
    const DerivedScales s = derive_scales(p);
    WaveMatrix w;
    w.grid = g;
    w.k1 = axis_nodes(g.k1_center, g.k1_halfspan, g.n);
    w.k2 = axis_nodes(g.k2_center, g.k2_halfspan, g.n);
    w.w1 = axis_weights(g.k1_halfspan, g.n);
    w.w2 = axis_weights(g.k2_halfspan, g.n);
    w.values.resize(g.n, g.n);
    for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) {
            // initial data: conjugated, momentum-reflected state at time T
            const cplx psi0 = std::conj(psi_particles(-w.k1[i], -w.k2[j], T, p));
            // forward evolution by t: free CM phase, oscillator ground phase
            const double kappa = w.k1[i] + w.k2[j];
            const double phase = -p.hbar * t * kappa * kappa / (2.0 * s.M) -
                                 0.5 * p.omega * t;
            w.values(i, j) = psi0 * cplx(std::cos(phase), std::sin(phase)) *
                             std::sqrt(w.w1[i] * w.w2[j]);
        }
    }
    finalize_norm(w);
    return w;
}

SchmidtResult schmidt_decompose(const WaveMatrix& w, double rank_epsilon) {
    const int n = w.grid.n;
    Eigen::MatrixXcd a = w.values;   // zgesdd destroys its input
    Eigen::VectorXd sv(n);
    Eigen::MatrixXcd u(n, n), vt(n, n);
    const lapack_int info = LAPACKE_zgesdd(
        LAPACK_COL_MAJOR, 'A', n, n, a.data(), n, sv.data(), u.data(), n,
        vt.data(), n);
    if (info != 0)
        throw std::runtime_error("SVD failed to converge (zgesdd info=" +
                                 std::to_string(info) + ")");

    SchmidtResult r;
    r.rank_epsilon = rank_epsilon;
    r.lambdas.resize(n);
    int kept = 0;
    for (int i = 0; i < n; ++i) {
        r.lambdas[i] = sv[i] * sv[i];
        if (r.lambdas[i] > rank_epsilon) kept = i + 1;
    }
    r.modes1 = u.leftCols(kept);
    r.modes2 = vt.topRows(kept).transpose();   // unconjugated right factors
    r.recon_residual =
        (u * sv.asDiagonal() * vt - w.values).norm();

    double p2 = 0.0, vn = 0.0;
    for (double l : r.lambdas) {
        p2 += l * l;
        if (l > 0.0) vn -= l * std::log(l);
    }
    r.linear_delta = 1.0 - p2;
    r.von_neumann = vn;
    r.renyi2 = -std::log(p2);
    return r;
}

Eigen::MatrixXcd partial_trace(const WaveMatrix& w, int which) {
    if (which == 1) return w.values * w.values.adjoint();
    if (which == 2) return (w.values.adjoint() * w.values).conjugate();
    throw std::invalid_argument("partial_trace: which must be 1 or 2");
}

double purity(const Eigen::MatrixXcd& rho) {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10)
        throw std::invalid_argument("purity expects a hermitian matrix");
    return (rho * rho).trace().real();
}

std::vector<double> clamped_descending_spectrum(const Eigen::VectorXd& evals) {
    std::vector<double> l(evals.data(), evals.data() + evals.size());
    for (double& v : l) {
        if (v < -1e-12)
            throw std::runtime_error("spectrum has eigenvalue " + std::to_string(v) +
                                     " below clamping tolerance");
        if (v < 0.0) v = 0.0;
    }
    std::sort(l.begin(), l.end(), std::greater<double>());
    return l;
}

double idempotency_check(const WaveMatrix& w) {
    const int n = w.grid.n;
    if (n > 64)
        throw std::length_error("explicit idempotency check materializes n^2 x n^2; n <= 64");
    const Eigen::VectorXcd v =
        Eigen::Map<const Eigen::VectorXcd>(w.values.data(), n * n);
    const Eigen::MatrixXcd rho = v * v.adjoint();
    return (rho * rho - rho).norm();
}

double idempotency_check_implicit(const WaveMatrix& w) {
    const double nu2 = w.values.squaredNorm();
    return std::abs(nu2 - 1.0) * nu2;
}

PartnerMode partner_mode(const WaveMatrix& w, const Eigen::VectorXcd& mode1,
                         double lambda, double rank_epsilon) {
    if (!(lambda > rank_epsilon))
        throw std::invalid_argument("partner_mode needs lambda above rank_epsilon");
    if (mode1.size() != w.grid.n)
        throw std::invalid_argument("mode length does not match grid");
    Eigen::VectorXcd tilde = w.values.transpose() * mode1.conjugate();
    const double prenorm = tilde.norm();
    return {tilde / prenorm, prenorm};
}

double subspace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("subspace_distance: dimension mismatch");
    const auto qa = Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ() *
                    Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    const auto qb = Eigen::HouseholderQR<Eigen::MatrixXcd>(b).householderQ() *
                    Eigen::MatrixXcd::Identity(b.rows(), b.cols());
    return (qa * qa.adjoint() - qb * qb.adjoint()).norm();
}

double oracle_linear_delta(const SystemParams& p, double t, int n) {
    const WaveMatrix w = sample_wave(p, t, build_grid(p, t, n));
    return schmidt_decompose(w).linear_delta;
}

double oracle_reversed_delta(const SystemParams& p, double T, double t, int n) {
    SystemParams reflected = p;
    reflected.K = -p.K;
    const GridSpec g = build_grid(reflected, 0.0, n);
    return schmidt_decompose(sample_reversed_wave(p, T, t, g)).linear_delta;
}

} // namespace entanglekit
