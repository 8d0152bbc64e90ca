#pragma once

#include <vector>

#include <Eigen/Dense>

#include "entanglekit/model.hpp"

namespace entanglekit {

/// Uniform momentum grid, one axis per particle.  Nodes run from
/// center - halfspan to center + halfspan inclusive, spacing
/// h = 2*halfspan/(n-1).
struct GridSpec {
    int n = 0;
    double k1_center = 0.0;
    double k2_center = 0.0;
    double k1_halfspan = 0.0;
    double k2_halfspan = 0.0;

    double h1() const { return 2.0 * k1_halfspan / (n - 1); }
    double h2() const { return 2.0 * k2_halfspan / (n - 1); }
};

/// Marginal mean and standard deviation of |Psi|^2 per particle axis,
/// from the Gaussian quadratic form (time-independent: the modulus carries
/// no t).
struct MarginalMoments {
    double mean1, sigma1;
    double mean2, sigma2;
};

MarginalMoments marginal_moments(const SystemParams& p);

// Centers at the marginal means, halfspans at 6 marginal sigma.
// Rejects n < 8 and n > 512.
GridSpec build_grid(const SystemParams& p, double t, int n);

// Throws if the grid violates its invariants or undercovers 6 sigma.
void validate_grid(const GridSpec& g, const SystemParams& p);

/// Trapezoid-weighted samples values[i][j] = Psi(k1_i, k2_j, t) * sqrt(w_i w_j),
/// renormalized to Frobenius norm 1.  norm_deficit = |1 - pre-normalization
/// norm| is the discretization-quality diagnostic; sampling fails if it
/// exceeds 1e-6.
struct WaveMatrix {
    GridSpec grid;
    Eigen::MatrixXcd values;
    double norm_deficit = 0.0;
    std::vector<double> k1, k2;   // node coordinates
    std::vector<double> w1, w2;   // trapezoid weights
};

WaveMatrix sample_wave(const SystemParams& p, double t, const GridSpec& g);

/// Reversed-scenario state: initial data conj(Psi(-k1,-k2;T)) sampled on g,
/// then evolved forward by time t via pointwise momentum-space phases (exact
/// for this family: the relative factor stays in the oscillator ground state).
/// The grid should be built for the momentum-reflected parameters (K -> -K).
WaveMatrix sample_reversed_wave(const SystemParams& p, double T, double t,
                                const GridSpec& g);

struct SchmidtResult {
    std::vector<double> lambdas;  // full spectrum, descending, sums to 1
    Eigen::MatrixXcd modes1;      // columns: retained particle-1 modes
    Eigen::MatrixXcd modes2;      // columns: retained partner modes
    double rank_epsilon = 1e-12;
    double recon_residual = 0.0;  // Frobenius distance of the full reconstruction
    double linear_delta = 0.0;    // 1 - sum lambda^2
    double von_neumann = 0.0;     // -sum lambda log lambda
    double renyi2 = 0.0;          // -log sum lambda^2
};

/// SVD of the weighted sample matrix; lambda_n = sigma_n^2.  Mode pairs with
/// lambda > rank_epsilon are retained; values[i][j] = sum_n sqrt(lambda_n) *
/// modes1[i][n] * modes2[j][n] (bilinear, no conjugation on modes2).
SchmidtResult schmidt_decompose(const WaveMatrix& w, double rank_epsilon = 1e-12);

// which=1: W W^dag; which=2: conj(W^dag W).  Trace 1, hermitian.
Eigen::MatrixXcd partial_trace(const WaveMatrix& w, int which);

// Trace of rho^2 for a hermitian trace-1 matrix.
double purity(const Eigen::MatrixXcd& rho);

// Descending eigenvalues with the clamping rule: values >= -1e-12 are
// clamped to >= 0, more negative ones are a hard error.
std::vector<double> clamped_descending_spectrum(const Eigen::VectorXd& evals);

/// Frobenius residual ||rho^2 - rho|| of the explicit n^2 x n^2 pure-state
/// density built from the flattened wave matrix.  Memory guard: n <= 64.
double idempotency_check(const WaveMatrix& w);

// Same residual from rank-1 algebra: |nu^2 - 1| * nu^2 with nu = ||W||_F.
double idempotency_check_implicit(const WaveMatrix& w);

struct PartnerMode {
    Eigen::VectorXcd mode;   // normalized
    double prenorm;          // norm before normalization; equals sqrt(lambda)
};

// Contracts Psi against a particle-1 mode: partner_j = sum_i conj(mode1_i) W_ij.
PartnerMode partner_mode(const WaveMatrix& w, const Eigen::VectorXcd& mode1,
                         double lambda, double rank_epsilon = 1e-12);

// Frobenius distance of the orthogonal projectors onto the column spans;
// use for comparing (near-)degenerate mode groups.
double subspace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Convenience: grid-build + sample + decompose, returning the linear entropy.
double oracle_linear_delta(const SystemParams& p, double t, int n);

// Same for the reversed scenario at elapsed time t (forward duration T).
double oracle_reversed_delta(const SystemParams& p, double T, double t, int n);

} // namespace entanglekit
