#pragma once

#include <optional>
#include <vector>

#include "entanglekit/model.hpp"

namespace entanglekit {

struct LandscapeRow {
    double alpha;
    double log10_alpha;
    double beta;
    double delta0;
    double tau_ratio;
};

struct LandscapeTable {
    std::vector<LandscapeRow> rows;   // alpha-major: alpha outer, beta inner
    double alpha_min, alpha_max;
    double beta_min, beta_max;
    int n_alpha, n_beta;
};

/// Log-uniform alpha grid x uniform beta grid.  Reciprocal-symmetric alpha
/// windows produce an exactly mirror-symmetric log grid so mass-swap pairs
/// (alpha, 1/alpha) appear as exact row pairs.
LandscapeTable sweep(double alpha_min, double alpha_max, double beta_min,
                     double beta_max, int n_alpha, int n_beta);

enum class ExtremumKind { minimum, maximum, flat4 };

const char* to_string(ExtremumKind k);

/// Nature of the delta0 extremum in alpha at alpha = 1, by central finite
/// differences with relative step 1e-4: second derivative sign decides
/// min/max; |d2| and |d3| below 1e-6 with d4 > 0 reports the quartic floor.
ExtremumKind classify_extremum_at_unit_alpha(double beta);

struct TimeRow {
    double t;
    double delta_analytic;
    std::optional<double> delta_oracle;
    double cm_width_ratio;   // sqrt(1 + t^2/tau_b^2) for the packet clock
};

struct TimeSeries {
    std::vector<TimeRow> rows;
};

/// Uniform grid on [0, t_max].  When with_oracle is set each point also runs
/// a grid Schmidt decomposition at oracle_n points per axis; rows are
/// independent work items fanned out over jobs threads, assembled by index.
TimeSeries time_series(const SystemParams& p, double t_max, int steps,
                       bool with_oracle, int oracle_n = 256, int jobs = 1);

/// Reversed scenario on [0, 2T]: oracle column evolves the conjugated,
/// momentum-reflected state; the analytic column is the mirror Delta(T - t).
TimeSeries time_reversal_series(const SystemParams& p, double T, int steps,
                                int oracle_n = 128, int jobs = 1);

/// Per-beta valley/ridge structure of a sweep, checked against the
/// analytic zero-entropy mass ratios to grid resolution.
struct BetaCutFinding {
    double beta;
    bool bifurcated;           // two off-center valleys plus a ridge at alpha=1
    double argmin_low;         // alpha at the grid minimum on each side
    double argmin_high;
    double argmax_mid;         // ridge position (NaN when not bifurcated)
    double root_low, root_high;   // analytic zero roots (NaN for beta > 0.5)
    double root_delta0_max;    // max delta0 evaluated at the analytic roots
    bool structure_ok;
};

std::vector<BetaCutFinding> analyze_valleys(const LandscapeTable& t);

} // namespace entanglekit
