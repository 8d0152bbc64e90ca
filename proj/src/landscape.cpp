#include "entanglekit/landscape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "entanglekit/analytic.hpp"
#include "entanglekit/oracle.hpp"

namespace entanglekit {

namespace {

// Runs fn(0..count-1) on up to `jobs` threads.  Work is claimed through an
// atomic counter, so results must be written by index; the first exception
// is captured and rethrown on the calling thread after join.
void parallel_for_indexed(int count, int jobs, const std::function<void(int)>& fn) {
    if (jobs < 1) jobs = 1;
    const int workers = std::min(jobs, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

[[noreturn]] void rethrow_with_time(double t) {
    try {
        throw;
    } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << e.what() << " (at t = " << t << ")";
        throw std::runtime_error(msg.str());
    }
}

std::vector<double> log10_alpha_grid(double alpha_min, double alpha_max, int n) {
    std::vector<double> la(static_cast<size_t>(n));
    const double l0 = std::log10(alpha_min);
    const double l1 = std::log10(alpha_max);
    if (n == 1) {
        la[0] = l0;
        return la;
    }
    for (int i = 0; i < n; ++i)
        la[static_cast<size_t>(i)] = l0 + (l1 - l0) * i / (n - 1);
    // Mirror the grid when the window is reciprocal-symmetric so that the
    // alpha -> 1/alpha row pairing holds exactly, not just to rounding.
    if (std::abs(l0 + l1) < 1e-9) {
        for (int i = 0; i < n / 2; ++i)
            la[static_cast<size_t>(n - 1 - i)] = -la[static_cast<size_t>(i)];
        if (n % 2 == 1) la[static_cast<size_t>(n / 2)] = 0.0;
    }
    return la;
}

} // namespace

LandscapeTable sweep(double alpha_min, double alpha_max, double beta_min,
                     double beta_max, int n_alpha, int n_beta) {
    auto check_axis = [](double lo, double hi, int n, const char* name) {
        if (!(lo > 0.0) || !std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument(std::string(name) + " range must be positive and finite");
        if (n < 1) throw std::invalid_argument(std::string(name) + " grid needs at least one point");
        if (n == 1 ? lo != hi : !(lo < hi))
            throw std::invalid_argument(std::string(name) + " range must be increasing (or a single point)");
    };
    check_axis(alpha_min, alpha_max, n_alpha, "alpha");
    check_axis(beta_min, beta_max, n_beta, "beta");

    LandscapeTable table;
    table.alpha_min = alpha_min;
    table.alpha_max = alpha_max;
    table.beta_min = beta_min;
    table.beta_max = beta_max;
    table.n_alpha = n_alpha;
    table.n_beta = n_beta;
    table.rows.reserve(static_cast<size_t>(n_alpha) * static_cast<size_t>(n_beta));

    const std::vector<double> la = log10_alpha_grid(alpha_min, alpha_max, n_alpha);
    for (int ia = 0; ia < n_alpha; ++ia) {
        const double alpha = std::pow(10.0, la[static_cast<size_t>(ia)]);
        for (int ib = 0; ib < n_beta; ++ib) {
            const double beta = n_beta == 1
                ? beta_min
                : beta_min + (beta_max - beta_min) * ib / (n_beta - 1);
            LandscapeRow row;
            row.alpha = alpha;
            row.log10_alpha = la[static_cast<size_t>(ia)];
            row.beta = beta;
            row.delta0 = initial_linear_entropy(alpha, beta);
            row.tau_ratio = tau_ratio(alpha, beta);
            table.rows.push_back(row);
        }
    }
    return table;
}

const char* to_string(ExtremumKind k) {
    switch (k) {
        case ExtremumKind::minimum: return "min";
        case ExtremumKind::maximum: return "max";
        case ExtremumKind::flat4: return "flat4";
    }
    return "?";
}

ExtremumKind classify_extremum_at_unit_alpha(double beta) {
    const double h = 1e-4;
    auto f = [beta](double alpha) { return initial_linear_entropy(alpha, beta); };
    const double fm2 = f(1.0 - 2.0 * h), fm1 = f(1.0 - h), f0 = f(1.0),
                 fp1 = f(1.0 + h), fp2 = f(1.0 + 2.0 * h);
    const double d2 = (fp1 - 2.0 * f0 + fm1) / (h * h);
    const double d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
    const double d4 = (fp2 - 4.0 * fp1 + 6.0 * f0 - 4.0 * fm1 + fm2) / (h * h * h * h);
    if (std::abs(d2) <= 1e-6 && std::abs(d3) <= 1e-6 && d4 > 0.0)
        return ExtremumKind::flat4;
    return d2 > 0.0 ? ExtremumKind::minimum : ExtremumKind::maximum;
}

TimeSeries time_series(const SystemParams& p, double t_max, int steps,
                       bool with_oracle, int oracle_n, int jobs) {
    validate(p);
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw std::invalid_argument("t_max must be positive and finite");
    if (steps < 2) throw std::invalid_argument("steps must be at least 2");

    const DerivedScales s = derive_scales(p);
    TimeSeries series;
    series.rows.resize(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        TimeRow& row = series.rows[static_cast<size_t>(i)];
        row.t = t_max * i / (steps - 1);
        row.delta_analytic = linear_entropy(row.t, p);
        const double u = row.t / s.tau_b;
        row.cm_width_ratio = std::sqrt(1.0 + u * u);
    }
    if (with_oracle) {
        parallel_for_indexed(steps, jobs, [&](int i) {
            TimeRow& row = series.rows[static_cast<size_t>(i)];
            try {
                row.delta_oracle = oracle_linear_delta(p, row.t, oracle_n);
            } catch (...) {
                rethrow_with_time(row.t);
            }
        });
    }
    return series;
}

TimeSeries time_reversal_series(const SystemParams& p, double T, int steps,
                                int oracle_n, int jobs) {
    validate(p);
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("T must be positive and finite");
    if (steps < 2) throw std::invalid_argument("steps must be at least 2");

    const DerivedScales s = derive_scales(p);
    TimeSeries series;
    series.rows.resize(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        TimeRow& row = series.rows[static_cast<size_t>(i)];
        row.t = 2.0 * T * i / (steps - 1);
        // Mirror of the forward history: the reversed state at t carries the
        // entanglement the forward state had at T - t (even in its argument).
        row.delta_analytic = linear_entropy(T - row.t, p);
        const double u = (T - row.t) / s.tau_b;
        row.cm_width_ratio = std::sqrt(1.0 + u * u);
    }
    parallel_for_indexed(steps, jobs, [&](int i) {
        TimeRow& row = series.rows[static_cast<size_t>(i)];
        try {
            row.delta_oracle = oracle_reversed_delta(p, T, row.t, oracle_n);
        } catch (...) {
            rethrow_with_time(row.t);
        }
    });
    return series;
}

std::vector<BetaCutFinding> analyze_valleys(const LandscapeTable& t) {
    std::vector<BetaCutFinding> findings;
    if (t.rows.empty()) return findings;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double log_step = t.n_alpha > 1
        ? std::abs(std::log10(t.alpha_max / t.alpha_min)) / (t.n_alpha - 1)
        : 0.0;
    // Grid minima track the continuum ones to a node, so locations are
    // compared with one full log step of slack.
    const double loc_tol = log_step + 1e-12;

    findings.reserve(static_cast<size_t>(t.n_beta));
    for (int ib = 0; ib < t.n_beta; ++ib) {
        BetaCutFinding f;
        f.beta = t.rows[static_cast<size_t>(ib)].beta;
        f.argmin_low = f.argmin_high = f.argmax_mid = nan;
        f.root_low = f.root_high = nan;
        f.root_delta0_max = 0.0;

        auto row = [&](int ia) -> const LandscapeRow& {
            return t.rows[static_cast<size_t>(ia) * static_cast<size_t>(t.n_beta)
                          + static_cast<size_t>(ib)];
        };

        const auto roots = zero_entropy_mass_ratios(f.beta);
        if (roots) {
            f.root_low = roots->first;
            f.root_high = roots->second;
            f.root_delta0_max = std::max(initial_linear_entropy(f.root_low, f.beta),
                                         initial_linear_entropy(f.root_high, f.beta));
        }
        // Roots closer together than the grid can resolve collapse into the
        // single-valley pattern (beta at or just below 1/2).
        f.bifurcated = roots && std::log10(f.root_high) > 0.75 * log_step;

        if (t.n_alpha < 3) {
            f.structure_ok = true;
            findings.push_back(f);
            continue;
        }

        if (!f.bifurcated) {
            int best = 0;
            for (int ia = 1; ia < t.n_alpha; ++ia)
                if (row(ia).delta0 < row(best).delta0) best = ia;
            f.argmin_low = f.argmin_high = row(best).alpha;
            f.structure_ok = std::abs(row(best).log10_alpha) <= loc_tol
                && f.root_delta0_max < 1e-12;
        } else {
            int best_low = 0, best_high = t.n_alpha - 1;
            for (int ia = 0; ia < t.n_alpha; ++ia) {
                if (row(ia).alpha <= 1.0 + 1e-15 && row(ia).delta0 < row(best_low).delta0)
                    best_low = ia;
                if (row(ia).alpha >= 1.0 - 1e-15 && row(ia).delta0 < row(best_high).delta0)
                    best_high = ia;
            }
            f.argmin_low = row(best_low).alpha;
            f.argmin_high = row(best_high).alpha;
            bool ok = std::abs(row(best_low).log10_alpha - std::log10(f.root_low)) <= loc_tol
                   && std::abs(row(best_high).log10_alpha - std::log10(f.root_high)) <= loc_tol
                   && f.root_delta0_max < 1e-12;
            if (best_high - best_low >= 2) {
                int ridge = best_low + 1;
                for (int ia = best_low + 1; ia < best_high; ++ia)
                    if (row(ia).delta0 > row(ridge).delta0) ridge = ia;
                f.argmax_mid = row(ridge).alpha;
                ok = ok && std::abs(row(ridge).log10_alpha) <= loc_tol;
            } else {
                ok = false;   // valleys resolvable but no interior ridge node
            }
            f.structure_ok = ok;
        }
        findings.push_back(f);
    }
    return findings;
}

} // namespace entanglekit
