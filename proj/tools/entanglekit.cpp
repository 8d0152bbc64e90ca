#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "entanglekit/analytic.hpp"
#include "entanglekit/io.hpp"
#include "entanglekit/landscape.hpp"
#include "entanglekit/model.hpp"
#include "entanglekit/oracle.hpp"
#include "entanglekit/verify.hpp"

namespace ek = entanglekit;
using ojson = nlohmann::ordered_json;

namespace {

enum ExitCode {
    exit_ok = 0,
    exit_verification = 1,
    exit_params = 2,
    exit_numerical = 3,
    exit_io = 4,
};

// One flat bag of settings; each subcommand binds the flags it needs, so
// only the parsed subcommand's values are live.
struct RunConfig {
    double m1 = 1.0, m2 = 1.0, omega = 1.0, B = 1.0, K = 0.0, hbar = 1.0;
    double alpha = 1.0, beta = 1.0, b_over_b = 1.0;
    double t = 0.0;
    double t_max = 0.0;          // 0 means "pick from the derived scales"
    double T = 0.0;
    int steps = 0;
    int n = 256;
    int top = 10;
    double rank_epsilon = 1e-12;
    double alpha_min = 1e-3, alpha_max = 1e3;
    double beta_min = 0.05, beta_max = 2.0;
    int n_alpha = 121, n_beta = 40;
    std::string output;
    std::string format;
    std::string config_path;
    std::uint64_t seed = 12345;
    int jobs = 1;
    std::string inject_fault;
    bool with_oracle = false;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// Applies key=value pairs from a flat config file as defaults: only options
/// the command line did not set are filled in, so precedence is
/// CLI flags > config file > built-in defaults.
void apply_config_file(CLI::App* sub, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        const size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno)
                                        + ": expected key=value");
        const std::string key = trim(text.substr(0, eq));
        const std::string val = trim(text.substr(eq + 1));
        CLI::Option* op = sub->get_option_no_throw("--" + key);
        if (op == nullptr)
            throw std::invalid_argument(path + ":" + std::to_string(lineno)
                                        + ": unknown key '" + key + "'");
        if (op->count() == 0) {
            op->add_result(val);
            op->run_callback();
        }
    }
}

struct ParamFlagSet {
    CLI::Option* m1 = nullptr;
    CLI::Option* m2 = nullptr;
    CLI::Option* B = nullptr;
    CLI::Option* alpha = nullptr;
    CLI::Option* beta = nullptr;
    CLI::Option* b_over_b = nullptr;
};

ParamFlagSet add_param_flags(CLI::App* sub, RunConfig& c) {
    ParamFlagSet f;
    f.m1 = sub->add_option("--m1", c.m1, "mass of particle 1")->check(CLI::PositiveNumber);
    f.m2 = sub->add_option("--m2", c.m2, "mass of particle 2")->check(CLI::PositiveNumber);
    sub->add_option("--omega", c.omega, "internal oscillator frequency")->check(CLI::PositiveNumber);
    f.B = sub->add_option("--B", c.B, "center-of-mass packet width parameter")->check(CLI::PositiveNumber);
    sub->add_option("--K", c.K, "mean total wavenumber");
    sub->add_option("--hbar", c.hbar, "action scale")->check(CLI::PositiveNumber);
    f.alpha = sub->add_option("--alpha", c.alpha,
        "mass ratio m1/m2; dimensionless mode with M=1, hbar=1, omega=1")
        ->check(CLI::PositiveNumber);
    f.beta = sub->add_option("--beta", c.beta, "width ratio B/b (dimensionless mode)")
        ->check(CLI::PositiveNumber);
    f.b_over_b = sub->add_option("--B-over-b", c.b_over_b,
        "set B as this multiple of the internal width b")->check(CLI::PositiveNumber);
    // The dimensionless ratios define masses and widths themselves.
    f.alpha->excludes(f.m1);
    f.alpha->excludes(f.m2);
    f.alpha->excludes(f.B);
    f.beta->excludes(f.B);
    f.b_over_b->excludes(f.B);
    f.b_over_b->excludes(f.beta);
    return f;
}

void add_common_flags(CLI::App* sub, RunConfig& c) {
    sub->add_option("--config", c.config_path,
        "flat key=value file mirroring the flag names; CLI flags win");
    sub->add_option("--output", c.output, "output path ('-' or empty for stdout)");
    sub->add_option("--seed", c.seed, "seed for randomized checks");
    sub->add_option("--jobs", c.jobs,
        "worker threads for independent rows (ENTANGLEKIT_JOBS as fallback)")
        ->check(CLI::PositiveNumber);
}

// The format field is shared across subcommands, so the per-command default
// is applied at dispatch, not at registration.
void add_format_flag(CLI::App* sub, RunConfig& c, const char* def) {
    sub->add_option("--format", c.format, std::string("output format (default ") + def + ")")
        ->check(CLI::IsMember({"csv", "json"}));
}

std::string effective_format(CLI::App* sub, const RunConfig& c, const char* def) {
    return sub->count("--format") ? c.format : std::string(def);
}

ek::SystemParams resolve_params(CLI::App* sub, const RunConfig& c) {
    const bool dimensionless = sub->count("--alpha") || sub->count("--beta");
    ek::SystemParams p;
    if (dimensionless) {
        double beta = 1.0;
        if (sub->count("--beta")) beta = c.beta;
        else if (sub->count("--B-over-b")) beta = c.b_over_b;
        p = ek::params_from_ratios(sub->count("--alpha") ? c.alpha : 1.0, beta, c.K);
    } else {
        p.m1 = c.m1;
        p.m2 = c.m2;
        p.omega = c.omega;
        p.K = c.K;
        p.hbar = c.hbar;
        p.B = c.B;
        ek::validate(p);
        if (sub->count("--B-over-b")) p.B = c.b_over_b * ek::derive_scales(p).b;
    }
    ek::validate(p);
    return p;
}

int resolve_jobs(CLI::App* sub, const RunConfig& c) {
    if (sub->count("--jobs")) return c.jobs;
    if (const char* env = std::getenv("ENTANGLEKIT_JOBS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw std::invalid_argument("ENTANGLEKIT_JOBS must be a positive integer");
        return static_cast<int>(v);
    }
    return 1;
}

int with_output_stream(const std::string& path,
                       const std::function<void(std::ostream&)>& writer) {
    if (path.empty() || path == "-") {
        writer(std::cout);
        std::cout.flush();
        return std::cout.good() ? exit_ok : exit_io;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file: " << path << "\n";
        return exit_io;
    }
    writer(f);
    f.flush();
    if (!f.good()) {
        std::cerr << "error: write failed: " << path << "\n";
        return exit_io;
    }
    return exit_ok;
}

void dump_json(std::ostream& out, const ojson& j) {
    out << j.dump(2) << "\n";
}

int cmd_entropy(CLI::App* sub, const RunConfig& c) {
    const ek::SystemParams p = resolve_params(sub, c);
    const ek::DerivedScales s = ek::derive_scales(p);
    const double delta = ek::linear_entropy(c.t, p);
    const double delta0 = ek::linear_entropy(0.0, p);
    const std::string fmt = effective_format(sub, c, "json");
    return with_output_stream(c.output, [&](std::ostream& out) {
        if (fmt == "csv") {
            out << "t,delta,delta0,tau,tau_b,tau_ratio,b0,alpha,beta\n"
                << ek::fmt17(c.t) << ',' << ek::fmt17(delta) << ',' << ek::fmt17(delta0) << ','
                << ek::fmt17(s.tau) << ',' << ek::fmt17(s.tau_b) << ','
                << ek::fmt17(s.tau / s.tau_b) << ',' << ek::fmt17(s.B0) << ','
                << ek::fmt17(s.alpha) << ',' << ek::fmt17(s.beta) << '\n';
            return;
        }
        ojson j;
        j["t"] = c.t;
        j["delta"] = delta;
        j["delta0"] = delta0;
        j["tau"] = s.tau;
        j["tau_b"] = s.tau_b;
        j["tau_ratio"] = s.tau / s.tau_b;
        j["b0"] = s.B0;
        j["b"] = s.b;
        j["B"] = p.B;
        j["alpha"] = s.alpha;
        j["beta"] = s.beta;
        dump_json(out, j);
    });
}

int cmd_schmidt(CLI::App* sub, const RunConfig& c) {
    const ek::SystemParams p = resolve_params(sub, c);
    const ek::WaveMatrix w = ek::sample_wave(p, c.t, ek::build_grid(p, c.t, c.n));
    const ek::SchmidtResult sr = ek::schmidt_decompose(w, c.rank_epsilon);
    double lambda_sum = 0.0;
    for (double l : sr.lambdas) lambda_sum += l;
    const int retained = static_cast<int>(sr.modes1.cols());
    const std::string fmt = effective_format(sub, c, "json");
    return with_output_stream(c.output, [&](std::ostream& out) {
        if (fmt == "csv") {
            out << "index,lambda\n";
            for (int i = 0; i < retained; ++i)
                out << i << ',' << ek::fmt17(sr.lambdas[static_cast<size_t>(i)]) << '\n';
            return;
        }
        ojson j;
        j["n"] = c.n;
        j["t"] = c.t;
        j["norm_deficit"] = w.norm_deficit;
        j["lambda_sum"] = lambda_sum;
        j["retained"] = retained;
        j["delta"] = sr.linear_delta;
        j["von_neumann"] = sr.von_neumann;
        j["renyi2"] = sr.renyi2;
        j["recon_residual"] = sr.recon_residual;
        ojson top = ojson::array();
        for (int i = 0; i < std::min(c.top, retained); ++i)
            top.push_back(sr.lambdas[static_cast<size_t>(i)]);
        j["top_lambdas"] = top;
        dump_json(out, j);
    });
}

int cmd_landscape(CLI::App* sub, const RunConfig& c) {
    const ek::LandscapeTable t = ek::sweep(c.alpha_min, c.alpha_max,
                                           c.beta_min, c.beta_max,
                                           c.n_alpha, c.n_beta);
    const std::string fmt = effective_format(sub, c, "csv");
    return with_output_stream(c.output, [&](std::ostream& out) {
        if (fmt == "json") {
            ojson j;
            j["alpha_min"] = t.alpha_min;
            j["alpha_max"] = t.alpha_max;
            j["beta_min"] = t.beta_min;
            j["beta_max"] = t.beta_max;
            j["n_alpha"] = t.n_alpha;
            j["n_beta"] = t.n_beta;
            ojson rows = ojson::array();
            for (const ek::LandscapeRow& r : t.rows)
                rows.push_back({r.alpha, r.log10_alpha, r.beta, r.delta0, r.tau_ratio});
            j["columns"] = {"alpha", "log10_alpha", "beta", "delta0", "tau_ratio"};
            j["rows"] = rows;
            dump_json(out, j);
            return;
        }
        ek::write_landscape_csv(out, t);
    });
}

int cmd_evolve(CLI::App* sub, const RunConfig& c) {
    const ek::SystemParams p = resolve_params(sub, c);
    const double t_max = sub->count("--t-max") ? c.t_max : 3.0 * ek::derive_scales(p).tau_b;
    const int steps = sub->count("--steps") ? c.steps : 101;
    const ek::TimeSeries s = ek::time_series(p, t_max, steps, c.with_oracle, c.n,
                                             resolve_jobs(sub, c));
    return with_output_stream(c.output, [&](std::ostream& out) {
        ek::write_series_csv(out, s);
    });
}

int cmd_reverse(CLI::App* sub, const RunConfig& c) {
    const ek::SystemParams p = resolve_params(sub, c);
    const double T = sub->count("--T") ? c.T : 2.0 * ek::derive_scales(p).tau;
    const int steps = sub->count("--steps") ? c.steps : 23;
    const ek::TimeSeries s = ek::time_reversal_series(p, T, steps, c.n,
                                                      resolve_jobs(sub, c));
    return with_output_stream(c.output, [&](std::ostream& out) {
        ek::write_series_csv(out, s);
    });
}

int cmd_verify(CLI::App* /*sub*/, const RunConfig& c) {
    ek::VerifyOptions opt;
    opt.seed = c.seed;
    opt.fault_scale_lambdas = c.inject_fault == "lambda-scale";
    const ek::VerifyReport rep = ek::run_verification(opt);
    const int rc = with_output_stream(c.output, [&](std::ostream& out) {
        ojson j;
        j["all_passed"] = rep.all_passed();
        ojson checks = ojson::array();
        for (const ek::VerifyCheck& ch : rep.checks) {
            ojson e;
            e["name"] = ch.name;
            e["informational"] = ch.informational;
            e["passed"] = ch.passed;
            e["measured"] = ch.measured;
            e["tolerance"] = ch.tolerance;
            e["details"] = ch.details;
            checks.push_back(e);
        }
        j["checks"] = checks;
        dump_json(out, j);
    });
    if (rc != exit_ok) return rc;
    return rep.all_passed() ? exit_ok : exit_verification;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig c;
    CLI::App app{"entanglekit: entanglement dynamics of two harmonically bound "
                 "particles in a dispersing center-of-mass wavepacket"};
    app.require_subcommand(1);

    CLI::App* entropy = app.add_subcommand("entropy",
        "closed-form entanglement measures and timescales");
    add_param_flags(entropy, c);
    add_common_flags(entropy, c);
    add_format_flag(entropy, c, "json");
    entropy->add_option("--t", c.t, "evaluation time");

    CLI::App* schmidt = app.add_subcommand("schmidt",
        "grid Schmidt spectrum and entropies at one time");
    add_param_flags(schmidt, c);
    add_common_flags(schmidt, c);
    add_format_flag(schmidt, c, "json");
    schmidt->add_option("--t", c.t, "evaluation time");
    schmidt->add_option("--n", c.n, "grid points per axis")->check(CLI::Range(8, 512));
    schmidt->add_option("--rank-epsilon", c.rank_epsilon, "retention threshold for modes")
        ->check(CLI::PositiveNumber);
    schmidt->add_option("--top", c.top, "eigenvalues listed in the JSON report")
        ->check(CLI::PositiveNumber);

    CLI::App* landscape = app.add_subcommand("landscape",
        "initial-entropy and timescale sweep over (alpha, beta)");
    add_common_flags(landscape, c);
    add_format_flag(landscape, c, "csv");
    landscape->add_option("--alpha-min", c.alpha_min)->check(CLI::PositiveNumber);
    landscape->add_option("--alpha-max", c.alpha_max)->check(CLI::PositiveNumber);
    landscape->add_option("--beta-min", c.beta_min)->check(CLI::PositiveNumber);
    landscape->add_option("--beta-max", c.beta_max)->check(CLI::PositiveNumber);
    landscape->add_option("--n-alpha", c.n_alpha)->check(CLI::Range(1, 100000));
    landscape->add_option("--n-beta", c.n_beta)->check(CLI::Range(1, 100000));

    CLI::App* evolve = app.add_subcommand("evolve",
        "entanglement growth time series, optional grid-oracle column");
    add_param_flags(evolve, c);
    add_common_flags(evolve, c);
    evolve->add_option("--t-max", c.t_max, "series end time (default 3*tau_b)")
        ->check(CLI::PositiveNumber);
    evolve->add_option("--steps", c.steps, "series points (default 101)")->check(CLI::Range(2, 1000000));
    evolve->add_flag("--with-oracle", c.with_oracle, "add the grid-oracle column");
    evolve->add_option("--n", c.n, "oracle grid points per axis")->check(CLI::Range(8, 512));

    CLI::App* reverse = app.add_subcommand("reverse",
        "time-reversed scenario: disentangling then rebound on [0, 2T]");
    add_param_flags(reverse, c);
    add_common_flags(reverse, c);
    reverse->add_option("--T", c.T, "forward duration to reverse (default 2*tau)")
        ->check(CLI::PositiveNumber);
    reverse->add_option("--steps", c.steps, "series points (default 23)")->check(CLI::Range(2, 1000000));
    reverse->add_option("--n", c.n, "oracle grid points per axis")->check(CLI::Range(8, 512));

    CLI::App* verify = app.add_subcommand("verify",
        "run the cross-validation suite and report pass/fail per check");
    add_common_flags(verify, c);
    verify->add_option("--inject-fault", c.inject_fault,
        "test hook: 'lambda-scale' scales Schmidt eigenvalues by 0.99")
        ->check(CLI::IsMember({"lambda-scale"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_params;
    }

    try {
        CLI::App* subs[] = {entropy, schmidt, landscape, evolve, reverse, verify};
        CLI::App* parsed = nullptr;
        for (CLI::App* s : subs)
            if (s->parsed()) parsed = s;
        if (parsed == nullptr) return exit_params;
        if (parsed->count("--config")) apply_config_file(parsed, c.config_path);
        if (parsed == entropy) return cmd_entropy(entropy, c);
        if (parsed == schmidt) return cmd_schmidt(schmidt, c);
        if (parsed == landscape) return cmd_landscape(landscape, c);
        if (parsed == evolve) return cmd_evolve(evolve, c);
        if (parsed == reverse) return cmd_reverse(reverse, c);
        return cmd_verify(verify, c);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_params;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_params;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_params;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}
