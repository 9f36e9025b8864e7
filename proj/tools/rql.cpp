// Command-line front end: simulate the queue, evaluate the closed-form law,
// estimate the mean regeneration index, draw busy periods, and compare the
// empirical wait distribution against the analytic one.
//
// Exit codes: 0 success, 1 bad input, 2 runtime/resource failure,
// 3 comparison failed (compare only).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rql/analytics.hpp"
#include "rql/errors.hpp"
#include "rql/regeneration.hpp"
#include "rql/rng.hpp"
#include "rql/sample_path.hpp"
#include "rql/simulator.hpp"
#include "rql/stats.hpp"
#include "rql/streams.hpp"

namespace {

using nlohmann::json;

constexpr std::uint64_t kEstimateSeedTag = 0xE57;

struct CommonOpts {
    rql::Parameters params;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    std::string config;
};

void add_common(CLI::App* cmd, CommonOpts& c, const char* default_format = "csv") {
    c.format = default_format;
    cmd->add_option("--lambda", c.params.lambda, "arrival rate")->capture_default_str();
    cmd->add_option("--mu", c.params.mu, "service rate")->capture_default_str();
    cmd->add_option("--deadline", c.params.deadline,
                    "patience deadline (accepts inf)")
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
    cmd->add_option("--out", c.out, "output file (default: stdout)");
    cmd->add_option("--format", c.format, "output format: csv or json")
        ->capture_default_str();
    cmd->add_option("--config", c.config, "key=value config file; flags override it");
}

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Applies `key=value` lines from `path` to cmd's options. Options already
// given on the command line keep their values; unknown keys and unreadable
// files are refused. Blank lines and lines starting with '#' are ignored.
void apply_config(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream f(path);
    if (!f) throw rql::validation_error("cannot read config file: " + path);
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string entry = trimmed(line);
        if (entry.empty() || entry[0] == '#') continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw rql::validation_error("config line " + std::to_string(lineno) +
                                        " is not key=value: " + entry);
        const std::string key = trimmed(entry.substr(0, eq));
        const std::string value = trimmed(entry.substr(eq + 1));
        CLI::Option* op = cmd->get_option_no_throw("--" + key);
        if (op == nullptr)
            throw rql::validation_error("unknown config key: " + key);
        if (op->count() > 0) continue;  // the command line outranks the file
        try {
            op->add_result(value);
            op->run_callback();
        } catch (const std::exception&) {
            throw rql::validation_error("config value for '" + key +
                                        "' is invalid: " + value);
        }
    }
}

void check_format(const CommonOpts& c) {
    if (c.format != "csv" && c.format != "json")
        throw rql::validation_error("format must be csv or json");
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json json_number_or_inf(double v) {
    if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
    return json(v);
}

void write_text(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw rql::resource_error("cannot open output file: " + path);
    f << body;
    if (!f) throw rql::resource_error("failed writing output file: " + path);
}

unsigned resolve_threads(unsigned requested) {
    unsigned t = requested;
    if (t == 0) {
        t = std::thread::hardware_concurrency();
        if (t == 0) t = 1;
    }
    if (const char* env = std::getenv("RQL_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0' || cap == 0)
            throw rql::validation_error("RQL_THREADS must be a positive integer");
        t = std::min<unsigned long>(t, cap);
    }
    return std::max(1u, t);
}

double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw rql::validation_error(std::string("cannot parse ") + what + ": " + s);
    }
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> xs;
    if (spec.find(':') != std::string::npos) {
        // lo:hi:count
        std::stringstream ss(spec);
        std::string lo_s, hi_s, n_s;
        if (!std::getline(ss, lo_s, ':') || !std::getline(ss, hi_s, ':') ||
            !std::getline(ss, n_s))
            throw rql::validation_error("grid must be lo:hi:count or x1,x2,...");
        const double lo = parse_double(lo_s, "grid lo");
        const double hi = parse_double(hi_s, "grid hi");
        const long count = std::strtol(n_s.c_str(), nullptr, 10);
        if (count < 1) throw rql::validation_error("grid count must be at least 1");
        if (hi < lo) throw rql::validation_error("grid hi must be >= lo");
        for (long i = 0; i < count; ++i) {
            xs.push_back(count == 1
                             ? lo
                             : lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(count - 1));
        }
        return xs;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) xs.push_back(parse_double(item, "grid point"));
    if (xs.empty()) throw rql::validation_error("grid is empty");
    return xs;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    CommonOpts common;
    std::uint64_t n = 10000;
    std::uint64_t burn_in = 0;
    std::uint64_t max_events = 0;
    bool trace = false;
    bool eager = false;
};

int run_simulate(const SimulateArgs& a) {
    check_format(a.common);
    if (a.trace && a.common.format != "json")
        throw rql::validation_error("trace output needs --format json");

    rql::SimulateOptions opts;
    opts.record_trace = a.trace;
    opts.eager_abandonment = a.eager;
    opts.max_events = a.max_events;
    const rql::SamplePath path =
        rql::simulate(rql::validate(a.common.params), a.n, a.common.seed, opts);

    if (!path.warning.empty()) std::cerr << "warning: " << path.warning << "\n";

    if (a.common.format == "csv") {
        std::string body = "index,arrival_time,wait,service_start,served_rank\n";
        for (const auto& o : path.outcomes) {
            body += std::to_string(o.index);
            body += ',';
            body += fmt17(o.arrival_time);
            body += ',';
            body += fmt17(o.wait);
            body += ',';
            if (o.service_start) body += fmt17(*o.service_start);
            body += ',';
            if (o.served_rank) body += std::to_string(*o.served_rank);
            body += '\n';
        }
        write_text(a.common.out, body);
    } else {
        json j;
        j["lambda"] = a.common.params.lambda;
        j["mu"] = a.common.params.mu;
        j["deadline"] = json_number_or_inf(a.common.params.deadline);
        j["seed"] = a.common.seed;
        j["n"] = a.n;
        j["burn_in"] = a.burn_in;
        json rows = json::array();
        for (const auto& o : path.outcomes) {
            json r;
            r["index"] = o.index;
            r["arrival_time"] = o.arrival_time;
            r["wait"] = json_number_or_inf(o.wait);
            r["service_start"] = o.service_start ? json(*o.service_start) : json(nullptr);
            r["served_rank"] = o.served_rank ? json(*o.served_rank) : json(nullptr);
            rows.push_back(std::move(r));
        }
        j["outcomes"] = std::move(rows);
        j["served_waits"] = rql::served_waits(path, a.burn_in);
        if (a.trace) {
            json tr = json::array();
            for (const auto& [t, len] : path.queue_length_trace)
                tr.push_back(json::array({t, len}));
            j["queue_length_trace"] = std::move(tr);
        }
        if (!path.warning.empty()) j["warning"] = path.warning;
        write_text(a.common.out, j.dump(2) + "\n");
    }
    return path.hit_event_ceiling ? 2 : 0;
}

// ---------------------------------------------------------------- analytic

struct AnalyticArgs {
    CommonOpts common;
    double m = 0.0;  // 0 = estimate it
    std::uint64_t reps = 10000;
    std::string grid;
    double series_tol = 1e-10;
    double quad_tol = 1e-9;
    unsigned threads = 0;
};

int run_analytic(const AnalyticArgs& a) {
    check_format(a.common);
    const rql::Parameters& params = rql::validate(a.common.params);
    if (!params.finite_deadline())
        throw rql::validation_error("analytic needs a finite deadline");

    double m = a.m;
    if (m == 0.0) {
        rql::EstimateOptions eo;
        eo.threads = resolve_threads(a.threads);
        const auto est = rql::estimate_return_law(
            params, a.reps, rql::derive_stream(a.common.seed, kEstimateSeedTag), 0.99, eo);
        m = est.mean;
        std::cerr << "note: using estimated mean return index m = " << fmt17(m) << " ("
                  << a.reps << " replications)\n";
    } else if (!(m >= 1.0)) {
        throw rql::validation_error("m must be at least 1");
    }

    std::vector<double> xs =
        a.grid.empty() ? parse_grid("0:" + fmt17(params.deadline) + ":101")
                       : parse_grid(a.grid);
    std::vector<double> kept;
    for (const double x : xs) {
        if (x < 0.0 || x > params.deadline) {
            std::cerr << "warning: grid point " << fmt17(x)
                      << " outside [0, deadline]; dropped\n";
            continue;
        }
        kept.push_back(x);
    }
    if (kept.empty()) throw rql::validation_error("no grid points inside [0, deadline]");

    const rql::AnalyticLaw law(params, a.series_tol, a.quad_tol);
    if (a.common.format == "csv") {
        std::string body = "x,F_T,f_rho\n";
        for (const double x : kept) {
            body += fmt17(x);
            body += ',';
            body += fmt17(law.limiting_cdf(m, x));
            body += ',';
            body += fmt17(law.busy_density(x));
            body += '\n';
        }
        write_text(a.common.out, body);
    } else {
        json j;
        j["lambda"] = params.lambda;
        j["mu"] = params.mu;
        j["deadline"] = params.deadline;
        j["m"] = m;
        json rows = json::array();
        for (const double x : kept) {
            rows.push_back(json{{"x", x},
                                {"F_T", law.limiting_cdf(m, x)},
                                {"f_rho", law.busy_density(x)}});
        }
        j["rows"] = std::move(rows);
        write_text(a.common.out, j.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------- estimate-m

struct EstimateArgs {
    CommonOpts common;
    std::uint64_t reps = 10000;
    double confidence = 0.99;
    unsigned threads = 0;
    unsigned mom_blocks = 0;
    std::uint64_t max_services = 50'000'000;
};

int run_estimate(const EstimateArgs& a) {
    check_format(a.common);
    rql::EstimateOptions eo;
    eo.threads = resolve_threads(a.threads);
    eo.median_of_means_blocks = a.mom_blocks;
    eo.max_services_per_replication = a.max_services;
    const auto est = rql::estimate_return_law(rql::validate(a.common.params), a.reps,
                                              a.common.seed, a.confidence, eo);

    std::cerr << "m_hat = " << fmt17(est.mean) << " +- " << fmt17(est.ci_half_width)
              << " (confidence " << a.confidence << ", " << a.reps << " replications)\n";

    if (a.common.format == "csv") {
        std::string body = "k,q_hat\n";
        for (const auto& [k, mass] : est.pmf) {
            body += std::to_string(k);
            body += ',';
            body += fmt17(mass);
            body += '\n';
        }
        write_text(a.common.out, body);
    } else {
        json j;
        j["lambda"] = a.common.params.lambda;
        j["mu"] = a.common.params.mu;
        j["deadline"] = json_number_or_inf(a.common.params.deadline);
        j["seed"] = a.common.seed;
        j["replications"] = est.replications;
        j["confidence"] = est.confidence;
        j["m_hat"] = est.mean;
        j["ci_half_width"] = est.ci_half_width;
        json q = json::object();
        for (const auto& [k, mass] : est.pmf) q[std::to_string(k)] = mass;
        j["q_hat"] = std::move(q);
        write_text(a.common.out, j.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------- busy-sample

struct BusyArgs {
    CommonOpts common;
    std::uint64_t n = 1000;
    std::uint64_t ceiling = 1'000'000;
};

int run_busy_sample(const BusyArgs& a) {
    check_format(a.common);
    const rql::Parameters& params = rql::validate(a.common.params);

    std::vector<rql::BusyPeriodSample> samples;
    samples.reserve(a.n);
    for (std::uint64_t i = 0; i < a.n; ++i)
        samples.push_back(rql::sample_busy_period(
            params, rql::derive_stream(a.common.seed, i), a.ceiling));

    if (a.common.format == "csv") {
        std::string body = "duration,services,truncated\n";
        for (const auto& s : samples) {
            body += fmt17(s.duration);
            body += ',';
            body += std::to_string(s.services);
            body += ',';
            body += s.truncated ? '1' : '0';
            body += '\n';
        }
        write_text(a.common.out, body);
    } else {
        json rows = json::array();
        for (const auto& s : samples)
            rows.push_back(json{{"duration", json_number_or_inf(s.duration)},
                                {"services", s.services},
                                {"truncated", s.truncated}});
        json j;
        j["lambda"] = params.lambda;
        j["mu"] = params.mu;
        j["seed"] = a.common.seed;
        j["samples"] = std::move(rows);
        write_text(a.common.out, j.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    CommonOpts common;
    std::uint64_t n = 100000;
    std::uint64_t burn_in = 10000;
    std::uint64_t reps = 10000;
    double confidence = 0.99;
    unsigned threads = 0;
    double series_tol = 1e-10;
    double quad_tol = 1e-9;
};

int run_compare(const CompareArgs& a) {
    if (a.common.format != "json")
        throw rql::validation_error("compare writes a JSON summary; use --format json");
    const rql::Parameters& params = rql::validate(a.common.params);
    if (!params.finite_deadline()) {
        if (params.lambda > params.mu)
            throw rql::validation_error(
                "transient regime: deadline = inf with lambda > mu never settles, so "
                "there is no limiting wait distribution to compare against");
        throw rql::validation_error("compare needs a finite deadline");
    }

    const rql::SamplePath path = rql::simulate(params, a.n, a.common.seed);
    const std::vector<double> waits = rql::served_waits(path, a.burn_in);
    if (waits.empty())
        throw rql::validation_error("no served waits after burn-in; lower --burn-in");

    rql::EstimateOptions eo;
    eo.threads = resolve_threads(a.threads);
    const auto est = rql::estimate_return_law(
        params, a.reps, rql::derive_stream(a.common.seed, kEstimateSeedTag),
        a.confidence, eo);

    const rql::AnalyticLaw law(params, a.series_tol, a.quad_tol);
    const double ks = rql::ks_distance(
        waits, [&](double x) { return law.limiting_cdf(est.mean, x); });

    const bool enough = waits.size() >= 10000;
    const bool pass = enough && ks < 0.02;

    json j;
    j["lambda"] = params.lambda;
    j["mu"] = params.mu;
    j["deadline"] = params.deadline;
    j["seed"] = a.common.seed;
    j["n"] = a.n;
    j["burn_in"] = a.burn_in;
    j["replications"] = a.reps;
    j["m_hat"] = est.mean;
    j["ci_half_width"] = est.ci_half_width;
    j["confidence"] = est.confidence;
    j["served_waits_used"] = waits.size();
    j["ks"] = ks;
    j["pass"] = pass;
    if (!enough)
        j["advisory"] = "fewer than 10000 served waits after burn-in; the KS threshold "
                        "is not meaningful at this sample size, increase --n";
    write_text(a.common.out, j.dump(2) + "\n");
    return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"queue with deadline reneging: simulation and analytics"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "run the queue and dump outcomes");
    add_common(c_sim, sim.common);
    c_sim->add_option("--n", sim.n, "customers tracked")->capture_default_str();
    c_sim->add_option("--burn-in", sim.burn_in, "served ranks skipped in served_waits")
        ->capture_default_str();
    c_sim->add_option("--max-events", sim.max_events, "event ceiling (0 = automatic)")
        ->capture_default_str();
    c_sim->add_flag("--trace", sim.trace, "record the queue-length trace (json only)");
    c_sim->add_flag("--eager", sim.eager, "schedule abandonments as events");

    AnalyticArgs ana;
    CLI::App* c_ana = app.add_subcommand("analytic", "tabulate the limiting wait law");
    add_common(c_ana, ana.common);
    c_ana->add_option("--m", ana.m, "mean return index (0 = estimate it)")
        ->capture_default_str();
    c_ana->add_option("--reps", ana.reps, "replications when estimating m")
        ->capture_default_str();
    c_ana->add_option("--grid", ana.grid, "evaluation grid: lo:hi:count or x1,x2,...");
    c_ana->add_option("--series-tol", ana.series_tol, "CDF series tolerance")
        ->capture_default_str();
    c_ana->add_option("--quad-tol", ana.quad_tol, "quadrature tolerance")
        ->capture_default_str();
    c_ana->add_option("--threads", ana.threads, "worker threads (0 = auto)")
        ->capture_default_str();

    EstimateArgs est;
    CLI::App* c_est = app.add_subcommand("estimate-m", "estimate the mean return index");
    add_common(c_est, est.common);
    c_est->add_option("--reps", est.reps, "replications")->capture_default_str();
    c_est->add_option("--confidence", est.confidence, "CI confidence level")
        ->capture_default_str();
    c_est->add_option("--threads", est.threads, "worker threads (0 = auto)")
        ->capture_default_str();
    c_est->add_option("--mom-blocks", est.mom_blocks,
                      "median-of-means blocks (0 = plain mean)")
        ->capture_default_str();
    c_est->add_option("--max-services", est.max_services,
                      "per-replication service ceiling")
        ->capture_default_str();

    BusyArgs busy;
    CLI::App* c_busy = app.add_subcommand("busy-sample", "draw initial busy periods");
    add_common(c_busy, busy.common);
    c_busy->add_option("--n", busy.n, "number of samples")->capture_default_str();
    c_busy->add_option("--ceiling", busy.ceiling, "per-sample service ceiling")
        ->capture_default_str();

    CompareArgs cmp;
    CLI::App* c_cmp = app.add_subcommand(
        "compare", "simulated waits vs the analytic limiting law (KS)");
    add_common(c_cmp, cmp.common, "json");
    c_cmp->add_option("--n", cmp.n, "customers simulated")->capture_default_str();
    c_cmp->add_option("--burn-in", cmp.burn_in, "served ranks skipped")
        ->capture_default_str();
    c_cmp->add_option("--reps", cmp.reps, "replications for m_hat")->capture_default_str();
    c_cmp->add_option("--confidence", cmp.confidence, "CI confidence for m_hat")
        ->capture_default_str();
    c_cmp->add_option("--threads", cmp.threads, "worker threads (0 = auto)")
        ->capture_default_str();
    c_cmp->add_option("--series-tol", cmp.series_tol, "CDF series tolerance")
        ->capture_default_str();
    c_cmp->add_option("--quad-tol", cmp.quad_tol, "quadrature tolerance")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // --help exits 0; every parse problem is bad input
    }

    try {
        apply_config(c_sim, sim.common.config);
        apply_config(c_ana, ana.common.config);
        apply_config(c_est, est.common.config);
        apply_config(c_busy, busy.common.config);
        apply_config(c_cmp, cmp.common.config);
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_ana->parsed()) return run_analytic(ana);
        if (c_est->parsed()) return run_estimate(est);
        if (c_busy->parsed()) return run_busy_sample(busy);
        if (c_cmp->parsed()) return run_compare(cmp);
        return 1;
    } catch (const rql::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const rql::resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
