// Command-line front end: spectrum reports, moment computation by any of the
// four routes, identity verification suites, and simulator runs with CSV/JSON
// output.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "logid/binomsum.hpp"
#include "logid/closedform.hpp"
#include "logid/errors.hpp"
#include "logid/json_io.hpp"
#include "logid/levy.hpp"
#include "logid/quadrature.hpp"
#include "logid/simulator.hpp"
#include "logid/verify.hpp"

namespace {

using logid::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitNumerical = 4;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct RunConfig {
    std::string command;
    std::string format = "csv";
    std::string output = "-";
    std::uint64_t seed = 1;
    int threads = 1;
    double tol = 1e-6;
    std::optional<json> spectrum;
    json parameters = json::object();
};

json run_config_to_json(const RunConfig& cfg) {
    json j{{"command", cfg.command}, {"format", cfg.format},   {"output", cfg.output},
           {"seed", cfg.seed},       {"threads", cfg.threads}, {"tol", cfg.tol},
           {"parameters", cfg.parameters}};
    if (cfg.spectrum) j["spectrum"] = *cfg.spectrum;
    return j;
}

RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    try {
        cfg.command = j.at("command").get<std::string>();
        cfg.format = j.value("format", std::string("csv"));
        cfg.output = j.value("output", std::string("-"));
        cfg.seed = j.value("seed", std::uint64_t{1});
        cfg.threads = j.value("threads", 1);
        cfg.tol = j.value("tol", 1e-6);
        if (j.contains("spectrum")) cfg.spectrum = j["spectrum"];
        cfg.parameters = j.value("parameters", json::object());
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (cfg.command != "spectrum" && cfg.command != "moment" && cfg.command != "verify" &&
        cfg.command != "simulate")
        throw std::invalid_argument("config: unknown command \"" + cfg.command + "\"");
    if (cfg.format != "csv" && cfg.format != "json")
        throw std::invalid_argument("config: format must be csv or json");
    return cfg;
}

void write_table(const Table& t, const RunConfig& cfg) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (cfg.output != "-") {
        file.open(cfg.output);
        if (!file) throw std::invalid_argument("cannot open output file " + cfg.output);
        os = &file;
    }
    if (cfg.format == "csv") {
        for (std::size_t i = 0; i < t.header.size(); ++i)
            *os << t.header[i] << (i + 1 < t.header.size() ? "," : "\n");
        for (const auto& row : t.rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                *os << row[i] << (i + 1 < row.size() ? "," : "\n");
    } else {
        json arr = json::array();
        for (const auto& row : t.rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < t.header.size(); ++i) obj[t.header[i]] = row[i];
            arr.push_back(obj);
        }
        *os << arr.dump(2) << "\n";
    }
}

logid::LevySpectrum spectrum_from_config(const RunConfig& cfg) {
    if (!cfg.spectrum) throw std::invalid_argument("no spectrum given (use --gaussian, --log-poisson, "
                                                   "--spectrum or --spectrum-file)");
    return logid::spectrum_from_json(*cfg.spectrum);
}

double param_num(const RunConfig& cfg, const char* key, std::optional<double> fallback = {}) {
    if (cfg.parameters.contains(key)) return cfg.parameters[key].get<double>();
    if (fallback) return *fallback;
    throw std::invalid_argument(std::string("missing parameter \"") + key + "\"");
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg) {
    const auto spec = spectrum_from_config(cfg);
    const double mu = param_num(cfg, "mu");
    const int nmax = static_cast<int>(param_num(cfg, "nmax", 10.0));
    if (!(mu > 0.0)) throw std::invalid_argument("spectrum: mu must be > 0");
    if (nmax < 2) throw std::invalid_argument("spectrum: nmax must be >= 2");

    Table t;
    t.header = {"quantity", "arg", "value"};
    for (int m = 1; m <= nmax; ++m)
        t.rows.push_back({"d", std::to_string(m), g17(logid::d_coeff(spec, m))});
    for (int n = 1; n <= nmax; ++n)
        t.rows.push_back({"phi_im", std::to_string(n), g17(logid::phi_im(spec, n))});

    double deriv = 0.5 * spec.sigma2;
    for (const auto& a : spec.atoms)
        deriv += a.weight * (a.u * std::exp(a.u) - std::exp(a.u) + 1.0);
    t.rows.push_back({"nondegeneracy_mu_bound", "", deriv > 0.0 ? g17(1.0 / deriv) : "inf"});
    t.rows.push_back({"nondegenerate", g17(mu), logid::is_nondegenerate(spec, mu) ? "true" : "false"});
    for (int q = 2; q <= nmax; ++q) {
        const auto fin = logid::moment_finiteness(spec, mu, static_cast<double>(q));
        const char* verdict = fin.verdict == logid::FinitenessVerdict::Finite     ? "Finite"
                              : fin.verdict == logid::FinitenessVerdict::Boundary ? "Boundary"
                                                                                  : "Infinite";
        t.rows.push_back({"moment_verdict", std::to_string(q),
                          std::string(verdict) + " (exponent " + g17(fin.exponent) + ")"});
    }
    write_table(t, cfg);
    return kExitOk;
}

// Closed-form single moment, or unsupported_error naming the fallback route.
double closed_single_moment(const logid::LevySpectrum& spec, double mu, int n) {
    if (spec.atoms.empty() && spec.sigma2 > 0.0)
        return logid::lognormal_moment(mu * spec.sigma2, n);
    if (spec.sigma2 == 0.0 && spec.atoms.size() == 1 && spec.atoms[0].weight == 1.0) {
        const double c = std::exp(spec.atoms[0].u);
        if (std::abs(c - 2.0) < 1e-12) return logid::poisson_single_moment(2.0, mu, n);
        if (std::abs(c - 0.5) < 1e-12) return logid::poisson_single_moment(0.5, mu, n);
    }
    throw logid::unsupported_error(
        "no closed form for this spectrum/order; nearest supported route: --method quad");
}

int cmd_moment(const RunConfig& cfg) {
    const std::string method = cfg.parameters.value("method", std::string("closed"));
    Table t;
    t.header = {"method", "quantity", "value", "error"};

    if (method == "binom") {
        const int lambda = static_cast<int>(param_num(cfg, "lambda"));
        if (lambda < 0) throw std::invalid_argument("binom: lambda must be a nonnegative integer");
        if (cfg.parameters.contains("morris")) {
            const auto ab = cfg.parameters["morris"];
            const int N = static_cast<int>(param_num(cfg, "N"));
            const auto v = logid::morris_sum(N, ab.at(0).get<int>(), ab.at(1).get<int>(), lambda);
            t.rows.push_back({"binom", "M_" + std::to_string(N), logid::to_string(v), "0"});
        } else if (cfg.parameters.contains("joint")) {
            const auto nm = cfg.parameters["joint"];
            const int n = nm.at(0).get<int>(), m = nm.at(1).get<int>();
            const auto v = logid::joint_sum(n, m, lambda);
            t.rows.push_back({"binom", "S_{" + std::to_string(n) + "," + std::to_string(m) + "}",
                              logid::to_string(v), "0"});
        } else {
            const int N = static_cast<int>(param_num(cfg, "N"));
            const auto v = logid::selberg_sum(N, lambda);
            t.rows.push_back({"binom", "S_" + std::to_string(N), logid::to_string(v), "0"});
        }
        write_table(t, cfg);
        return kExitOk;
    }

    const auto spec = spectrum_from_config(cfg);
    const double mu = param_num(cfg, "mu");
    const bool raw = cfg.parameters.value("raw", false);

    if (cfg.parameters.contains("joint")) {
        const auto nm = cfg.parameters["joint"];
        const int n = nm.at(0).get<int>(), m = nm.at(1).get<int>();
        logid::IntervalPair iv;
        if (cfg.parameters.contains("intervals")) {
            const auto a = cfg.parameters["intervals"];
            iv = {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>(),
                  a.at(3).get<double>()};
        }
        iv.validate();
        const std::string qty = "E[M(" + g17(iv.a1) + "," + g17(iv.b1) + ")^" + std::to_string(n) +
                                " M(" + g17(iv.a2) + "," + g17(iv.b2) + ")^" + std::to_string(m) + "]";
        if (method == "quad") {
            const auto q = logid::joint_moment_quad(spec, mu, iv, n, m, cfg.tol);
            t.rows.push_back({"quad", qty, g17(q.value), g17(q.abs_error_estimate)});
        } else if (method == "closed") {
            const bool half_split = iv.a1 == 0.0 && iv.b1 == 0.5 && iv.a2 == 0.5 && iv.b2 == 1.0;
            if (!half_split)
                throw logid::unsupported_error("closed joint moments cover the (0,1/2),(1/2,1) split "
                                               "only; nearest supported route: --method quad");
            if (spec.atoms.empty() && spec.sigma2 > 0.0 && n == 1 && (m == 1 || m == 2)) {
                const int N = n + m;
                const double lam = -0.5 * mu * spec.sigma2;
                const double snm = logid::lognormal_joint_from_sum(N, 1, lam, {});
                const double v = std::exp2(mu * spec.sigma2 * N * (N - 1) / 2.0 - N) * snm;
                t.rows.push_back({"closed", qty, g17(v), "0"});
            } else if (spec.sigma2 == 0.0 && spec.atoms.size() == 1 && n == 1 && (m == 1 || m == 2)) {
                const double c = std::exp(spec.atoms[0].u);
                const auto pair = (m == 1) ? logid::JointPair::OneOne : logid::JointPair::OneTwo;
                t.rows.push_back({"closed", qty, g17(logid::poisson_joint(c, mu, pair)), "0"});
            } else {
                throw logid::unsupported_error("closed joint moments cover (n,m) = (1,1), (1,2) for "
                                               "gaussian and log-poisson spectra; nearest supported "
                                               "route: --method quad");
            }
        } else if (method == "sim") {
            logid::SimConfig scfg{param_num(cfg, "epsilon", 1e-2),
                                  static_cast<int>(param_num(cfg, "grid_n", 512.0)),
                                  static_cast<long>(param_num(cfg, "paths", 4000.0)), cfg.seed, mu};
            const auto model = spec.atoms.empty()
                                   ? logid::ModelSpec::gaussian()
                                   : logid::ModelSpec::log_poisson(std::exp(spec.atoms[0].u));
            const auto est = logid::estimate_moment(scfg, model, {{iv.a1, iv.b1}, {iv.a2, iv.b2}},
                                                    {static_cast<double>(n), static_cast<double>(m)});
            t.rows.push_back({"sim", qty, g17(est.mean), g17(est.std_error)});
        } else {
            throw logid::unsupported_error("unknown method \"" + method + "\"");
        }
        write_table(t, cfg);
        return kExitOk;
    }

    const int n = static_cast<int>(param_num(cfg, "n"));
    if (n < 1) throw std::invalid_argument("moment: n must be >= 1");
    const std::string qty = raw ? "S_" + std::to_string(n) + "(ordered)" : "E[M(0,1)^" + std::to_string(n) + "]";
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;

    if (method == "closed") {
        double v = closed_single_moment(spec, mu, n);
        if (raw) v /= fact;
        t.rows.push_back({"closed", qty, g17(v), "0"});
    } else if (method == "quad") {
        const auto params = logid::selberg_params_from_spectrum(spec, n, -0.5 * mu);
        auto q = logid::selberg_general(params, nullptr, cfg.tol);
        double v = raw ? q.value : fact * q.value;
        double e = raw ? q.abs_error_estimate : fact * q.abs_error_estimate;
        t.rows.push_back({"quad", qty, g17(v), g17(e)});
    } else if (method == "sim") {
        logid::SimConfig scfg{param_num(cfg, "epsilon", 1e-2),
                              static_cast<int>(param_num(cfg, "grid_n", 512.0)),
                              static_cast<long>(param_num(cfg, "paths", 4000.0)), cfg.seed, mu};
        const auto model = spec.atoms.empty() ? logid::ModelSpec::gaussian()
                                              : logid::ModelSpec::log_poisson(std::exp(spec.atoms[0].u));
        const auto est = logid::estimate_moment(scfg, model, {{0.0, 1.0}}, {static_cast<double>(n)});
        double v = est.mean, e = est.std_error;
        if (raw) {
            v /= fact;
            e /= fact;
        }
        t.rows.push_back({"sim", qty, g17(v), g17(e)});
    } else {
        throw logid::unsupported_error("unknown method \"" + method + "\" (closed|quad|binom|sim)");
    }
    write_table(t, cfg);
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
    std::vector<std::string> suites;
    if (cfg.parameters.contains("suites"))
        suites = cfg.parameters["suites"].get<std::vector<std::string>>();
    if (suites.empty()) suites = {"core"};

    std::vector<std::pair<std::string, std::vector<logid::VerifyRow>>> results;
    auto want = [&](const char* name) {
        for (const auto& s : suites)
            if (s == name || s == "all" || (s == "core" && std::string(name) != "sim")) return true;
        return false;
    };
    if (want("levy")) results.emplace_back("levy", logid::verify_levy());
    if (want("binom")) results.emplace_back("binom", logid::verify_binom_selberg());
    if (want("morris")) results.emplace_back("morris", logid::verify_binom_morris());
    if (want("sumrel")) results.emplace_back("sumrel", logid::verify_sum_relation());
    if (want("quadclosed")) results.emplace_back("quadclosed", logid::verify_quad_vs_closed());
    if (want("recurrence")) results.emplace_back("recurrence", logid::verify_recurrence());
    if (want("poisson")) results.emplace_back("poisson", logid::verify_poisson_lowmoments());
    if (want("prop51")) results.emplace_back("prop51", logid::verify_prop51());
    if (want("joint")) results.emplace_back("joint", logid::verify_joint_poisson());
    if (want("sim")) results.emplace_back("sim", logid::verify_simulation());
    if (results.empty())
        throw std::invalid_argument("verify: no such suite (levy|binom|morris|sumrel|quadclosed|"
                                    "recurrence|poisson|prop51|joint|sim|core|all)");

    Table t;
    t.header = {"suite", "name", "params", "residual", "tolerance", "status"};
    bool all_pass = true;
    for (const auto& [suite, rows] : results)
        for (const auto& r : rows) {
            all_pass = all_pass && r.pass;
            t.rows.push_back({suite, r.name, r.params, r.residual, g17(r.tolerance),
                              r.pass ? "PASS" : "FAIL"});
        }
    write_table(t, cfg);
    return all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_simulate(const RunConfig& cfg) {
    const std::string model_name = cfg.parameters.value("model", std::string("gaussian"));
    logid::ModelSpec model = logid::ModelSpec::gaussian();
    if (model_name == "log-poisson")
        model = logid::ModelSpec::log_poisson(param_num(cfg, "c", 2.0));
    else if (model_name != "gaussian")
        throw std::invalid_argument("simulate: model must be gaussian or log-poisson");

    logid::SimConfig scfg{param_num(cfg, "epsilon", 1e-2),
                          static_cast<int>(param_num(cfg, "grid_n", 512.0)),
                          static_cast<long>(param_num(cfg, "paths", 4000.0)), cfg.seed,
                          param_num(cfg, "mu")};
    scfg.validate();
    const std::string quantity = cfg.parameters.value("quantity", std::string("mean-mass"));

    Table t;
    t.header = {"model", "mu", "epsilon", "grid_n", "paths", "quantity", "value", "std_error"};
    auto emit = [&](const std::string& qty, double v, double se) {
        t.rows.push_back({model_name, g17(scfg.mu), g17(scfg.epsilon), std::to_string(scfg.grid_n),
                          std::to_string(scfg.paths), qty, g17(v), g17(se)});
    };

    if (quantity == "mean-mass") {
        const auto est = logid::estimate_moment(scfg, model, {{0.0, 1.0}}, {1.0});
        emit(quantity, est.mean, est.std_error);
    } else if (quantity == "second-moment") {
        const auto est = logid::estimate_moment(scfg, model, {{0.0, 1.0}}, {2.0});
        emit(quantity, est.mean, est.std_error);
    } else if (quantity == "moment") {
        const double q = param_num(cfg, "q", 2.0);
        const double a = param_num(cfg, "a", 0.0), b = param_num(cfg, "b", 1.0);
        const auto est = logid::estimate_moment(scfg, model, {{a, b}}, {q});
        emit("moment(q=" + g17(q) + ")", est.mean, est.std_error);
    } else if (quantity == "log-cov") {
        const double tt = param_num(cfg, "t"), tau = param_num(cfg, "tau");
        const auto est = logid::estimate_log_covariance(scfg, model, tt, tau);
        emit("log-cov(t=" + g17(tt) + ")", est.mean, est.std_error);
    } else if (quantity == "log-cov-slope") {
        const double tau = param_num(cfg, "tau", 0.05);
        std::vector<double> ts = {0.2, 0.4, 0.6, 0.8};
        if (cfg.parameters.contains("ts")) ts = cfg.parameters["ts"].get<std::vector<double>>();
        const auto est = logid::estimate_log_cov_slope(scfg, model, ts, tau);
        emit(quantity, est.mean, est.std_error);
    } else if (quantity == "exp-check") {
        // Mean of exp(P) at the middle grid node; should sit at 1.
        std::vector<double> y(static_cast<std::size_t>(scfg.paths));
        const std::size_t mid = static_cast<std::size_t>(scfg.grid_n / 2);
        if (model.poisson) {
            logid::PoissonFieldSampler s(scfg, model.c);
            for (long p = 0; p < scfg.paths; ++p)
                y[static_cast<std::size_t>(p)] = std::exp(s.sample(p).values[mid]);
        } else {
            logid::GaussianFieldSampler s(scfg);
            for (long p = 0; p < scfg.paths; ++p)
                y[static_cast<std::size_t>(p)] = std::exp(s.sample(p).values[mid]);
        }
        const auto est = logid::simdetail::mean_with_jackknife(y);
        emit(quantity, est.mean, est.std_error);
    } else {
        throw std::invalid_argument("simulate: unknown quantity \"" + quantity + "\"");
    }
    write_table(t, cfg);
    return kExitOk;
}

int run(const RunConfig& cfg) {
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "moment") return cmd_moment(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "simulate") return cmd_simulate(cfg);
    throw std::invalid_argument("unknown command " + cfg.command);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"moments of limit log-infinitely-divisible multiplicative chaos measures"};
    app.require_subcommand(0, 1);

    std::string config_path, output = "-", format = "csv";
    std::uint64_t seed = 1;
    int threads = 1;
    double tol = 1e-6;
    bool emit_config = false;
    app.add_option("--config", config_path, "load a full run configuration from JSON");
    app.add_flag("--emit-config", emit_config, "print the normalized configuration and exit");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", output, "output path, - for stdout");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--threads", threads, "worker thread cap (current build computes serially)");
    app.add_option("--tol", tol, "absolute tolerance for quadrature methods");

    // Shared spectrum flags.
    std::string spectrum_json, spectrum_file;
    double gaussian_s2 = 0.0, logp_c = 0.0;
    auto add_spectrum_flags = [&](CLI::App* sub) {
        sub->add_option("--spectrum", spectrum_json, "spectrum as inline JSON");
        sub->add_option("--spectrum-file", spectrum_file, "spectrum JSON file");
        sub->add_option("--gaussian", gaussian_s2, "gaussian spectrum with this sigma^2");
        sub->add_option("--log-poisson", logp_c, "log-poisson spectrum with this c");
    };

    auto* sc_spectrum = app.add_subcommand("spectrum", "d(m), phi(-in), nondegeneracy and moment verdicts");
    double mu = 0.0, nmax = 10;
    add_spectrum_flags(sc_spectrum);
    sc_spectrum->add_option("--mu", mu, "intermittency parameter")->required();
    sc_spectrum->add_option("--nmax", nmax, "largest order reported");

    auto* sc_moment = app.add_subcommand("moment", "single or joint moments of the total mass");
    std::string method = "closed";
    double m_mu = 0.0, m_n = 0;
    int m_lambda = -1, m_bigN = 0;
    std::vector<int> m_joint, m_morris;
    std::vector<double> m_intervals;
    bool m_raw = false;
    double m_eps = 1e-2, m_grid = 512, m_paths = 4000;
    add_spectrum_flags(sc_moment);
    sc_moment->add_option("--method", method, "closed|quad|binom|sim");
    sc_moment->add_option("--mu", m_mu, "intermittency parameter");
    sc_moment->add_option("-n,--n", m_n, "moment order");
    sc_moment->add_option("--joint", m_joint, "joint orders n,m")->expected(2);
    sc_moment->add_option("--intervals", m_intervals, "a1,b1,a2,b2 for joint moments")->expected(4);
    sc_moment->add_option("--lambda", m_lambda, "integer lambda for --method binom");
    sc_moment->add_option("--N", m_bigN, "dimension for --method binom");
    sc_moment->add_option("--morris", m_morris, "Morris a,b for --method binom")->expected(2);
    sc_moment->add_flag("--raw", m_raw, "report the ordered integral without the n! factor");
    sc_moment->add_option("--epsilon", m_eps, "sim: scale cutoff");
    sc_moment->add_option("--grid", m_grid, "sim: grid points");
    sc_moment->add_option("--paths", m_paths, "sim: path count");

    auto* sc_verify = app.add_subcommand("verify", "run identity verification suites");
    std::vector<std::string> suites;
    sc_verify->add_option("--suite", suites,
                          "levy|binom|morris|sumrel|quadclosed|recurrence|poisson|prop51|joint|sim|"
                          "core|all (default core)");

    auto* sc_sim = app.add_subcommand("simulate", "Monte Carlo estimates, one CSV row per quantity");
    std::string model = "gaussian", quantity = "mean-mass";
    double s_c = 2.0, s_mu = 0.2, s_eps = 1e-2, s_grid = 512, s_paths = 4000;
    double s_q = 2.0, s_a = 0.0, s_b = 1.0, s_t = 0.5, s_tau = 0.05;
    sc_sim->add_option("--model", model, "gaussian|log-poisson");
    sc_sim->add_option("--c", s_c, "log-poisson multiplier c");
    sc_sim->add_option("--mu", s_mu, "intermittency parameter");
    sc_sim->add_option("--epsilon", s_eps, "scale cutoff");
    sc_sim->add_option("--grid", s_grid, "grid points");
    sc_sim->add_option("--paths", s_paths, "path count");
    sc_sim->add_option("--quantity", quantity,
                       "mean-mass|second-moment|moment|log-cov|log-cov-slope|exp-check");
    sc_sim->add_option("--q", s_q, "moment power for quantity=moment");
    sc_sim->add_option("--a", s_a, "interval start for quantity=moment");
    sc_sim->add_option("--b", s_b, "interval end for quantity=moment");
    sc_sim->add_option("--t", s_t, "left endpoint for quantity=log-cov");
    sc_sim->add_option("--tau", s_tau, "window width for log-cov quantities");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::invalid_argument("cannot open config file " + config_path);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw std::invalid_argument(std::string("config parse error: ") + e.what());
            }
            cfg = run_config_from_json(j);
        } else {
            cfg.format = format;
            cfg.output = output;
            cfg.seed = seed;
            cfg.threads = threads;
            cfg.tol = tol;
            auto pick_spectrum = [&]() -> std::optional<json> {
                if (!spectrum_json.empty()) {
                    try {
                        return json::parse(spectrum_json);
                    } catch (const json::exception& e) {
                        throw std::invalid_argument(std::string("--spectrum parse error: ") + e.what());
                    }
                }
                if (!spectrum_file.empty()) {
                    std::ifstream in(spectrum_file);
                    if (!in) throw std::invalid_argument("cannot open " + spectrum_file);
                    try {
                        return json::parse(in);
                    } catch (const json::exception& e) {
                        throw std::invalid_argument(std::string("--spectrum-file parse error: ") + e.what());
                    }
                }
                if (gaussian_s2 > 0.0) return logid::spectrum_to_json(logid::LevySpectrum::gaussian(gaussian_s2));
                if (logp_c > 0.0) return logid::spectrum_to_json(logid::LevySpectrum::log_poisson(logp_c));
                return std::nullopt;
            };
            if (sc_spectrum->parsed()) {
                cfg.command = "spectrum";
                cfg.spectrum = pick_spectrum();
                cfg.parameters = {{"mu", mu}, {"nmax", nmax}};
            } else if (sc_moment->parsed()) {
                cfg.command = "moment";
                cfg.spectrum = pick_spectrum();
                cfg.parameters = {{"method", method}, {"mu", m_mu}, {"raw", m_raw}};
                if (m_n > 0) cfg.parameters["n"] = m_n;
                if (!m_joint.empty()) cfg.parameters["joint"] = m_joint;
                if (!m_intervals.empty()) cfg.parameters["intervals"] = m_intervals;
                if (m_lambda >= 0) cfg.parameters["lambda"] = m_lambda;
                if (m_bigN > 0) cfg.parameters["N"] = m_bigN;
                if (!m_morris.empty()) cfg.parameters["morris"] = m_morris;
                if (method == "sim") {
                    cfg.parameters["epsilon"] = m_eps;
                    cfg.parameters["grid_n"] = m_grid;
                    cfg.parameters["paths"] = m_paths;
                }
            } else if (sc_verify->parsed()) {
                cfg.command = "verify";
                if (!suites.empty()) cfg.parameters["suites"] = suites;
            } else if (sc_sim->parsed()) {
                cfg.command = "simulate";
                cfg.parameters = {{"model", model},   {"c", s_c},       {"mu", s_mu},
                                  {"epsilon", s_eps}, {"grid_n", s_grid}, {"paths", s_paths},
                                  {"quantity", quantity}, {"q", s_q},   {"a", s_a},
                                  {"b", s_b},         {"t", s_t},       {"tau", s_tau}};
            } else {
                std::cerr << app.help() << "\n";
                return kExitInvalidInput;
            }
        }

        if (emit_config) {
            std::cout << run_config_to_json(cfg).dump(2) << "\n";
            return kExitOk;
        }
        return run(cfg);
    } catch (const logid::unsupported_error& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const logid::accuracy_error& e) {
        std::cerr << "numerical: " << e.what() << " (best value " << g17(e.value) << " +- "
                  << g17(e.abs_error) << ")\n";
        return kExitNumerical;
    } catch (const logid::numerical_error& e) {
        std::cerr << "numerical: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
