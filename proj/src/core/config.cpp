#include "core/config.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>

namespace lagrg {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            fail(ErrorCode::ConfigInvalid, "config", "unknown key \"" + it.key() + "\" in " + where);
}

double num(const json& j, const char* key, double fallback, bool* present = nullptr) {
    if (!j.contains(key)) {
        if (present) *present = false;
        return fallback;
    }
    if (present) *present = true;
    if (!j.at(key).is_number())
        fail(ErrorCode::ConfigInvalid, "config", std::string(key) + " must be a number");
    return j.at(key).get<double>();
}

int integer(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        fail(ErrorCode::ConfigInvalid, "config", std::string(key) + " must be an integer");
    return j.at(key).get<int>();
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        fail(ErrorCode::ConfigInvalid, "config", std::string("JSON parse error: ") + e.what());
    }
    reject_unknown(j, {"schema_version", "command", "seed", "params", "hierarchy", "variant",
                       "search", "kmax", "out", "random_seed", "precision"},
                   "top level");
    ExperimentConfig cfg;
    cfg.schema_version = integer(j, "schema_version", 1);
    if (cfg.schema_version != 1)
        fail(ErrorCode::ConfigInvalid, "config", "unsupported schema_version");
    if (!j.contains("command") || !j.at("command").is_string())
        fail(ErrorCode::ConfigInvalid, "config", "command is required");
    cfg.command = j.at("command").get<std::string>();
    static const std::set<std::string> commands = {"orbit", "find-critical", "eigenvalues", "limit",
                                                   "oracle-check"};
    if (!commands.count(cfg.command))
        fail(ErrorCode::ConfigInvalid, "config", "unknown command \"" + cfg.command + "\"");

    if (j.contains("seed")) {
        const json& s = j.at("seed");
        reject_unknown(s, {"C", "m", "alpha", "gammas"}, "seed");
        cfg.seed.C = num(s, "C", 1.0);
        cfg.seed.m = integer(s, "m", 0);
        cfg.seed.alpha = num(s, "alpha", 0.0);
        if (s.contains("gammas")) {
            if (!s.at("gammas").is_array())
                fail(ErrorCode::ConfigInvalid, "config", "seed.gammas must be an array");
            for (const auto& g : s.at("gammas")) {
                if (!g.is_number())
                    fail(ErrorCode::ConfigInvalid, "config", "seed.gammas entries must be numbers");
                cfg.seed.gammas.push_back(g.get<double>());
            }
        }
        cfg.seed.validate("config.seed");
    }

    if (j.contains("params")) {
        const json& p = j.at("params");
        reject_unknown(p, {"theta", "lambda", "delta", "beta", "tau", "K", "n_max", "tol",
                           "quad_tol"},
                       "params");
        cfg.params.theta = num(p, "theta", cfg.params.theta);
        cfg.params.lambda = num(p, "lambda", cfg.params.lambda);
        cfg.params.delta = integer(p, "delta", cfg.params.delta);
        cfg.params.K = integer(p, "K", cfg.params.K);
        cfg.params.n_max = integer(p, "n_max", cfg.params.n_max);
        cfg.params.tol = num(p, "tol", cfg.params.tol);
        cfg.params.quad_tol = num(p, "quad_tol", cfg.params.quad_tol);
        bool has_beta = false, has_tau = false;
        double beta = num(p, "beta", 0.0, &has_beta);
        double tau = num(p, "tau", 0.0, &has_tau);
        if (has_beta && has_tau)
            fail(ErrorCode::ConfigInvalid, "config", "give either beta or tau, not both");
        if (has_beta) cfg.params.beta = beta;
        if (has_tau) cfg.params.beta = tau / (cfg.params.delta_pow_lambda() - 1.0);
        cfg.params.validate("config.params");
    }

    if (j.contains("precision")) {
        std::string prec = j.at("precision").get<std::string>();
        if (prec == "double")
            cfg.params.precision = Precision::Double;
        else if (prec == "extended")
            cfg.params.precision = Precision::ExtendedPrec;
        else
            fail(ErrorCode::ConfigInvalid, "config", "precision must be double or extended");
    }

    if (j.contains("hierarchy")) {
        const json& h = j.at("hierarchy");
        reject_unknown(h, {"N", "d", "depth"}, "hierarchy");
        cfg.hierarchy.N = integer(h, "N", 1);
        cfg.hierarchy.d = num(h, "d", 0.0);
        cfg.hierarchy.depth = integer(h, "depth", 2);
        cfg.hierarchy.validate("config.hierarchy");
        cfg.has_hierarchy = true;
    }

    if (j.contains("variant")) {
        cfg.variant = j.at("variant").get<std::string>();
        static const std::set<std::string> variants = {"T", "Q", "Q_tilde", "abnormal", "classical"};
        if (!variants.count(cfg.variant))
            fail(ErrorCode::ConfigInvalid, "config", "unknown variant \"" + cfg.variant + "\"");
    }

    if (j.contains("search")) {
        const json& s = j.at("search");
        reject_unknown(s, {"beta_tol", "zeta_tol_log", "corridor_n", "horizon_cap"}, "search");
        cfg.search.beta_tol = num(s, "beta_tol", cfg.search.beta_tol);
        cfg.search.zeta_tol_log = num(s, "zeta_tol_log", cfg.search.zeta_tol_log);
        cfg.search.corridor_n = integer(s, "corridor_n", cfg.search.corridor_n);
        cfg.search.horizon_cap = integer(s, "horizon_cap", cfg.search.horizon_cap);
    }

    cfg.kmax = integer(j, "kmax", cfg.kmax);
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("random_seed")) cfg.random_seed = j.at("random_seed").get<unsigned long>();
    return cfg;
}

static json config_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["command"] = cfg.command;
    j["seed"] = {{"C", cfg.seed.C}, {"m", cfg.seed.m}, {"alpha", cfg.seed.alpha},
                 {"gammas", cfg.seed.gammas}};
    j["params"] = {{"theta", cfg.params.theta}, {"lambda", cfg.params.lambda},
                   {"delta", cfg.params.delta}, {"beta", cfg.params.beta},
                   {"K", cfg.params.K},         {"n_max", cfg.params.n_max},
                   {"tol", cfg.params.tol},     {"quad_tol", cfg.params.quad_tol}};
    j["precision"] = cfg.params.precision == Precision::ExtendedPrec ? "extended" : "double";
    if (cfg.has_hierarchy)
        j["hierarchy"] = {{"N", cfg.hierarchy.N}, {"d", cfg.hierarchy.d},
                          {"depth", cfg.hierarchy.depth}};
    j["variant"] = cfg.variant;
    j["search"] = {{"beta_tol", cfg.search.beta_tol},
                   {"zeta_tol_log", cfg.search.zeta_tol_log},
                   {"corridor_n", cfg.search.corridor_n},
                   {"horizon_cap", cfg.search.horizon_cap}};
    j["kmax"] = cfg.kmax;
    j["out"] = cfg.out_dir;
    j["random_seed"] = cfg.random_seed;
    return j;
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(); }

namespace {

OrbitVariant orbit_variant(const std::string& v) {
    if (v == "T") return OrbitVariant::T;
    if (v == "Q") return OrbitVariant::Q;
    if (v == "Q_tilde") return OrbitVariant::QTilde;
    fail(ErrorCode::ConfigInvalid, "config", "orbit variant must be T, Q or Q_tilde");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "config", "cannot open " + path);
    out << text;
}

std::string orbit_csv(const ExperimentConfig& cfg) {
    OrbitOptions oo;
    oo.keep_series = false;
    auto records = run_orbit_dispatch(cfg.seed, cfg.params, orbit_variant(cfg.variant), oo);
    std::string s;
    s += "# lagrg orbit trace\n";
    s += "# generated: " + timestamp() + "\n";
    s += "# config: " + config_to_json(cfg) + "\n";
    s += "n,logC,phi1,phi2,nu,kappa,flags,tail_estimate\n";
    for (const auto& r : records) {
        s += std::to_string(r.n) + "," + fmt_double(r.log_C) + "," + fmt_double(r.phi1) + "," +
             fmt_double(r.phi2) + ",";
        s += r.nu_valid ? fmt_double(r.nu) : "nan";
        s += ",";
        s += r.nu_valid ? fmt_double(r.kappa) : "nan";
        s += "," + std::to_string(r.flags) + "," + fmt_double(r.tail) + "\n";
    }
    return s;
}

json critical_json(const ExperimentConfig& cfg) {
    CriticalResult res = find_beta_star(cfg.seed, cfg.params, cfg.search);
    json out;
    out["beta_star"] = res.beta_star;
    out["tau_star"] = res.tau_star;
    out["zeta_star"] = res.zeta_star;
    out["zeta_minus"] = res.zeta_minus;
    out["bracket"] = {res.bracket_lo, res.bracket_hi};
    out["oracle_path"] = res.oracle_path;
    json trace = json::array();
    for (const auto& t : res.trace)
        trace.push_back({{"beta", t.beta}, {"verdict", verdict_name(t.verdict)},
                         {"exit_step", t.exit_step}});
    out["trace"] = trace;
    return out;
}

std::string eigenvalues_csv(const ExperimentConfig& cfg) {
    FixedPoint triv = fixed_point(FixedPointKind::Trivial, cfg.params);
    FixedPoint crit = fixed_point(FixedPointKind::Critical, cfg.params);
    auto a1 = linearization_eigenvalues(triv, cfg.params, cfg.kmax);
    auto a2 = linearization_eigenvalues(crit, cfg.params, cfg.kmax);
    auto n1 = numeric_linearization_spectrum(triv, cfg.params, cfg.kmax);
    auto n2 = numeric_linearization_spectrum(crit, cfg.params, cfg.kmax);
    auto s1 = a1, s2 = a2;
    std::sort(s1.begin(), s1.end(), std::greater<double>());
    std::sort(s2.begin(), s2.end(), std::greater<double>());
    std::string s;
    s += "# lagrg linearization spectrum\n";
    s += "# generated: " + timestamp() + "\n";
    s += "# config: " + config_to_json(cfg) + "\n";
    s += "k,trivial,critical,numeric_trivial_sorted,numeric_critical_sorted\n";
    for (int k = 0; k <= cfg.kmax; ++k) {
        size_t i = static_cast<size_t>(k);
        s += std::to_string(k) + "," + fmt_double(a1[i]) + "," + fmt_double(a2[i]) + "," +
             fmt_double(n1[i]) + "," + fmt_double(n2[i]) + "\n";
    }
    (void)s1;
    (void)s2;
    return s;
}

json limit_json(const ExperimentConfig& cfg) {
    MeasureVariant mv;
    if (cfg.variant == "abnormal")
        mv = MeasureVariant::Abnormal;
    else if (cfg.variant == "classical")
        mv = MeasureVariant::Classical;
    else
        fail(ErrorCode::ConfigInvalid, "config", "limit variant must be abnormal or classical");
    HierarchyParams hp = cfg.has_hierarchy ? cfg.hierarchy : HierarchyParams{};
    LimitVerdict v = limit_verdict(cfg.seed, cfg.params, hp, mv);
    json out;
    out["verdict"] = limit_kind_name(v.kind);
    if (v.has_variance) out["variance"] = v.variance;
    out["tau"] = v.tau;
    out["tau_star"] = v.tau_star;
    if (mv == MeasureVariant::Classical) {
        out["phi_tilde_limit"] = v.phi_tilde_limit;
        out["phi_tilde_bound"] = v.phi_tilde_bound;
    }
    return out;
}

json oracle_check_json(const ExperimentConfig& cfg) {
    json out;
    HierarchyParams hp = cfg.has_hierarchy ? cfg.hierarchy : HierarchyParams{};
    EvolutionParams p = cfg.params;
    p.theta = theta_from_dimension(hp.N, hp.d);

    // grid recursion against the transform path, depth steps, 10 test points
    double sigma = 1.0;
    GridDensity g = gaussian_grid(sigma, 12.0, 2048);
    Series<double> f = exponential_series(0.5 * sigma * sigma, p.K);
    double max_err = 0.0;
    for (int n = 1; n <= hp.depth; ++n) {
        g = measure_step_oracle(g, p, hp, MeasureVariant::Abnormal, n);
        Series<double> stepped = step_T(f, p, 1.0);
        normalize_at_zero(stepped);
        f = stepped;
        for (int i = 0; i < 10; ++i) {
            double x = -0.9 + 0.2 * i;
            double lhs = laplace_transform(g, x);
            double rhs = eval(f, x * x);
            max_err = std::max(max_err, std::abs(lhs - rhs));
        }
    }
    out["grid_vs_transform_max_err"] = max_err;

    // heat integral form against the coefficient path
    Series<double> h = to_series<double>(cfg.seed, p.K);
    double t = 0.4;
    double max_int = 0.0;
    auto seed_eval = [&](double x) {
        double acc = cfg.seed.C * std::exp(cfg.seed.alpha * x);
        for (double gm : cfg.seed.gammas) acc *= 1.0 + gm * x;
        return std::pow(x, cfg.seed.m) * acc;
    };
    Series<double> hh = heat_apply(h, p.theta > 0 ? p.theta : 1.0, t);
    for (int i = 0; i < 10; ++i) {
        double z = -0.9 + 0.2 * i;
        double via_int = heat_apply_integral(seed_eval, p.theta > 0 ? p.theta : 1.0, t, z, p.quad_tol);
        double via_coeff = eval(hh, z);
        max_int = std::max(max_int, std::abs(via_int - via_coeff));
    }
    out["integral_vs_coefficient_max_err"] = max_int;

    // closed-form exponential orbit against the iterated map
    EvolutionParams q = p;
    q.beta = 0.5 / std::max(cfg.seed.alpha, 0.5);
    LaguerreFactored expseed{1.0, 0, std::max(cfg.seed.alpha, 0.5), {}};
    OrbitOptions oo;
    oo.keep_series = false;
    oo.n_steps = 10;
    auto orb = run_orbit_dispatch(expseed, q, OrbitVariant::T, oo);
    double max_orb = 0.0;
    for (const auto& r : orb) {
        auto st = exponential_orbit_oracle(1.0, expseed.alpha, q, r.n);
        max_orb = std::max(max_orb, std::abs(st.u - r.phi1));
        max_orb = std::max(max_orb, std::abs(st.log_C - r.log_C));
    }
    out["exponential_oracle_max_err"] = max_orb;
    out["pass"] = max_err < 1e-6 && max_int < 1e-6 && max_orb < 1e-10;
    return out;
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::vector<std::string> written;
    auto emit_json = [&](const std::string& name, json payload) {
        payload["config"] = config_json(cfg);
        payload["generated_at"] = timestamp();
        std::string path = (fs::path(cfg.out_dir) / name).string();
        write_text(path, payload.dump(2) + "\n");
        written.push_back(path);
    };
    if (cfg.command == "orbit") {
        std::string path = (fs::path(cfg.out_dir) / "orbit.csv").string();
        write_text(path, orbit_csv(cfg));
        written.push_back(path);
    } else if (cfg.command == "find-critical") {
        emit_json("critical.json", critical_json(cfg));
    } else if (cfg.command == "eigenvalues") {
        std::string path = (fs::path(cfg.out_dir) / "eigenvalues.csv").string();
        write_text(path, eigenvalues_csv(cfg));
        written.push_back(path);
    } else if (cfg.command == "limit") {
        emit_json("limit.json", limit_json(cfg));
    } else if (cfg.command == "oracle-check") {
        emit_json("oracle_check.json", oracle_check_json(cfg));
    } else {
        fail(ErrorCode::ConfigInvalid, "config", "unknown command");
    }
    return written;
}

}  // namespace lagrg
