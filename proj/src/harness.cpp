#include "spdelab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "experiments.hpp"
#include "spdelab/errors.hpp"
#include "spdelab/spde.hpp"

namespace spdelab {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
    static const std::vector<std::pair<ExperimentKind, std::string>> names = {
        {ExperimentKind::sode_asymptotic, "sode-asymptotic"},
        {ExperimentKind::sode_bounds, "sode-bounds"},
        {ExperimentKind::spde_martingale, "spde-martingale"},
        {ExperimentKind::spde_converge, "spde-converge"},
        {ExperimentKind::blowup_scan, "blowup-scan"},
        {ExperimentKind::fourier_check, "fourier-check"},
        {ExperimentKind::lp_norms, "lp-norms"},
    };
    return names;
}

bool is_sode(ExperimentKind k) {
    return k == ExperimentKind::sode_asymptotic || k == ExperimentKind::sode_bounds;
}

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

double read_real(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
    }
    if (v.is_null() && key == "trunc") return kInf;
    bad("config key '" + key + "' must be a number");
}

std::vector<double> read_reals(const json& v, const std::string& key) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) bad("config key '" + key + "' must be a number or an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(read_real(e, key));
    return out;
}

std::uint64_t read_count(const json& v, const std::string& key) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
        bad("config key '" + key + "' must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

int read_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) bad("config key '" + key + "' must be an integer");
    return v.get<int>();
}

json real_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (std::isnan(v)) return json("nan");
    return json(v);
}

U0Spec read_u0(const json& j, U0Spec base) {
    if (j.is_number()) {
        base.type = "constant";
        base.value = j.get<double>();
        return base;
    }
    if (!j.is_object()) bad("config key 'u0' must be a number or an object");
    static const std::set<std::string> keys = {"type", "value", "mass", "cell", "amplitude",
                                               "mode", "low", "high", "values"};
    for (const auto& [k, v] : j.items()) {
        if (!keys.contains(k)) bad("unknown u0 key '" + k + "'");
        if (k == "type") {
            if (!v.is_string()) bad("u0.type must be a string");
            base.type = v.get<std::string>();
        } else if (k == "value") base.value = read_real(v, "u0.value");
        else if (k == "mass") base.mass = read_real(v, "u0.mass");
        else if (k == "cell") base.cell = read_int(v, "u0.cell");
        else if (k == "amplitude") base.amplitude = read_real(v, "u0.amplitude");
        else if (k == "mode") base.mode = read_int(v, "u0.mode");
        else if (k == "low") base.low = read_real(v, "u0.low");
        else if (k == "high") base.high = read_real(v, "u0.high");
        else if (k == "values") base.values = read_reals(v, "u0.values");
    }
    return base;
}

json u0_to_json(const U0Spec& u) {
    json j;
    j["type"] = u.type;
    if (u.type == "constant") j["value"] = u.value;
    if (u.type == "spike") {
        j["mass"] = u.mass;
        j["cell"] = u.cell;
    }
    if (u.type == "cosine") {
        j["value"] = u.value;
        j["amplitude"] = u.amplitude;
        j["mode"] = u.mode;
    }
    if (u.type == "uniform") {
        j["low"] = u.low;
        j["high"] = u.high;
    }
    if (u.type == "values") j["values"] = u.values;
    return j;
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kind_names()) {
        if (k == kind) return name;
    }
    return "unknown";
}

ExperimentKind kind_from_string(const std::string& name) {
    for (const auto& [k, n] : kind_names()) {
        if (n == name) return k;
    }
    bad("unknown experiment kind '" + name + "'");
}

const std::vector<ExperimentKind>& all_kinds() {
    static const std::vector<ExperimentKind> kinds = [] {
        std::vector<ExperimentKind> out;
        for (const auto& [k, n] : kind_names()) out.push_back(k);
        return out;
    }();
    return kinds;
}

Field U0Spec::build(const GridSpec& grid, double trunc) const {
    Field f;
    if (type == "constant") {
        f = constant_field(grid, value);
    } else if (type == "spike") {
        return capped_spike(grid, mass, cell, trunc);
    } else if (type == "cosine") {
        f.resize(grid.size());
        for (int x = 0; x < grid.m; ++x) {
            f[static_cast<std::size_t>(x)] =
                value + amplitude * std::cos(2.0 * std::numbers::pi * mode * grid.position(x));
        }
    } else if (type == "values") {
        f = values;
    } else {
        bad("u0 type '" + type + "' does not describe a field");
    }
    for (double& v : f) v = std::min(v, trunc);
    return f;
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    switch (kind) {
        case ExperimentKind::sode_bounds:
            c.paths = 10000;
            c.scheme = "euler";
            c.horizon = 50.0;
            c.alpha = {0.5, 0.9};
            break;
        case ExperimentKind::sode_asymptotic:
            c.paths = 100000;
            c.scheme = "exact-bessel";
            c.horizon = 1e4;
            break;
        case ExperimentKind::spde_martingale:
            c.paths = 10000;
            break;
        case ExperimentKind::spde_converge:
            c.paths = 1000;
            break;
        case ExperimentKind::blowup_scan:
            c.paths = 500;
            c.trunc = kInf;
            c.horizon = 0.5;
            break;
        case ExperimentKind::fourier_check:
            c.paths = 1000;
            c.grid = 65;
            c.horizon = 0.1;
            c.u0.type = "cosine";
            c.u0.value = 1.0;
            c.u0.amplitude = 0.5;
            c.u0.mode = 1;
            c.series = true;
            break;
        case ExperimentKind::lp_norms:
            c.paths = 1000;
            c.alpha = {0.25};
            break;
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (paths < 1) bad("paths must be at least 1");
    if (paths > 0xffffffffULL) bad("paths must fit in 32 bits");
    if (!(gamma > 1.0) || !std::isfinite(gamma)) bad("gamma must be a finite real > 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) bad("dt must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) bad("horizon must be positive");
    if (dt > horizon) bad("dt must not exceed the horizon");
    if (!(trunc > 0.0)) bad("trunc must be positive (or \"inf\")");
    if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) bad("noise_scale must be >= 0");
    if (samples < 1) bad("samples must be at least 1");
    if (!(c_alpha > 0.0)) bad("c_alpha must be positive");
    for (double v : p) {
        if (!(v >= 1.0)) bad("every p must be >= 1");
    }
    for (double v : levels) {
        if (!(v > 0.0)) bad("levels must be positive");
    }
    if (alpha.empty()) bad("alpha list must not be empty");
    for (double a : alpha) {
        if (!(a > 0.0)) bad("alpha values must be positive");
        if ((kind == ExperimentKind::sode_bounds || kind == ExperimentKind::spde_martingale) && !(a < 1.0)) {
            bad("alpha must lie in (0, 1) for " + to_string(kind));
        }
        if (kind == ExperimentKind::spde_converge && !(a < 2.0)) bad("alpha must lie in (0, 2)");
    }

    if (is_sode(kind)) {
        if (scheme != "euler" && scheme != "exact-bessel") {
            bad("scheme must be 'euler' or 'exact-bessel' for " + to_string(kind));
        }
        if (kind == ExperimentKind::sode_bounds && scheme != "euler") {
            bad("sode-bounds needs running maxima; only the euler scheme records them");
        }
        if (u0.type == "constant") {
            if (!(u0.value > 0.0) || !std::isfinite(u0.value)) bad("u0 must be positive");
        } else if (u0.type == "uniform") {
            if (kind != ExperimentKind::sode_bounds) bad("random starts apply to sode-bounds only");
            if (!(u0.low > 0.0 && u0.high >= u0.low && std::isfinite(u0.high))) {
                bad("u0 uniform range needs 0 < low <= high");
            }
        } else {
            bad("scalar experiments accept u0 types 'constant' and 'uniform'");
        }
        if (kind == ExperimentKind::sode_asymptotic && bins < 1) bad("bins must be at least 1");
        if (!(max_relative_noise >= 0.0) || !std::isfinite(max_relative_noise)) {
            bad("max_relative_noise must be >= 0");
        }
        return;
    }

    if (scheme != "explicit" && scheme != "semi-implicit") {
        bad("scheme must be 'explicit' or 'semi-implicit' for " + to_string(kind));
    }
    if (grid < 4) bad("grid must have at least 4 cells");
    const GridSpec g = GridSpec::make(grid);
    if (u0.type == "uniform") bad("u0 type 'uniform' applies to scalar experiments only");
    if (u0.type == "spike" && (u0.cell < 0 || u0.cell >= grid)) bad("u0 spike cell out of range");
    if (u0.type == "spike" && !(u0.mass >= 0.0)) bad("u0 spike mass must be >= 0");
    if (u0.type == "cosine" && !(u0.value >= std::fabs(u0.amplitude))) {
        bad("u0 cosine needs value >= |amplitude| to stay nonnegative");
    }
    if (u0.type == "values" && u0.values.size() != g.size()) bad("u0 values must have grid entries");
    if (u0.type == "constant" && !(u0.value >= 0.0 && std::isfinite(u0.value))) {
        bad("u0 must be a finite nonnegative level");
    }
    if (u0.type != "constant" && u0.type != "spike" && u0.type != "cosine" && u0.type != "values") {
        bad("unknown u0 type '" + u0.type + "'");
    }
    const Field f = u0.build(g, trunc);
    for (double v : f) {
        if (!(v >= 0.0)) bad("u0 must be nonnegative");
    }

    auto check_spde = [&](double step, double level, double gam) {
        SpdeConfig s;
        s.gamma = gam;
        s.trunc = level;
        s.grid = g;
        s.dt = step;
        s.horizon = horizon;
        s.scheme = scheme == "explicit" ? SpdeScheme::explicit_euler : SpdeScheme::semi_implicit;
        s.u0 = f;
        s.validate();
    };

    switch (kind) {
        case ExperimentKind::spde_converge:
            if (trunc_pairs.empty()) bad("trunc_pairs must not be empty");
            for (const auto& pr : trunc_pairs) {
                if (!(pr[0] > 0.0 && pr[0] <= pr[1])) bad("each trunc pair needs 0 < n1 <= n2");
                check_spde(dt, pr[0], gamma);
            }
            break;
        case ExperimentKind::blowup_scan:
            if (gammas.empty()) bad("gammas must not be empty");
            if (!(threshold > 0.0)) bad("threshold must be positive");
            for (double gm : gammas) {
                if (!(gm > 1.0)) bad("every scanned gamma must exceed 1");
                check_spde(dt, trunc, gm);
            }
            break;
        case ExperimentKind::fourier_check: {
            if (dt_ladder.empty()) bad("dt_ladder must not be empty");
            for (std::size_t i = 0; i < dt_ladder.size(); ++i) {
                if (!(dt_ladder[i] > 0.0 && dt_ladder[i] <= horizon)) bad("dt_ladder entries must lie in (0, horizon]");
                if (i > 0 && !(dt_ladder[i] < dt_ladder[i - 1])) bad("dt_ladder must be strictly decreasing");
                check_spde(dt_ladder[i], trunc, gamma);
            }
            const int nmax = (grid - 1) / 2;
            if (modes.empty()) bad("modes must not be empty");
            for (int n : modes) {
                if (std::abs(n) > nmax) bad("fourier mode exceeds the resolvable range of the grid");
            }
            for (int n : qv_modes) {
                if (std::abs(n) > nmax) bad("qv mode exceeds the resolvable range of the grid");
            }
            if (std::abs(qv_modes[0] + qv_modes[1]) > grid / 2) bad("qv mode sum aliases on the grid");
            break;
        }
        default:
            check_spde(dt, trunc, gamma);
            break;
    }
}

ExperimentConfig apply_json(ExperimentConfig c, const json& j) {
    if (!j.is_object()) bad("config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (k == "kind") {
            if (!v.is_string()) bad("kind must be a string");
            c.kind = kind_from_string(v.get<std::string>());
        } else if (k == "seed") c.seed = read_count(v, k);
        else if (k == "paths") c.paths = read_count(v, k);
        else if (k == "gamma") c.gamma = read_real(v, k);
        else if (k == "trunc") c.trunc = read_real(v, k);
        else if (k == "grid") c.grid = read_int(v, k);
        else if (k == "dt") c.dt = read_real(v, k);
        else if (k == "horizon") c.horizon = read_real(v, k);
        else if (k == "scheme") {
            if (!v.is_string()) bad("scheme must be a string");
            c.scheme = v.get<std::string>();
        } else if (k == "u0") c.u0 = read_u0(v, c.u0);
        else if (k == "noise_scale") c.noise_scale = read_real(v, k);
        else if (k == "max_relative_noise") c.max_relative_noise = read_real(v, k);
        else if (k == "samples") c.samples = read_count(v, k);
        else if (k == "retain_fields") {
            if (!v.is_boolean()) bad("retain_fields must be a boolean");
            c.retain_fields = v.get<bool>();
        } else if (k == "series") {
            if (!v.is_boolean()) bad("series must be a boolean");
            c.series = v.get<bool>();
        } else if (k == "alpha") c.alpha = read_reals(v, k);
        else if (k == "p") c.p = read_reals(v, k);
        else if (k == "levels") c.levels = read_reals(v, k);
        else if (k == "c_alpha") c.c_alpha = read_real(v, k);
        else if (k == "bins") c.bins = read_count(v, k);
        else if (k == "trunc_pairs") {
            if (!v.is_array()) bad("trunc_pairs must be an array of [n1, n2] pairs");
            c.trunc_pairs.clear();
            for (const auto& e : v) {
                if (!e.is_array() || e.size() != 2) bad("trunc_pairs entries must be [n1, n2]");
                c.trunc_pairs.push_back({read_real(e[0], k), read_real(e[1], k)});
            }
        } else if (k == "gammas") c.gammas = read_reals(v, k);
        else if (k == "threshold") c.threshold = read_real(v, k);
        else if (k == "dt_ladder") c.dt_ladder = read_reals(v, k);
        else if (k == "modes") {
            if (!v.is_array()) bad("modes must be an array of integers");
            c.modes.clear();
            for (const auto& e : v) c.modes.push_back(read_int(e, k));
        } else if (k == "qv_modes") {
            if (!v.is_array() || v.size() != 2) bad("qv_modes must be [m, n]");
            c.qv_modes = {read_int(v[0], k), read_int(v[1], k)};
        } else {
            bad("unknown config key '" + k + "'");
        }
    }
    return c;
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["kind"] = to_string(c.kind);
    j["seed"] = c.seed;
    j["paths"] = c.paths;
    j["gamma"] = c.gamma;
    j["dt"] = c.dt;
    j["horizon"] = c.horizon;
    j["scheme"] = c.scheme;
    j["u0"] = u0_to_json(c.u0);
    j["noise_scale"] = c.noise_scale;
    j["series"] = c.series;
    if (c.kind == ExperimentKind::sode_bounds) {
        j["alpha"] = c.alpha;
        j["levels"] = c.levels;
        j["c_alpha"] = c.c_alpha;
    }
    if (c.kind == ExperimentKind::sode_asymptotic) j["bins"] = c.bins;
    if (is_sode(c.kind) && c.scheme == "euler") j["max_relative_noise"] = c.max_relative_noise;
    if (!is_sode(c.kind)) {
        j["trunc"] = real_to_json(c.trunc);
        j["grid"] = c.grid;
        j["samples"] = c.samples;
        j["retain_fields"] = c.retain_fields;
    }
    switch (c.kind) {
        case ExperimentKind::spde_martingale:
            j["alpha"] = c.alpha;
            j["p"] = c.p;
            j["c_alpha"] = c.c_alpha;
            break;
        case ExperimentKind::spde_converge:
            j["alpha"] = c.alpha;
            j["trunc_pairs"] = c.trunc_pairs;
            break;
        case ExperimentKind::blowup_scan:
            j["gammas"] = c.gammas;
            j["threshold"] = c.threshold;
            break;
        case ExperimentKind::fourier_check:
            j["dt_ladder"] = c.dt_ladder;
            j["modes"] = c.modes;
            j["qv_modes"] = c.qv_modes;
            break;
        case ExperimentKind::lp_norms:
            j["alpha"] = c.alpha;
            j["p"] = c.p;
            break;
        default:
            break;
    }
    if (c.kind == ExperimentKind::blowup_scan) j.erase("gamma");
    if (c.kind == ExperimentKind::spde_converge) j.erase("trunc");
    if (c.kind == ExperimentKind::fourier_check) j.erase("dt");
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& file, std::optional<ExperimentKind> kind) {
    std::ifstream in(file);
    if (!in) bad("cannot read config file " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        bad("malformed config " + file.string() + ": " + e.what());
    }
    if (!j.is_object()) bad("config " + file.string() + " must hold a JSON object");
    ExperimentKind k;
    if (j.contains("kind")) {
        if (!j["kind"].is_string()) bad("kind must be a string");
        k = kind_from_string(j["kind"].get<std::string>());
        if (kind && *kind != k) {
            bad("config kind '" + to_string(k) + "' does not match subcommand '" + to_string(*kind) + "'");
        }
    } else if (kind) {
        k = *kind;
    } else {
        bad("config " + file.string() + " lacks 'kind'");
    }
    return apply_json(default_config(k), j);
}

std::uint32_t SeriesRows::functional_id(const std::string& name) {
    for (std::size_t i = 0; i < functionals.size(); ++i) {
        if (functionals[i] == name) return static_cast<std::uint32_t>(i);
    }
    functionals.push_back(name);
    return static_cast<std::uint32_t>(functionals.size() - 1);
}

int default_workers() {
    if (const char* env = std::getenv("SPDE_LAB_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return hex16(h);
}

EnsembleSummary run_ensemble(const ExperimentConfig& cfg, int workers) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    EnsembleSummary s;
    s.kind = to_string(cfg.kind);
    s.seed = cfg.seed;
    s.paths = cfg.paths;
    s.config = to_json(cfg);
    s.config_hash = fnv1a_hex(s.config.dump());
    workers = std::max(1, workers);

    switch (cfg.kind) {
        case ExperimentKind::sode_bounds: detail::run_sode_bounds(cfg, workers, s); break;
        case ExperimentKind::sode_asymptotic: detail::run_sode_asymptotic(cfg, workers, s); break;
        case ExperimentKind::spde_martingale: detail::run_spde_martingale(cfg, workers, s); break;
        case ExperimentKind::spde_converge: detail::run_spde_converge(cfg, workers, s); break;
        case ExperimentKind::blowup_scan: detail::run_blowup_scan(cfg, workers, s); break;
        case ExperimentKind::fourier_check: detail::run_fourier_check(cfg, workers, s); break;
        case ExperimentKind::lp_norms: detail::run_lp_norms(cfg, workers, s); break;
    }

    std::vector<CheckLine> outcome;
    for (const auto& c : s.checks) {
        if (!c.informational) outcome.push_back({c.name, 0, 0, 0, 0, c.verdict});
    }
    s.verdict = combine(outcome);
    s.runtime.workers = workers;
    s.runtime.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
}

}  // namespace spdelab
