#pragma once

#include <array>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "spdelab/lattice.hpp"
#include "spdelab/martingale_checks.hpp"
#include "spdelab/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spdelab {

enum class ExperimentKind {
    sode_asymptotic,
    sode_bounds,
    spde_martingale,
    spde_converge,
    blowup_scan,
    fourier_check,
    lp_norms,
};

std::string to_string(ExperimentKind kind);
/// Accepts the hyphenated names used on the command line ("sode-bounds", ...).
ExperimentKind kind_from_string(const std::string& name);
const std::vector<ExperimentKind>& all_kinds();

/// Initial condition recipe. For scalar experiments only `value` (or the
/// uniform range) is used.
struct U0Spec {
    std::string type = "constant";  ///< constant | spike | cosine | uniform | values
    double value = 1.0;             ///< constant level, cosine mean
    double mass = 1.0;              ///< spike mass
    int cell = 0;                   ///< spike cell
    double amplitude = 0.5;         ///< cosine amplitude
    int mode = 1;                   ///< cosine frequency
    double low = 0.5, high = 1.5;   ///< uniform range for random scalar starts
    std::vector<double> values;     ///< explicit field

    Field build(const GridSpec& grid, double trunc) const;
    bool operator==(const U0Spec&) const = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::spde_martingale;
    std::uint64_t seed = 1;
    std::size_t paths = 100;

    double gamma = 2.0;
    double trunc = 10.0;  ///< infinity runs untruncated
    int grid = 64;
    double dt = 1e-4;
    double horizon = 0.25;
    std::string scheme = "semi-implicit";  ///< euler | exact-bessel | explicit | semi-implicit
    U0Spec u0;
    double noise_scale = 1.0;
    double max_relative_noise = 0.1;  ///< euler step refinement, 0 for plain Euler
    std::size_t samples = 25;  ///< sampled intervals per SPDE path
    bool retain_fields = false;
    bool series = true;  ///< emit per-path rows for series.csv

    std::vector<double> alpha = {0.5};
    std::vector<double> p = {2.0};
    std::vector<double> levels = {2.0, 5.0, 10.0};
    double c_alpha = 1.0;

    std::size_t bins = 40;                                           // sode-asymptotic
    std::vector<std::array<double, 2>> trunc_pairs = {{4, 8}, {8, 16}};  // spde-converge
    std::vector<double> gammas = {1.2, 1.6, 2.0};                    // blowup-scan
    double threshold = 100.0;                                        // blowup-scan
    std::vector<double> dt_ladder = {4e-4, 2e-4, 1e-4};              // fourier-check
    std::vector<int> modes = {1};                                    // fourier-check
    std::array<int, 2> qv_modes = {1, -1};                           // fourier-check

    /// Throws ConfigError naming the first violated precondition.
    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

/// Defaults tuned per experiment kind.
ExperimentConfig default_config(ExperimentKind kind);

/// Overlays the keys of `j` onto `base`. Unknown keys and ill-typed values
/// throw ConfigError. Does not validate.
ExperimentConfig apply_json(ExperimentConfig base, const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
/// Reads a JSON config file; "kind" in the file must agree with `kind` when given.
ExperimentConfig load_config(const std::filesystem::path& file,
                             std::optional<ExperimentKind> kind = std::nullopt);

/// Statistics of one functional at one sampled time.
struct FunctionalStats {
    std::string name;
    double time = 0.0;
    SampleStats stats;
    bool operator==(const FunctionalStats&) const = default;
};

/// Small numeric table (trend tables, histograms).
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    bool operator==(const Table&) const = default;
};

/// Per-path functional rows destined for series.csv.
struct SeriesRows {
    std::vector<std::string> functionals;
    struct Row {
        std::uint64_t path_index = 0;
        std::uint32_t functional = 0;
        double time = 0.0;
        double value = 0.0;
        bool operator==(const Row&) const = default;
    };
    std::vector<Row> rows;

    std::uint32_t functional_id(const std::string& name);
    bool operator==(const SeriesRows&) const = default;
};

struct RunMetadata {
    double wall_seconds = 0.0;
    int workers = 1;
    bool operator==(const RunMetadata&) const = default;
};

struct EnsembleSummary {
    std::string kind;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    nlohmann::json config;    ///< canonical echo of the validated config
    std::string config_hash;  ///< FNV-1a 64 of the canonical echo
    std::vector<FunctionalStats> functionals;
    std::vector<CheckReport> checks;
    std::vector<Table> tables;
    std::size_t exploded = 0;
    std::vector<std::string> notes;
    Verdict verdict = Verdict::inconclusive;  ///< combined over non-informational checks

    SeriesRows series;    ///< persisted to series.csv
    RunMetadata runtime;  ///< persisted to runtime.json, excluded from summary.json

    bool operator==(const EnsembleSummary&) const = default;
};

/// Worker count from SPDE_LAB_WORKERS, else the OpenMP default.
int default_workers();

/// Runs fn(i) for i in [0, paths) and returns the results in path order.
/// workers <= 1 is the serial reference; otherwise paths are spread over an
/// OpenMP team. Exceptions are rethrown for the lowest failing index.
template <class R, class F>
std::vector<R> map_paths(std::size_t paths, int workers, F&& fn) {
    std::vector<R> out(paths);
    std::vector<std::exception_ptr> errors(paths);
    if (workers <= 1) {
        for (std::size_t i = 0; i < paths; ++i) out[i] = fn(i);
        return out;
    }
    const auto n = static_cast<long long>(paths);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (long long i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            out[idx] = fn(idx);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

/// Validates cfg and runs the ensemble. Path i is driven by
/// derive_stream(cfg.seed, i); the result does not depend on `workers`.
EnsembleSummary run_ensemble(const ExperimentConfig& cfg, int workers = default_workers());

/// Writes summary.json, series.csv, config.echo.json and runtime.json into
/// dir (created if needed). Throws IoError with the offending path.
void persist(const EnsembleSummary& summary, const std::filesystem::path& dir);

/// Inverse of persist.
EnsembleSummary load_summary(const std::filesystem::path& dir);

/// summary.json content exactly as persist writes it.
std::string summary_json_text(const EnsembleSummary& summary);

nlohmann::json to_json(const EnsembleSummary& summary);
EnsembleSummary summary_from_json(const nlohmann::json& j);

/// FNV-1a 64-bit digest, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace spdelab
