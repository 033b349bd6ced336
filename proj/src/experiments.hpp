#pragma once

#include <span>
#include <string>
#include <vector>

#include "spdelab/harness.hpp"

namespace spdelab::detail {

void run_sode_bounds(const ExperimentConfig& cfg, int workers, EnsembleSummary& out);
void run_sode_asymptotic(const ExperimentConfig& cfg, int workers, EnsembleSummary& out);
void run_spde_martingale(const ExperimentConfig& cfg, int workers, EnsembleSummary& out);
void run_spde_converge(const ExperimentConfig& cfg, int workers, EnsembleSummary& out);
void run_blowup_scan(const ExperimentConfig& cfg, int workers, EnsembleSummary& out);
void run_fourier_check(const ExperimentConfig& cfg, int workers, EnsembleSummary& out);
void run_lp_norms(const ExperimentConfig& cfg, int workers, EnsembleSummary& out);

/// Functional series of one path; values[f][j] belongs to times[j].
struct PathSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> values;
};

/// Statistics at every sampled index over the paths that reached it, plus
/// series rows when enabled. Paths are visited in index order.
void add_series(EnsembleSummary& out, const std::vector<std::string>& names,
                const std::vector<PathSeries>& paths, bool rows);

/// Statistics of one scalar per path at a single time, plus series rows.
void add_scalar(EnsembleSummary& out, const std::string& name, double time,
                std::span<const double> per_path, bool rows);

}  // namespace spdelab::detail
