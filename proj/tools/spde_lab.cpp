// spde_lab: command-line front end over the ensemble harness.
//
// Exit status: 0 completed (pass or inconclusive), 1 a check failed or the
// run hit a numerical error, 2 configuration or I/O error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spdelab/errors.hpp"
#include "spdelab/harness.hpp"
#include "spdelab/svg_plot.hpp"

namespace {

using namespace spdelab;

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<int> workers;
    std::string out;
    bool retain_fields = false;
    std::optional<double> gamma;
    std::optional<std::string> trunc;
    std::optional<int> grid;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::vector<double> alpha;
    std::vector<double> p;
    std::optional<std::string> scheme;
    bool quiet = false;
};

struct PlotFlags {
    std::string input;
    std::string functional;
    std::string type = "line";
    std::string out;
    std::string table;
    std::string x_column;
    std::vector<std::string> y_columns;
    std::size_t bins = 40;
    std::size_t max_paths = 10;
};

double parse_level(const std::string& s) {
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("--trunc expects a number or 'inf', got '" + s + "'");
    return v;
}

ExperimentConfig build_config(ExperimentKind kind, const RunFlags& f) {
    ExperimentConfig cfg = f.config.empty() ? default_config(kind) : load_config(f.config, kind);
    if (f.seed) cfg.seed = *f.seed;
    if (f.paths) cfg.paths = *f.paths;
    if (f.retain_fields) cfg.retain_fields = true;
    if (f.gamma) cfg.gamma = *f.gamma;
    if (f.trunc) cfg.trunc = parse_level(*f.trunc);
    if (f.grid) cfg.grid = *f.grid;
    if (f.dt) {
        cfg.dt = *f.dt;
        if (kind == ExperimentKind::fourier_check) cfg.dt_ladder = {4.0 * *f.dt, 2.0 * *f.dt, *f.dt};
    }
    if (f.horizon) cfg.horizon = *f.horizon;
    if (!f.alpha.empty()) cfg.alpha = f.alpha;
    if (!f.p.empty()) cfg.p = f.p;
    if (f.scheme) cfg.scheme = *f.scheme;
    cfg.validate();
    return cfg;
}

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void render(const EnsembleSummary& s, std::ostream& os) {
    os << s.kind << "  seed=" << s.seed << "  paths=" << s.paths << "  config=" << s.config_hash << "\n";
    if (s.exploded > 0) os << "flagged paths: " << s.exploded << "\n";
    for (const auto& t : s.tables) {
        os << "\n[" << t.name << "]\n";
        for (std::size_t c = 0; c < t.columns.size(); ++c) os << "  " << t.columns[c];
        os << "\n";
        const std::size_t shown = std::min<std::size_t>(t.rows.size(), 12);
        for (std::size_t r = 0; r < shown; ++r) {
            for (std::size_t c = 0; c < t.rows[r].size(); ++c) os << "  " << g(t.rows[r][c]);
            os << "\n";
        }
        if (shown < t.rows.size()) os << "  ... " << t.rows.size() - shown << " more rows in summary.json\n";
    }
    os << "\n";
    for (const auto& c : s.checks) {
        os << (c.informational ? "(info) " : "") << c.name << ": " << to_string(c.verdict);
        if (!c.note.empty()) os << "  [" << c.note << "]";
        os << "\n";
        for (const auto& l : c.lines) {
            os << "    " << l.label << ": " << g(l.empirical) << " +- " << g(l.stderr_of_estimate) << "  bounds ["
               << g(l.lower) << ", " << g(l.upper) << "]  " << to_string(l.verdict) << "\n";
        }
    }
    for (const auto& n : s.notes) os << "note: " << n << "\n";
    os << "verdict: " << to_string(s.verdict) << "\n";
}

int run_experiment(ExperimentKind kind, const RunFlags& f) {
    const ExperimentConfig cfg = build_config(kind, f);
    const int workers = f.workers ? *f.workers : default_workers();
    if (workers < 1) throw ConfigError("--workers must be at least 1");
    const EnsembleSummary s = run_ensemble(cfg, workers);
    const std::string out = f.out.empty() ? "results/" + to_string(kind) : f.out;
    persist(s, out);
    if (!f.quiet) render(s, std::cout);
    std::cerr << "wrote " << out << " (" << g(s.runtime.wall_seconds) << " s, " << s.runtime.workers
              << " workers)\n";
    return s.verdict == Verdict::fail ? 1 : 0;
}

struct CsvSeries {
    std::map<std::uint64_t, std::vector<std::pair<double, double>>> by_path;
};

CsvSeries read_series(const std::string& file, const std::string& functional) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    std::string line;
    if (!std::getline(in, line) || line != "path_index,functional,time,value") {
        throw IoError(file + ": not a series.csv file");
    }
    CsvSeries out;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string a, b, c, d;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
            !std::getline(ss, d)) {
            continue;
        }
        if (b != functional) continue;
        out.by_path[std::stoull(a)].push_back({std::stod(c), std::stod(d)});
    }
    return out;
}

int run_plot(const PlotFlags& f) {
    namespace fs = std::filesystem;
    const fs::path input = f.input;
    const fs::path dir = fs::is_directory(input) ? input : input.parent_path();
    std::string svg;
    std::string stem;

    if (!f.table.empty()) {
        const EnsembleSummary s = load_summary(dir);
        const Table* t = nullptr;
        for (const auto& tab : s.tables) {
            if (tab.name == f.table) t = &tab;
        }
        if (!t) throw ConfigError("summary has no table '" + f.table + "'");
        auto column = [&](const std::string& name) -> std::size_t {
            for (std::size_t i = 0; i < t->columns.size(); ++i) {
                if (t->columns[i] == name) return i;
            }
            throw ConfigError("table '" + f.table + "' has no column '" + name + "'");
        };
        const std::size_t xc = column(f.x_column.empty() ? t->columns.front() : f.x_column);
        std::vector<std::string> ys = f.y_columns;
        if (ys.empty()) ys.push_back(t->columns.at(std::min<std::size_t>(1, t->columns.size() - 1)));
        std::vector<PlotSeries> series;
        for (const auto& y : ys) {
            const std::size_t yc = column(y);
            PlotSeries ps{y, {}, {}};
            for (const auto& row : t->rows) {
                ps.x.push_back(row[xc]);
                ps.y.push_back(row[yc]);
            }
            series.push_back(std::move(ps));
        }
        svg = line_plot_svg(series, {s.kind + ": " + f.table, t->columns[xc], ys.front()});
        stem = f.table;
    } else {
        if (f.functional.empty()) throw ConfigError("plot needs --functional or --table");
        const fs::path csv = fs::is_directory(input) ? input / "series.csv" : input;
        const CsvSeries data = read_series(csv.string(), f.functional);
        if (data.by_path.empty()) throw ConfigError("no rows for functional '" + f.functional + "'");
        if (f.type == "line") {
            std::vector<PlotSeries> series;
            std::map<double, std::pair<double, std::size_t>> mean;
            for (const auto& [path, pts] : data.by_path) {
                for (const auto& [t, v] : pts) {
                    if (std::isfinite(v)) {
                        mean[t].first += v;
                        mean[t].second += 1;
                    }
                }
                if (series.size() < f.max_paths) {
                    PlotSeries ps{"path " + std::to_string(path), {}, {}};
                    for (const auto& [t, v] : pts) {
                        ps.x.push_back(t);
                        ps.y.push_back(v);
                    }
                    series.push_back(std::move(ps));
                }
            }
            PlotSeries avg{"ensemble mean", {}, {}};
            for (const auto& [t, acc] : mean) {
                avg.x.push_back(t);
                avg.y.push_back(acc.first / static_cast<double>(acc.second));
            }
            series.insert(series.begin(), std::move(avg));
            svg = line_plot_svg(series, {f.functional, "t", f.functional});
        } else if (f.type == "hist") {
            std::vector<double> terminal;
            for (const auto& [path, pts] : data.by_path) terminal.push_back(pts.back().second);
            std::vector<PlotSeries> overlays;
            if (fs::exists(dir / "summary.json") && fs::exists(dir / "runtime.json")) {
                const EnsembleSummary s = load_summary(dir);
                for (const auto& tab : s.tables) {
                    if (tab.name != "histogram" || tab.columns.size() < 4) continue;
                    for (std::size_t c = 3; c < tab.columns.size(); ++c) {
                        PlotSeries ps{tab.columns[c], {}, {}};
                        for (const auto& row : tab.rows) {
                            ps.x.push_back(0.5 * (row[0] + row[1]));
                            ps.y.push_back(row[c]);
                        }
                        overlays.push_back(std::move(ps));
                    }
                }
            }
            svg = histogram_svg(terminal, f.bins, {f.functional + " (last value per path)", f.functional, "density"},
                                overlays);
        } else {
            throw ConfigError("--type must be 'line' or 'hist'");
        }
        stem = f.functional + "_" + f.type;
    }

    const fs::path out = f.out.empty() ? dir / (stem + ".svg") : fs::path(f.out);
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + out.string() + " for writing");
    os << svg;
    if (!os) throw IoError("write failed for " + out.string());
    std::cerr << "wrote " << out.string() << "\n";
    return 0;
}

void add_run_flags(CLI::App* sub, RunFlags& f) {
    sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "master seed (overrides the config)");
    sub->add_option("--paths", f.paths, "number of ensemble paths");
    sub->add_option("--workers", f.workers, "worker threads (default: SPDE_LAB_WORKERS or all cores)");
    sub->add_option("--out", f.out, "output directory (default: results/<subcommand>)");
    sub->add_flag("--retain-fields", f.retain_fields, "keep field snapshots and per-step diagnostics");
    sub->add_option("--gamma", f.gamma, "noise exponent gamma > 1");
    sub->add_option("--trunc", f.trunc, "truncation level n or 'inf'");
    sub->add_option("--grid", f.grid, "lattice cells m");
    sub->add_option("--dt", f.dt, "time step (fourier-check: finest ladder step)");
    sub->add_option("--horizon", f.horizon, "time horizon T");
    sub->add_option("--alpha", f.alpha, "moment exponent(s), comma separated")->delimiter(',');
    sub->add_option("--p", f.p, "norm order(s), comma separated")->delimiter(',');
    sub->add_option("--scheme", f.scheme, "euler | exact-bessel | explicit | semi-implicit");
    sub->add_flag("--quiet", f.quiet, "suppress the report on stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo laboratory for the stochastic heat equation with power-law noise"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    std::map<std::string, RunFlags> flags;
    std::map<std::string, CLI::App*> subs;
    const std::map<std::string, std::string> descriptions = {
        {"sode-asymptotic", "rescaled terminal statistic against the limiting densities (KS)"},
        {"sode-bounds", "hitting-probability and sup-moment bounds for the scalar equation"},
        {"spde-martingale", "total-mass drift test and quadratic-variation checks"},
        {"spde-converge", "coupled truncation pairs and the d_{2gamma,alpha} ladder"},
        {"blowup-scan", "exceedance of sup_x u across a gamma grid (untruncated)"},
        {"fourier-check", "Fourier-coefficient drift residuals and covariation relation"},
        {"lp-norms", "time-integrated L^{2p} norm moments"},
    };
    for (ExperimentKind k : all_kinds()) {
        const std::string name = to_string(k);
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        add_run_flags(sub, flags[name]);
        subs[name] = sub;
    }
    PlotFlags plot;
    CLI::App* plot_cmd = app.add_subcommand("plot", "render series.csv or a summary table to SVG");
    plot_cmd->add_option("--input", plot.input, "run directory or series.csv")->required();
    plot_cmd->add_option("--functional", plot.functional, "functional name in series.csv");
    plot_cmd->add_option("--type", plot.type, "line | hist");
    plot_cmd->add_option("--table", plot.table, "plot columns of a summary table instead");
    plot_cmd->add_option("--x", plot.x_column, "table column for the x axis");
    plot_cmd->add_option("--y", plot.y_columns, "table column(s) for the y axis")->delimiter(',');
    plot_cmd->add_option("--bins", plot.bins, "histogram bins");
    plot_cmd->add_option("--max-paths", plot.max_paths, "paths drawn in line plots");
    plot_cmd->add_option("--out", plot.out, "output SVG file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (plot_cmd->parsed()) return run_plot(plot);
        for (const auto& [name, sub] : subs) {
            if (sub->parsed()) return run_experiment(kind_from_string(name), flags[name]);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
