#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

#include "spdelab/errors.hpp"
#include "spdelab/fourier.hpp"
#include "spdelab/functionals.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/sode.hpp"
#include "spdelab/spde.hpp"

namespace spdelab::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

SodeConfig sode_config(const ExperimentConfig& c, double u0) {
    SodeConfig s;
    s.gamma = c.gamma;
    s.u0 = u0;
    s.dt = c.dt;
    s.horizon = c.horizon;
    s.scheme = c.scheme == "euler" ? SodeScheme::euler : SodeScheme::exact_bessel;
    s.noise_scale = c.noise_scale;
    s.max_relative_noise = c.max_relative_noise;
    return s;
}

SpdeConfig spde_config(const ExperimentConfig& c, double gamma, double trunc, double dt) {
    SpdeConfig s;
    s.gamma = gamma;
    s.trunc = trunc;
    s.grid = GridSpec::make(c.grid);
    s.dt = dt;
    s.horizon = c.horizon;
    s.scheme = c.scheme == "explicit" ? SpdeScheme::explicit_euler : SpdeScheme::semi_implicit;
    s.u0 = c.u0.build(s.grid, kNoTruncation);
    s.noise_scale = c.noise_scale;
    s.sample_every = std::max<std::size_t>(1, s.steps() / c.samples);
    s.retain_fields = c.retain_fields;
    return s;
}

// Standard error of mean(a) / mean(b) by the delta method.
double ratio_stderr(std::span<const double> a, std::span<const double> b) {
    const SampleStats sa = describe(a);
    const SampleStats sb = describe(b);
    const std::size_t n = a.size();
    if (n < 2 || sb.mean == 0.0) return 0.0;
    const double r = sa.mean / sb.mean;
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) cov += (a[i] - sa.mean) * (b[i] - sb.mean);
    cov /= static_cast<double>(n - 1);
    const double var = (sa.variance + r * r * sb.variance - 2.0 * r * cov) /
                       (sb.mean * sb.mean * static_cast<double>(n));
    return std::sqrt(std::max(var, 0.0));
}

CheckLine strict_less(const std::string& label, double value, double se, double bound) {
    return {label, value, se, -kInf, bound, value < bound ? Verdict::pass : Verdict::fail};
}

std::size_t count_flagged(const std::vector<char>& flags) {
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
}

PathSeries spde_series(const Trajectory& t, bool with_fields) {
    PathSeries s;
    s.times = t.times;
    s.values = {t.mass, t.qv, t.realized_qv, t.sup, t.clipped};
    for (const auto& series : t.lp) s.values.push_back(series);
    if (with_fields) {
        const std::size_t m = t.initial.size();
        for (std::size_t x = 0; x < m; ++x) {
            std::vector<double> column;
            column.reserve(t.fields.size());
            for (const auto& f : t.fields) column.push_back(f[x]);
            s.values.push_back(std::move(column));
        }
    }
    return s;
}

std::vector<std::string> spde_series_names(const std::vector<double>& lp_orders, int grid,
                                           bool with_fields) {
    std::vector<std::string> names = {"mass", "qv", "realized_qv", "sup", "clipped"};
    for (double p : lp_orders) names.push_back("L" + num(p));
    if (with_fields) {
        for (int x = 0; x < grid; ++x) names.push_back("u[" + std::to_string(x) + "]");
    }
    return names;
}

}  // namespace

void add_series(EnsembleSummary& out, const std::vector<std::string>& names,
                const std::vector<PathSeries>& paths, bool rows) {
    std::size_t longest = 0;
    const PathSeries* reference = nullptr;
    for (const auto& p : paths) {
        if (p.times.size() > longest) {
            longest = p.times.size();
            reference = &p;
        }
    }
    std::vector<double> column;
    for (std::size_t f = 0; f < names.size(); ++f) {
        for (std::size_t j = 0; j < longest; ++j) {
            column.clear();
            for (const auto& p : paths) {
                if (j < p.times.size() && !std::isnan(p.values[f][j])) column.push_back(p.values[f][j]);
            }
            out.functionals.push_back({names[f], reference->times[j], describe(column)});
        }
    }
    if (!rows) return;
    std::vector<std::uint32_t> ids;
    for (const auto& n : names) ids.push_back(out.series.functional_id(n));
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        for (std::size_t f = 0; f < names.size(); ++f) {
            for (std::size_t j = 0; j < p.times.size(); ++j) {
                out.series.rows.push_back({i, ids[f], p.times[j], p.values[f][j]});
            }
        }
    }
}

void add_scalar(EnsembleSummary& out, const std::string& name, double time,
                std::span<const double> per_path, bool rows) {
    std::vector<double> kept;
    for (double v : per_path) {
        if (!std::isnan(v)) kept.push_back(v);
    }
    out.functionals.push_back({name, time, describe(kept)});
    if (!rows) return;
    const std::uint32_t id = out.series.functional_id(name);
    for (std::size_t i = 0; i < per_path.size(); ++i) {
        if (!std::isnan(per_path[i])) out.series.rows.push_back({i, id, time, per_path[i]});
    }
}

void run_sode_bounds(const ExperimentConfig& cfg, int workers, EnsembleSummary& out) {
    struct Outcome {
        double x0 = 0, sup = 0, terminal = 0, qv = 0;
        char absorbed = 0, exploded = 0;
    };
    const bool random_start = cfg.u0.type == "uniform";
    const auto results = map_paths<Outcome>(cfg.paths, workers, [&](std::size_t i) {
        const NoiseStream stream = derive_stream(cfg.seed, i);
        double x0 = cfg.u0.value;
        if (random_start) {
            AuxDraws draws(stream, 1);
            x0 = cfg.u0.low + (cfg.u0.high - cfg.u0.low) * draws.uniform();
        }
        const SodePath path = simulate_euler(sode_config(cfg, x0), stream);
        Outcome o;
        o.x0 = x0;
        o.sup = path.exploded ? kInf : path.running_max;
        o.terminal = path.terminal;
        o.qv = path.quadratic_variation;
        o.absorbed = path.absorbed;
        o.exploded = path.exploded;
        return o;
    });

    const std::size_t n = results.size();
    std::vector<double> x0(n), sup(n), terminal(n), qv(n);
    std::vector<char> exploded(n);
    std::size_t absorbed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x0[i] = results[i].x0;
        sup[i] = results[i].sup;
        terminal[i] = results[i].terminal;
        qv[i] = results[i].qv;
        exploded[i] = results[i].exploded;
        absorbed += results[i].absorbed ? 1 : 0;
    }
    out.exploded = count_flagged(exploded);

    const double T = cfg.horizon;
    if (random_start) add_scalar(out, "u0", 0.0, x0, cfg.series);
    add_scalar(out, "sup", T, sup, cfg.series);
    add_scalar(out, "terminal", T, terminal, cfg.series);
    add_scalar(out, "qv", T, qv, cfg.series);

    const double x_ref = random_start ? describe(x0).mean : cfg.u0.value;
    if (!cfg.levels.empty()) {
        CheckReport hit = check_hitting_bound(sup, x_ref, cfg.levels);
        if (random_start) {
            hit.note = "random start: bound uses E[u0]/level, valid for levels above the start range";
        }
        Table t{"hitting", {"level", "fraction", "stderr", "bound"}, {}};
        for (std::size_t k = 0; k < hit.lines.size(); ++k) {
            const auto& line = hit.lines[k];
            t.rows.push_back({cfg.levels[k], line.empirical, line.stderr_of_estimate, line.upper});
        }
        out.tables.push_back(std::move(t));
        out.checks.push_back(std::move(hit));
    }
    for (double a : cfg.alpha) {
        CheckReport r = random_start ? check_sup_moment_random_start(sup, x0, a)
                                     : check_sup_moment(sup, cfg.u0.value, a);
        r.name += "_alpha_" + num(a);
        out.checks.push_back(std::move(r));
    }
    for (double a : cfg.alpha) {
        CheckReport r = check_qv_moment(qv, x0, a, cfg.c_alpha, true);
        r.name += "_alpha_" + num(a);
        out.checks.push_back(std::move(r));
    }
    out.notes.push_back("absorbed paths: " + std::to_string(absorbed));
    out.notes.push_back("sup is taken over [0, " + num(T) + "]; the horizon cut only lowers it");
}

void run_sode_asymptotic(const ExperimentConfig& cfg, int workers, EnsembleSummary& out) {
    const SodeConfig base = sode_config(cfg, cfg.u0.value);
    const double T = cfg.horizon;
    const auto terminal = map_paths<double>(cfg.paths, workers, [&](std::size_t i) {
        const NoiseStream stream = derive_stream(cfg.seed, i);
        if (base.scheme == SodeScheme::exact_bessel) return simulate_exact_bessel(base, stream, T);
        const SodePath p = simulate_euler(base, stream);
        return p.exploded ? kNaN : p.terminal;
    });

    std::vector<double> y(terminal.size(), kNaN);
    std::vector<double> kept;
    std::size_t absorbed = 0;
    std::vector<char> exploded(terminal.size(), 0);
    for (std::size_t i = 0; i < terminal.size(); ++i) {
        if (std::isnan(terminal[i])) {
            exploded[i] = 1;
        } else if (terminal[i] <= 0.0) {
            ++absorbed;
        } else {
            y[i] = rescaled_statistic(terminal[i], cfg.gamma, T);
            kept.push_back(y[i]);
        }
    }
    out.exploded = count_flagged(exploded);
    add_scalar(out, "u_T", T, terminal, cfg.series);
    add_scalar(out, "rescaled", T, y, cfg.series);
    if (absorbed > 0) out.notes.push_back("absorbed paths excluded: " + std::to_string(absorbed));

    if (kept.empty()) {
        out.checks.push_back({"ks_chi_square", {}, Verdict::inconclusive, 0, false, "no positive terminal values"});
        return;
    }
    const double crit = ks_critical_1pct(kept.size());
    const double d_chi = ks_one_sample(kept, [&](double v) {
        return asymptotic_cdf(cfg.gamma, v, DensityVariant::chi_square);
    });
    CheckReport chi{"ks_chi_square", {}, Verdict::inconclusive, kept.size(), false, ""};
    chi.lines.push_back({"KS vs chi-square(" + num(bessel_dimension(cfg.gamma)) + ")", d_chi, 0.0, 0.0,
                         crit, d_chi < crit ? Verdict::pass : Verdict::fail});
    chi.verdict = chi.lines.front().verdict;
    out.checks.push_back(chi);

    CheckReport lit{"ks_paper_literal", {}, Verdict::inconclusive, kept.size(), true, ""};
    const double mass = literal_density_mass(cfg.gamma);
    double d_lit = kNaN;
    if (std::isfinite(mass)) {
        d_lit = ks_one_sample(kept, [&](double v) {
            return asymptotic_cdf(cfg.gamma, v, DensityVariant::paper_literal);
        });
        lit.lines.push_back({"KS vs printed density (renormalized)", d_lit, 0.0, 0.0, crit,
                             d_lit < crit ? Verdict::pass : Verdict::fail});
        lit.verdict = lit.lines.front().verdict;
        lit.note = "printed normalization integrates to " + num(mass);
    } else {
        lit.note = "printed density is not integrable for gamma <= 1.5";
    }
    out.checks.push_back(lit);
    out.tables.push_back({"ks", {"variant", "statistic", "critical_1pct"},
                          {{0.0, d_chi, crit}, {1.0, d_lit, crit}}});

    const double hi = quantile(kept, 0.995);
    const std::size_t bins = cfg.bins;
    const double width = hi / static_cast<double>(bins);
    std::vector<double> counts(bins, 0.0);
    for (double v : kept) {
        if (v < hi) counts[std::min(bins - 1, static_cast<std::size_t>(v / width))] += 1.0;
    }
    Table hist{"histogram", {"y_lo", "y_hi", "empirical_density", "chi_square_pdf", "literal_pdf"}, {}};
    for (std::size_t b = 0; b < bins; ++b) {
        const double lo = width * static_cast<double>(b);
        const double mid = lo + 0.5 * width;
        const double lit_pdf = std::isfinite(mass)
                                   ? asymptotic_pdf(cfg.gamma, mid, DensityVariant::paper_literal) / mass
                                   : kNaN;
        hist.rows.push_back({lo, lo + width, counts[b] / (static_cast<double>(kept.size()) * width),
                             asymptotic_pdf(cfg.gamma, mid, DensityVariant::chi_square), lit_pdf});
    }
    out.tables.push_back(std::move(hist));
}

void run_spde_martingale(const ExperimentConfig& cfg, int workers, EnsembleSummary& out) {
    SpdeConfig sc = spde_config(cfg, cfg.gamma, cfg.trunc, cfg.dt);
    sc.lp_orders = cfg.p;
    sc.retain_steps = cfg.retain_fields;
    struct Outcome {
        PathSeries series;
        double u0 = 0, uT = 0, qv = 0, realized = 0, clipped = 0, mass_dev = 0, mild = kNaN;
        char flagged = 0;
    };
    const auto results = map_paths<Outcome>(cfg.paths, workers, [&](std::size_t i) {
        const Trajectory t = simulate_truncated(sc, derive_stream(cfg.seed, i));
        Outcome o;
        o.series = spde_series(t, cfg.retain_fields);
        o.u0 = t.mass.front();
        o.uT = t.mass.back();
        o.qv = t.qv.back();
        o.realized = t.realized_qv.back();
        o.clipped = t.clipped.back();
        for (double m : t.mass) o.mass_dev = std::max(o.mass_dev, std::fabs(m - o.u0));
        o.flagged = t.flagged_step.has_value();
        if (cfg.retain_fields && !o.flagged) o.mild = mild_residual(t, sc, sc.horizon);
        return o;
    });

    std::vector<PathSeries> series;
    std::vector<double> u0, uT, qv, realized, clipped, mild;
    std::vector<char> flags;
    double mass_dev = 0.0;
    for (const auto& o : results) {
        flags.push_back(o.flagged);
        mass_dev = std::max(mass_dev, o.mass_dev);
        clipped.push_back(o.clipped);
        mild.push_back(o.mild);
        if (o.flagged) continue;
        u0.push_back(o.u0);
        uT.push_back(o.uT);
        qv.push_back(o.qv);
        realized.push_back(o.realized);
    }
    for (const auto& o : results) series.push_back(o.series);
    out.exploded = count_flagged(flags);
    add_series(out, spde_series_names(cfg.p, cfg.grid, cfg.retain_fields), series, cfg.series);
    const double T = sc.horizon;
    for (double a : cfg.alpha) {
        std::vector<double> pw(qv.size());
        std::transform(qv.begin(), qv.end(), pw.begin(), [&](double q) { return std::pow(q, 0.5 * a); });
        add_scalar(out, "qv_pow_" + num(0.5 * a), T, pw, false);
    }
    if (cfg.retain_fields) add_scalar(out, "mild_residual", T, mild, false);

    if (uT.empty()) {
        out.notes.push_back("every path was flagged; no checks run");
        return;
    }
    out.checks.push_back(drift_test(uT, u0));

    CheckReport qc{"qv_consistency", {}, Verdict::inconclusive, qv.size(), false, ""};
    const double mean_qv = describe(qv).mean;
    if (mean_qv > 0.0) {
        const double ratio = describe(realized).mean / mean_qv;
        const bool ok = std::fabs(ratio - 1.0) <= 0.05;
        qc.lines.push_back({"mean realized QV / mean accumulated QV", ratio,
                            ratio_stderr(realized, qv), 0.95, 1.05, ok ? Verdict::pass : Verdict::fail});
        qc.verdict = qc.lines.front().verdict;
    } else {
        qc.note = "accumulated QV is zero";
    }
    out.checks.push_back(qc);

    for (double a : cfg.alpha) {
        CheckReport r = check_qv_moment(qv, u0, a, cfg.c_alpha, true);
        r.name += "_alpha_" + num(a);
        out.checks.push_back(std::move(r));
    }
    if (cfg.noise_scale == 0.0) {
        const double tol = 1e-10 * std::max(1.0, describe(u0).max);
        out.checks.push_back({"mass_conservation",
                              {{"max |U(t) - U(0)|", mass_dev, 0.0, 0.0, tol,
                                mass_dev <= tol ? Verdict::pass : Verdict::fail}},
                              mass_dev <= tol ? Verdict::pass : Verdict::fail, uT.size(), false, ""});
    }
    out.notes.push_back("mean clipped mass per path: " + num(describe(clipped).mean));
}

void run_spde_converge(const ExperimentConfig& cfg, int workers, EnsembleSummary& out) {
    const double order = 2.0 * cfg.gamma;
    const std::vector<double> orders = {order};
    struct PairOutcome {
        double integral = 0.0;
        char decoupled = 0, violated = 0, flagged = 0;
    };
    Table t{"dpalpha", {"n1", "n2", "alpha", "estimate", "stderr", "decoupled_fraction", "violations"}, {}};
    std::vector<std::vector<double>> estimates(cfg.alpha.size());
    std::vector<std::vector<double>> errors(cfg.alpha.size());
    std::size_t violations = 0;
    std::size_t flagged = 0;
    for (const auto& pr : cfg.trunc_pairs) {
        const SpdeConfig sc = spde_config(cfg, cfg.gamma, pr[1], cfg.dt);
        const auto res = map_paths<PairOutcome>(cfg.paths, workers, [&](std::size_t i) {
            const CoupledPair cp = simulate_coupled_pair(sc, pr[0], pr[1], derive_stream(cfg.seed, i), orders);
            PairOutcome o;
            o.integral = cp.distance_integrals.front();
            o.decoupled = cp.decoupling_time.has_value();
            o.violated = cp.coupling_violated;
            o.flagged = cp.first.flagged_step.has_value() || cp.second.flagged_step.has_value();
            return o;
        });
        std::vector<double> integrals;
        std::size_t decoupled = 0, viol = 0;
        for (const auto& o : res) {
            integrals.push_back(o.integral);
            decoupled += o.decoupled ? 1 : 0;
            viol += o.violated ? 1 : 0;
            flagged += o.flagged ? 1 : 0;
        }
        violations += viol;
        add_scalar(out, "distance_integral_" + num(pr[0]) + "_" + num(pr[1]), cfg.horizon, integrals,
                   cfg.series);
        for (std::size_t a = 0; a < cfg.alpha.size(); ++a) {
            const double alpha = cfg.alpha[a];
            std::vector<double> powered(integrals.size());
            std::transform(integrals.begin(), integrals.end(), powered.begin(),
                           [&](double v) { return std::pow(v, 0.5 * alpha); });
            const SampleStats st = describe(powered);
            const double d = dpalpha_from_integrals(integrals, order, alpha);
            const double se = st.mean > 0.0 ? std::pow(st.mean, 1.0 / order - 1.0) * st.stderr_of_mean / order : 0.0;
            estimates[a].push_back(d);
            errors[a].push_back(se);
            t.rows.push_back({pr[0], pr[1], alpha, d, se,
                              static_cast<double>(decoupled) / static_cast<double>(res.size()),
                              static_cast<double>(viol)});
        }
    }
    out.exploded = flagged;
    out.tables.push_back(t);

    if (cfg.trunc_pairs.size() >= 2) {
        for (std::size_t a = 0; a < cfg.alpha.size(); ++a) {
            CheckReport r{"convergence_trend_alpha_" + num(cfg.alpha[a]), {}, Verdict::inconclusive,
                          cfg.paths, false, ""};
            for (std::size_t k = 1; k < cfg.trunc_pairs.size(); ++k) {
                const auto& pr = cfg.trunc_pairs[k];
                const auto& prev = cfg.trunc_pairs[k - 1];
                r.lines.push_back(strict_less("d(" + num(pr[0]) + "," + num(pr[1]) + ") < d(" +
                                                  num(prev[0]) + "," + num(prev[1]) + ")",
                                              estimates[a][k], errors[a][k], estimates[a][k - 1]));
            }
            r.verdict = combine(r.lines);
            out.checks.push_back(std::move(r));
        }
    }
    const Verdict cv = violations == 0 ? Verdict::pass : Verdict::fail;
    out.checks.push_back({"coupling_invariant",
                          {{"pairs differing before the first visit to n1", static_cast<double>(violations),
                            0.0, 0.0, 0.0, cv}},
                          cv, cfg.paths * cfg.trunc_pairs.size(), false, ""});
}

void run_blowup_scan(const ExperimentConfig& cfg, int workers, EnsembleSummary& out) {
    struct Outcome {
        double max_sup = 0.0;
        char exploded = 0;
    };
    Table t{"exceedance", {"gamma", "fraction", "stderr", "exploded", "median_max_sup"}, {}};
    std::vector<double> fractions;
    std::size_t exploded_total = 0;
    for (double g : cfg.gammas) {
        const SpdeConfig sc = spde_config(cfg, g, cfg.trunc, cfg.dt);
        const auto res = map_paths<Outcome>(cfg.paths, workers, [&](std::size_t i) {
            const Trajectory tr = simulate_truncated(sc, derive_stream(cfg.seed, i));
            return Outcome{tr.exploded ? kInf : tr.max_sup, static_cast<char>(tr.exploded)};
        });
        std::vector<double> sups;
        std::size_t above = 0, exploded = 0;
        for (const auto& o : res) {
            sups.push_back(o.max_sup);
            above += o.max_sup > cfg.threshold ? 1 : 0;
            exploded += o.exploded ? 1 : 0;
        }
        exploded_total += exploded;
        const double n = static_cast<double>(res.size());
        const double frac = static_cast<double>(above) / n;
        fractions.push_back(frac);
        t.rows.push_back({g, frac, std::sqrt(frac * (1.0 - frac) / n), static_cast<double>(exploded),
                          quantile(sups, 0.5)});
        add_scalar(out, "max_sup_gamma_" + num(g), cfg.horizon, sups, cfg.series);
    }
    out.exploded = exploded_total;
    out.tables.push_back(t);

    CheckReport r{"blowup_trend", {}, Verdict::inconclusive, cfg.paths, false, ""};
    for (std::size_t k = 1; k < fractions.size(); ++k) {
        const bool ok = fractions[k] >= fractions[k - 1];
        r.lines.push_back({"fraction(gamma=" + num(cfg.gammas[k]) + ") >= fraction(gamma=" +
                               num(cfg.gammas[k - 1]) + ")",
                           fractions[k], 0.0, fractions[k - 1], kInf, ok ? Verdict::pass : Verdict::fail});
    }
    const bool positive = fractions.back() > 0.0;
    r.lines.push_back({"fraction(gamma=" + num(cfg.gammas.back()) + ") > 0", fractions.back(), 0.0, 0.0, kInf,
                       positive ? Verdict::pass : Verdict::fail});
    r.verdict = combine(r.lines);
    r.note = "exceedance of sup_x u above " + num(cfg.threshold) + "; exploded paths count as exceeding";
    out.checks.push_back(std::move(r));
}

void run_fourier_check(const ExperimentConfig& cfg, int workers, EnsembleSummary& out) {
    struct Outcome {
        std::vector<Complex> two_pi, literal;
        QvRelationSample qv;
        char flagged = 0;
    };
    const std::size_t levels = cfg.dt_ladder.size();
    Table drift{"drift_residual",
                {"dt", "mode", "convention", "mean_re", "stderr_re", "mean_im", "stderr_im"}, {}};
    Table qvt{"qv_relation",
              {"dt", "mean_re", "stderr_re", "mean_im", "stderr_im", "relative_error", "mean_predicted_re"}, {}};
    std::vector<double> rel_errors;
    std::vector<Outcome> finest;
    std::size_t flagged = 0;
    for (std::size_t level = 0; level < levels; ++level) {
        SpdeConfig sc = spde_config(cfg, cfg.gamma, cfg.trunc, cfg.dt_ladder[level]);
        sc.sample_every = 1;
        sc.retain_fields = true;
        sc.retain_steps = true;
        auto res = map_paths<Outcome>(cfg.paths, workers, [&](std::size_t i) {
            const Trajectory t = simulate_truncated(sc, derive_stream(cfg.seed, i));
            Outcome o;
            o.flagged = t.flagged_step.has_value();
            if (o.flagged) return o;
            for (int n : cfg.modes) {
                o.two_pi.push_back(coefficient_drift_residual(t, n, EigenConvention::two_pi, sc.grid).values.back());
                o.literal.push_back(
                    coefficient_drift_residual(t, n, EigenConvention::paper_literal, sc.grid).values.back());
            }
            o.qv = qv_relation_sample(t, sc, cfg.qv_modes[0], cfg.qv_modes[1]);
            return o;
        });
        std::vector<QvRelationSample> qs;
        for (const auto& o : res) {
            flagged += o.flagged ? 1 : 0;
            if (!o.flagged) qs.push_back(o.qv);
        }
        for (std::size_t k = 0; k < cfg.modes.size(); ++k) {
            for (int conv = 0; conv < 2; ++conv) {
                std::vector<double> re, im;
                for (const auto& o : res) {
                    if (o.flagged) continue;
                    const Complex z = conv == 0 ? o.two_pi[k] : o.literal[k];
                    re.push_back(z.real());
                    im.push_back(z.imag());
                }
                const SampleStats sr = describe(re), si = describe(im);
                drift.rows.push_back({cfg.dt_ladder[level], static_cast<double>(cfg.modes[k]),
                                      static_cast<double>(conv), sr.mean, sr.stderr_of_mean, si.mean,
                                      si.stderr_of_mean});
            }
        }
        std::vector<double> dre, dim;
        double abs_disc = 0.0, abs_pred = 0.0, pred_re = 0.0;
        for (const auto& q : qs) {
            const Complex d = q.realized - q.predicted;
            dre.push_back(d.real());
            dim.push_back(d.imag());
            abs_disc += std::abs(d);
            abs_pred += std::abs(q.predicted);
            pred_re += q.predicted.real();
        }
        const double rel = abs_pred > 0.0 ? abs_disc / abs_pred : kNaN;
        rel_errors.push_back(rel);
        const SampleStats sr = describe(dre), si = describe(dim);
        qvt.rows.push_back({cfg.dt_ladder[level], sr.mean, sr.stderr_of_mean, si.mean, si.stderr_of_mean, rel,
                            qs.empty() ? kNaN : pred_re / static_cast<double>(qs.size())});
        if (level + 1 == levels) {
            finest = std::move(res);
            if (!qs.empty()) {
                CheckReport r = qv_relation_check(qs, "(" + std::to_string(cfg.qv_modes[0]) + "," +
                                                          std::to_string(cfg.qv_modes[1]) + ")");
                r.note += (r.note.empty() ? "" : "; ") + std::string("finest dt ") + num(cfg.dt_ladder[level]);
                out.checks.push_back(std::move(r));
            }
        }
    }
    out.exploded = flagged;
    out.tables.push_back(drift);
    out.tables.push_back(qvt);

    const double T = cfg.horizon;
    for (int conv = 0; conv < 2; ++conv) {
        const std::string tag = conv == 0 ? "two_pi" : "literal";
        CheckReport r{"drift_residual_" + tag, {}, Verdict::inconclusive, 0, conv == 1, ""};
        for (std::size_t k = 0; k < cfg.modes.size(); ++k) {
            std::vector<double> re(finest.size(), kNaN), im(finest.size(), kNaN), re_kept, im_kept;
            for (std::size_t i = 0; i < finest.size(); ++i) {
                if (finest[i].flagged) continue;
                const Complex z = conv == 0 ? finest[i].two_pi[k] : finest[i].literal[k];
                re[i] = z.real();
                im[i] = z.imag();
                re_kept.push_back(z.real());
                im_kept.push_back(z.imag());
            }
            const std::string name = "R" + std::to_string(cfg.modes[k]) + "_" + tag;
            add_scalar(out, name + "_re", T, re, cfg.series);
            add_scalar(out, name + "_im", T, im, cfg.series);
            if (re_kept.empty()) continue;
            r.sample_size = re_kept.size();
            r.lines.push_back(zero_mean_line("Re " + name + "(T)", re_kept));
            r.lines.push_back(zero_mean_line("Im " + name + "(T)", im_kept));
        }
        r.verdict = combine(r.lines);
        r.note = conv == 0 ? "kappa_n = (2 pi n)^2 / 2" : "kappa_n = n^2 / 2 as printed; reported alongside";
        out.checks.push_back(std::move(r));
    }
    std::vector<double> realized(finest.size(), kNaN), predicted(finest.size(), kNaN);
    for (std::size_t i = 0; i < finest.size(); ++i) {
        if (finest[i].flagged) continue;
        realized[i] = finest[i].qv.realized.real();
        predicted[i] = finest[i].qv.predicted.real();
    }
    add_scalar(out, "qv_realized_re", T, realized, cfg.series);
    add_scalar(out, "qv_predicted_re", T, predicted, cfg.series);

    if (levels >= 2) {
        CheckReport r{"qv_relation_trend", {}, Verdict::inconclusive, cfg.paths, true,
                      "mean |realized - predicted| / mean |predicted| per ladder level"};
        for (std::size_t k = 1; k < levels; ++k) {
            r.lines.push_back(strict_less("relative error at dt=" + num(cfg.dt_ladder[k]) + " < at dt=" +
                                              num(cfg.dt_ladder[k - 1]),
                                          rel_errors[k], 0.0, rel_errors[k - 1]));
        }
        r.verdict = combine(r.lines);
        if (std::any_of(rel_errors.begin(), rel_errors.end(), [](double v) { return std::isnan(v); })) {
            r.lines.clear();
            r.verdict = Verdict::inconclusive;
            r.note = "no martingale part; trend skipped";
        }
        out.checks.push_back(std::move(r));
    }
}

void run_lp_norms(const ExperimentConfig& cfg, int workers, EnsembleSummary& out) {
    SpdeConfig sc = spde_config(cfg, cfg.gamma, cfg.trunc, cfg.dt);
    for (double p : cfg.p) {
        sc.lp_orders.push_back(2.0 * p);
        for (double a : cfg.alpha) sc.norm_integrals.push_back({2.0 * p, a});
    }
    struct Outcome {
        PathSeries series;
        std::vector<double> integrals;
        char flagged = 0;
    };
    const auto results = map_paths<Outcome>(cfg.paths, workers, [&](std::size_t i) {
        const Trajectory t = simulate_truncated(sc, derive_stream(cfg.seed, i));
        Outcome o;
        o.series.times = t.times;
        o.series.values = t.lp;
        o.integrals = t.norm_integrals;
        o.flagged = t.flagged_step.has_value();
        return o;
    });
    std::vector<PathSeries> series;
    std::vector<char> flags;
    for (const auto& o : results) {
        series.push_back(o.series);
        flags.push_back(o.flagged);
    }
    out.exploded = count_flagged(flags);
    std::vector<std::string> names;
    for (double q : sc.lp_orders) names.push_back("L" + num(q));
    add_series(out, names, series, cfg.series);

    Table t{"norm_integrals", {"p", "alpha", "mean", "stderr"}, {}};
    CheckReport fin{"finiteness", {}, Verdict::inconclusive, cfg.paths, false,
                    "E[int_0^T ||u||_{2p}^alpha dt] estimated by left-endpoint sums"};
    for (std::size_t k = 0; k < sc.norm_integrals.size(); ++k) {
        std::vector<double> v(results.size(), kNaN);
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (!results[i].flagged) v[i] = results[i].integrals[k];
        }
        const auto& spec = sc.norm_integrals[k];
        const std::string name = "int_L" + num(spec.order) + "^" + num(spec.exponent);
        add_scalar(out, name, cfg.horizon, v, cfg.series);
        const SampleStats& st = out.functionals.back().stats;
        t.rows.push_back({spec.order / 2.0, spec.exponent, st.mean, st.stderr_of_mean});
        const bool finite = st.count > 0 && std::isfinite(st.mean) && std::isfinite(st.stderr_of_mean);
        fin.lines.push_back({"E[" + name + "] finite", st.mean, st.stderr_of_mean, 0.0, kInf,
                             finite ? Verdict::pass : Verdict::fail});
    }
    fin.verdict = combine(fin.lines);
    out.tables.push_back(t);
    out.checks.push_back(std::move(fin));
    if (out.exploded > 0) {
        out.notes.push_back("flagged paths excluded from the norm integrals: " + std::to_string(out.exploded));
    }
}

}  // namespace spdelab::detail
