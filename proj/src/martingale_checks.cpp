#include "spdelab/martingale_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spdelab/errors.hpp"
#include "spdelab/functionals.hpp"
#include "spdelab/stats.hpp"

namespace spdelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

void require_samples(std::span<const double> s, const char* what) {
    if (s.empty()) throw ConfigError(std::string(what) + ": empty sample set");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::pass;
    if (s == "fail") return Verdict::fail;
    if (s == "inconclusive") return Verdict::inconclusive;
    throw ConfigError("unknown verdict '" + s + "'");
}

Verdict combine(std::span<const CheckLine> lines) {
    bool any_pass = false;
    for (const auto& line : lines) {
        if (line.verdict == Verdict::fail) return Verdict::fail;
        any_pass = any_pass || line.verdict == Verdict::pass;
    }
    return any_pass ? Verdict::pass : Verdict::inconclusive;
}

CheckReport check_hitting_bound(std::span<const double> sup_samples, double x,
                                std::span<const double> levels) {
    require_samples(sup_samples, "hitting bound");
    CheckReport report;
    report.name = "hitting_bound";
    report.sample_size = sup_samples.size();
    const double n_paths = static_cast<double>(sup_samples.size());
    for (double level : levels) {
        if (!(level > 0.0)) throw ConfigError("hitting bound: levels must be positive");
        const auto hits = static_cast<std::size_t>(
            std::count_if(sup_samples.begin(), sup_samples.end(), [&](double s) { return s >= level; }));
        const double p = static_cast<double>(hits) / n_paths;
        double se = std::sqrt(p * (1.0 - p) / n_paths);
        if (hits < 10) se = (wilson_upper(hits, sup_samples.size(), 3.0) - p) / 3.0;
        CheckLine line;
        line.label = "P(sup >= " + fmt(level) + ")";
        line.empirical = p;
        line.stderr_of_estimate = se;
        line.lower = 0.0;
        line.upper = std::min(1.0, x / level);
        if (p > line.upper + 3.0 * se) {
            line.verdict = Verdict::fail;
        } else if (3.0 * se > line.upper) {
            line.verdict = Verdict::inconclusive;
        } else {
            line.verdict = Verdict::pass;
        }
        report.lines.push_back(line);
    }
    report.verdict = combine(report.lines);
    return report;
}

CheckReport check_sup_moment(std::span<const double> sup_samples, double x, double alpha) {
    require_samples(sup_samples, "sup moment");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("sup moment: alpha must be in (0, 1)");
    std::vector<double> powered(sup_samples.size());
    std::transform(sup_samples.begin(), sup_samples.end(), powered.begin(),
                   [&](double s) { return std::pow(s, alpha); });
    const SampleStats st = describe(powered);

    CheckLine line;
    line.label = "E[sup^" + fmt(alpha) + "]";
    line.empirical = st.mean;
    line.stderr_of_estimate = st.stderr_of_mean;
    line.lower = std::pow(x, alpha);
    line.upper = line.lower / (1.0 - alpha);
    const double s = st.stderr_of_mean;
    const double ci_lo = st.mean - kZ99 * s;
    const double ci_hi = st.mean + kZ99 * s;
    const bool intersects = ci_hi >= line.lower && ci_lo <= line.upper;
    const bool ok = intersects && ci_hi <= line.upper + 3.0 * s && ci_lo >= line.lower - 3.0 * s;
    if (!ok) {
        line.verdict = Verdict::fail;
    } else if (3.0 * s > line.upper - line.lower) {
        line.verdict = Verdict::inconclusive;
    } else {
        line.verdict = Verdict::pass;
    }

    CheckReport report;
    report.name = "sup_moment";
    report.lines.push_back(line);
    report.verdict = line.verdict;
    report.sample_size = sup_samples.size();
    report.note = "99% interval [" + fmt(ci_lo) + ", " + fmt(ci_hi) + "]";
    return report;
}

CheckReport check_sup_moment_random_start(std::span<const double> sup_samples,
                                          std::span<const double> initial_samples, double alpha) {
    require_samples(sup_samples, "sup moment");
    if (sup_samples.size() != initial_samples.size()) {
        throw ConfigError("sup moment: sup and initial samples differ in length");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("sup moment: alpha must be in (0, 1)");
    const std::size_t n = sup_samples.size();
    std::vector<double> sup_pow(n), start_pow(n), above_lower(n), below_upper(n);
    for (std::size_t i = 0; i < n; ++i) {
        sup_pow[i] = std::pow(sup_samples[i], alpha);
        start_pow[i] = std::pow(initial_samples[i], alpha);
        above_lower[i] = sup_pow[i] - start_pow[i];
        below_upper[i] = start_pow[i] / (1.0 - alpha) - sup_pow[i];
    }
    const SampleStats sup_st = describe(sup_pow);
    const SampleStats start_st = describe(start_pow);
    const SampleStats lo_st = describe(above_lower);
    const SampleStats hi_st = describe(below_upper);

    CheckReport report;
    report.name = "sup_moment_random_start";
    report.sample_size = n;
    auto one_sided = [](const SampleStats& d) {
        return d.mean >= -3.0 * d.stderr_of_mean ? Verdict::pass : Verdict::fail;
    };
    report.lines.push_back({"E[sup^a] >= E[M0^a]", sup_st.mean, lo_st.stderr_of_mean,
                            start_st.mean, kInf, one_sided(lo_st)});
    report.lines.push_back({"E[sup^a] <= E[M0^a]/(1-a)", sup_st.mean, hi_st.stderr_of_mean, -kInf,
                            start_st.mean / (1.0 - alpha), one_sided(hi_st)});
    report.verdict = combine(report.lines);
    return report;
}

CheckReport check_qv_moment(std::span<const double> qv_samples,
                            std::span<const double> initial_samples, double alpha,
                            double c_alpha, bool c_alpha_is_guess) {
    require_samples(qv_samples, "qv moment");
    require_samples(initial_samples, "qv moment");
    if (qv_samples.size() != initial_samples.size()) {
        throw ConfigError("qv moment: qv and initial samples differ in length");
    }
    const double threshold = k_alpha(alpha, c_alpha);
    const std::size_t n = qv_samples.size();
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = std::pow(qv_samples[i], 0.5 * alpha);
        b[i] = std::pow(initial_samples[i], alpha);
    }
    const SampleStats sa = describe(a);
    const SampleStats sb = describe(b);

    CheckReport report;
    report.name = "qv_moment";
    report.sample_size = n;
    report.informational = c_alpha_is_guess;
    if (!(sb.mean > 0.0)) {
        report.lines.push_back({"ratio", 0.0, 0.0, 0.0, threshold, Verdict::inconclusive});
        report.verdict = Verdict::inconclusive;
        report.note = "initial moment is zero";
        return report;
    }
    const double ratio = sa.mean / sb.mean;
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) cov += (a[i] - sa.mean) * (b[i] - sb.mean);
    cov = n > 1 ? cov / static_cast<double>(n - 1) : 0.0;
    const double var = (sa.variance + ratio * ratio * sb.variance - 2.0 * ratio * cov) /
                       (sb.mean * sb.mean * static_cast<double>(n));
    const double se = std::sqrt(std::max(var, 0.0));

    auto upper_verdict = [&](double bound) {
        return ratio <= bound + 3.0 * se ? Verdict::pass : Verdict::fail;
    };
    report.lines.push_back({"E[qv^(a/2)]/E[M0^a] vs K(a)", ratio, se, 0.0, threshold,
                            upper_verdict(threshold)});
    const double c_free = (2.0 - alpha) / (1.0 - alpha);
    report.lines.push_back({"E[qv^(a/2)]/E[M0^a] vs (2-a)/(1-a)", ratio, se, 0.0, c_free,
                            upper_verdict(c_free)});
    report.verdict = combine(report.lines);
    if (c_alpha_is_guess) report.note = "c(alpha) is a configured value; verdict informational";
    return report;
}

CheckLine zero_mean_line(const std::string& label, std::span<const double> samples, double floor) {
    require_samples(samples, "zero-mean test");
    const SampleStats st = describe(samples);
    CheckLine line;
    line.label = label;
    line.empirical = st.mean;
    line.stderr_of_estimate = st.stderr_of_mean;
    line.lower = -std::max(3.0 * st.stderr_of_mean, floor);
    line.upper = std::max(3.0 * st.stderr_of_mean, floor);
    double z = 0.0;
    if (st.stderr_of_mean > 0.0) {
        z = st.mean / st.stderr_of_mean;
    } else if (st.mean != 0.0) {
        z = kInf;
    }
    line.verdict = std::fabs(z) <= 3.0 || std::fabs(st.mean) <= floor ? Verdict::pass : Verdict::fail;
    return line;
}

CheckReport drift_test(std::span<const double> terminal_values,
                       std::span<const double> initial_values) {
    require_samples(terminal_values, "drift test");
    if (terminal_values.size() != initial_values.size()) {
        throw ConfigError("drift test: terminal and initial samples differ in length");
    }
    std::vector<double> diff(terminal_values.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = terminal_values[i] - initial_values[i];
    CheckReport report;
    report.name = "drift_test";
    report.sample_size = diff.size();
    report.lines.push_back(zero_mean_line("mean(terminal - initial)", diff));
    report.verdict = report.lines.front().verdict;
    const auto& line = report.lines.front();
    const double z = line.stderr_of_estimate > 0.0 ? line.empirical / line.stderr_of_estimate
                                                   : (line.empirical == 0.0 ? 0.0 : kInf);
    report.note = "z = " + fmt(z);
    return report;
}

}  // namespace spdelab
