#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace spdelab {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// One compared quantity inside a report. Unused bounds are +-infinity.
struct CheckLine {
    std::string label;
    double empirical = 0.0;
    double stderr_of_estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    Verdict verdict = Verdict::inconclusive;

    bool operator==(const CheckLine&) const = default;
};

struct CheckReport {
    std::string name;
    std::vector<CheckLine> lines;
    Verdict verdict = Verdict::inconclusive;  ///< fail if any line fails, else pass if any passes
    std::size_t sample_size = 0;
    /// Informational reports never change a command's exit status.
    bool informational = false;
    std::string note;

    bool operator==(const CheckReport&) const = default;
};

/// Combines line verdicts: any fail -> fail, else any pass -> pass, else inconclusive.
Verdict combine(std::span<const CheckLine> lines);

/// One-sided test of P(sup >= n) <= min(1, x/n) at each level, with 3-sigma
/// margin. Standard errors use the Wilson interval when fewer than 10 hits.
/// Throws ConfigError on empty samples.
CheckReport check_hitting_bound(std::span<const double> sup_samples, double x,
                                std::span<const double> levels);

/// x^alpha <= E[sup^alpha] <= x^alpha / (1 - alpha). Pass when the 99%
/// interval meets the bracket and its upper edge stays within 3 stderr of the
/// upper bound. Throws ConfigError on empty samples or alpha outside (0, 1).
CheckReport check_sup_moment(std::span<const double> sup_samples, double x, double alpha);

/// Variant with a random starting value per path:
/// E[x^alpha] <= E[sup^alpha] <= E[x^alpha] / (1 - alpha), tested on paired
/// differences.
CheckReport check_sup_moment_random_start(std::span<const double> sup_samples,
                                          std::span<const double> initial_samples, double alpha);

/// Ratio mean(qv^(alpha/2)) / mean(initial^alpha) against K(alpha) and against
/// the c-free constant (2 - alpha)/(1 - alpha). Informational when
/// c_alpha_is_guess.
CheckReport check_qv_moment(std::span<const double> qv_samples,
                            std::span<const double> initial_samples, double alpha,
                            double c_alpha, bool c_alpha_is_guess = true);

/// Two-sided z-test of mean(terminal - initial) = 0; pass iff |z| <= 3.
/// Throws ConfigError on mismatched or empty samples.
CheckReport drift_test(std::span<const double> terminal_values,
                       std::span<const double> initial_values);

/// z-test that the mean of samples is zero; used for residual series.
/// A mean within `floor` of zero passes regardless of its stderr, so that
/// quantities that vanish identically are not judged on rounding noise.
CheckLine zero_mean_line(const std::string& label, std::span<const double> samples, double floor = 0.0);

}  // namespace spdelab
