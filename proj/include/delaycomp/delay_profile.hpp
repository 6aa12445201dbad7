#pragma once

#include "delaycomp/types.hpp"

#include <string>
#include <vector>

namespace delaycomp {

enum class DelayKind { Constant, Sinusoidal, Table };

/// Time-varying delay tau(t) together with its declared bounds
/// 0 <= tau <= phi1 and |d tau/dt| <= phi2.
///
/// Parameter layout per kind:
///   Constant:   {value}
///   Sinusoidal: {a, b, c}           tau = a + b sin(c t)
///   Table:      {t0, v0, t1, v1, ...} piecewise linear, held constant outside
class DelayProfile {
public:
    DelayProfile(DelayKind kind, std::vector<double> params, double phi1, double phi2);

    static DelayProfile constant(double value);
    static DelayProfile constant(double value, double phi1, double phi2);
    /// Declared bounds default to the tight analytic ones, a + |b| and |b c|.
    static DelayProfile sinusoidal(double a, double b, double c);
    static DelayProfile sinusoidal(double a, double b, double c, double phi1, double phi2);
    static DelayProfile table(std::vector<double> times, std::vector<double> values,
                              double phi1, double phi2);

    [[nodiscard]] double tau(double t) const;
    /// Analytic rate for constant and sinusoidal kinds. The table kind returns
    /// the slope of the segment to the right of `t` (right derivative at a
    /// breakpoint) and zero outside the table.
    [[nodiscard]] double tau_rate(double t) const;

    /// Same shape with tau, rate and declared bounds multiplied by `factor`.
    [[nodiscard]] DelayProfile scaled(double factor) const;

    [[nodiscard]] DelayKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }
    [[nodiscard]] double phi1() const noexcept { return phi1_; }
    [[nodiscard]] double phi2() const noexcept { return phi2_; }
    [[nodiscard]] bool identically_zero() const noexcept;
    /// Natural period of the profile, or 0 when it has none.
    [[nodiscard]] double period() const noexcept;

private:
    DelayKind kind_;
    std::vector<double> params_;
    double phi1_;
    double phi2_;
};

struct DelayCheck {
    std::string condition;
    bool passed = true;
    double witness_time = 0.0;  ///< time of the worst sample (NaN for static checks)
    double value = 0.0;         ///< observed quantity at the witness
};

struct DelayValidation {
    std::vector<DelayCheck> checks;
    [[nodiscard]] bool passed() const;
    /// First failing check, or nullptr.
    [[nodiscard]] const DelayCheck* first_failure() const;
};

/// Sampling window for bound validation. With `samples` points over
/// [t_begin, t_end]; a periodic profile is sampled over one period when
/// t_end <= t_begin.
struct SamplingGrid {
    double t_begin = 0.0;
    double t_end = 0.0;
    int samples = 10000;
};

/// Checks 0 <= tau <= phi1, |rate| <= phi2 and phi2 < 1 on the grid.
[[nodiscard]] DelayValidation validate_state_delay(const DelayProfile& p, SamplingGrid grid = {});
/// State-delay checks plus the input-delay condition phi1 + phi2 < 1.
[[nodiscard]] DelayValidation validate_input_delay(const DelayProfile& p, SamplingGrid grid = {});

/// Largest sampled tau over the grid.
[[nodiscard]] double sampled_max_tau(const DelayProfile& p, SamplingGrid grid);

/// Time at which t - tau(t) first exceeds t0, i.e. where delayed reads stop
/// returning the zero history. Found by bisection; assumes phi2 < 1.
[[nodiscard]] double history_activation_time(const DelayProfile& p, double t0);

[[nodiscard]] std::string to_string(DelayKind kind);
[[nodiscard]] DelayKind delay_kind_from_string(const std::string& name);

}  // namespace delaycomp
