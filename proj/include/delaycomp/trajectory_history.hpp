#pragma once

// Time-indexed storage for vector signals (state, control, integrands) that
// are read back at delayed times.
//
// Convention for delayed reads: a signal evaluated at or before the initial
// time t0 is the zero vector. Dense reads return
// the stored value at t0 instead.

#include "delaycomp/types.hpp"

#include <cstddef>
#include <deque>

namespace delaycomp {

struct Sample {
    double t = 0.0;
    Vector value;
};

enum class Lookup {
    Delayed,  ///< zero for t <= t0
    Dense     ///< stored value at t0, error before t0
};

class SampleBuffer {
public:
    /// Creates a buffer seeded with the initial sample (t0, initial).
    SampleBuffer(double t0, Vector initial);

    /// Appends a sample. Throws PreconditionError if `t` does not strictly
    /// exceed the last stored time, the dimension differs, or the value is
    /// not finite.
    void append(double t, const Vector& value);
    void append(const Sample& s) { append(s.t, s.value); }

    /// Piecewise-linear read. Throws HistoryError for t beyond the last stored
    /// time, or for t inside (t0, first retained time) after pruning.
    [[nodiscard]] Vector eval(double t, Lookup mode = Lookup::Delayed) const;

    /// Drops samples older than last_time() - horizon, keeping the sample
    /// that brackets the cut and never fewer than two samples.
    void prune(double horizon);

    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] double first_time() const noexcept { return samples_.front().t; }
    [[nodiscard]] double last_time() const noexcept { return samples_.back().t; }
    [[nodiscard]] const Vector& last_value() const noexcept { return samples_.back().value; }
    [[nodiscard]] const Sample& operator[](std::size_t i) const { return samples_[i]; }

private:
    double t0_;
    Eigen::Index dim_;
    std::deque<Sample> samples_;
};

/// Counts delayed reads that had to be clamped to the newest stored sample
/// because the target time lay beyond the integration frontier.
struct LookupStats {
    long lookups = 0;
    long clamped = 0;
};

/// Value of the signal at t - tau under the delayed-read convention. A delay
/// profile that is identically zero reads `current` (the undelayed signal).
/// Targets beyond the newest sample are clamped to it and counted in `stats`.
[[nodiscard]] Vector delayed_value(const SampleBuffer& buf, double t, double tau, bool zero_delay,
                                   const Vector& current, LookupStats* stats = nullptr);

}  // namespace delaycomp
