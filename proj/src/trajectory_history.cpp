#include "delaycomp/trajectory_history.hpp"

#include <algorithm>
#include <sstream>

namespace delaycomp {

SampleBuffer::SampleBuffer(double t0, Vector initial) : t0_(t0), dim_(initial.size()) {
    if (dim_ <= 0) {
        throw PreconditionError("SampleBuffer: dimension must be positive");
    }
    if (!all_finite(initial)) {
        throw PreconditionError("SampleBuffer: initial value is not finite");
    }
    samples_.push_back(Sample{t0, std::move(initial)});
}

void SampleBuffer::append(double t, const Vector& value) {
    if (!(t > samples_.back().t)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "SampleBuffer::append: time " << t << " does not exceed last stored time "
            << samples_.back().t;
        throw PreconditionError(msg.str());
    }
    if (value.size() != dim_) {
        throw PreconditionError("SampleBuffer::append: dimension " +
                                std::to_string(value.size()) + " != " + std::to_string(dim_));
    }
    if (!all_finite(value)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "SampleBuffer::append: non-finite value at t=" << t;
        throw PreconditionError(msg.str());
    }
    samples_.push_back(Sample{t, value});
}

Vector SampleBuffer::eval(double t, Lookup mode) const {
    if (mode == Lookup::Delayed && t <= t0_) {
        return Vector::Zero(dim_);
    }
    const double last = samples_.back().t;
    if (t > last) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "SampleBuffer::eval: t=" << t << " is beyond the last stored time " << last;
        throw HistoryError(msg.str());
    }
    if (t < samples_.front().t) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "SampleBuffer::eval: t=" << t << " precedes retained history (first "
            << samples_.front().t << ")";
        throw HistoryError(msg.str());
    }
    if (t == last) {
        return samples_.back().value;
    }
    // First sample with time > t; its predecessor brackets t from below.
    auto hi = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const Sample& s) { return v < s.t; });
    auto lo = std::prev(hi);
    if (lo->t == t) {
        return lo->value;
    }
    const double w = (t - lo->t) / (hi->t - lo->t);
    return (1.0 - w) * lo->value + w * hi->value;
}

void SampleBuffer::prune(double horizon) {
    if (horizon < 0.0) {
        throw PreconditionError("SampleBuffer::prune: negative horizon");
    }
    const double cut = samples_.back().t - horizon;
    // Keep samples_[k] as soon as samples_[k + 1] is the first one >= cut.
    while (samples_.size() > 2 && samples_[1].t <= cut) {
        samples_.pop_front();
    }
}

Vector delayed_value(const SampleBuffer& buf, double t, double tau, bool zero_delay,
                     const Vector& current, LookupStats* stats) {
    if (stats) ++stats->lookups;
    if (zero_delay) return current;
    const double target = t - tau;
    if (target > buf.last_time()) {
        if (stats) ++stats->clamped;
        return target <= buf.t0() ? Vector::Zero(buf.dim()) : buf.last_value();
    }
    return buf.eval(target, Lookup::Delayed);
}

}  // namespace delaycomp
