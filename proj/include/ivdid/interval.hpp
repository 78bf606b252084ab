// Copyright 2026 The ivdid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IVDID_INTERVAL_HPP
#define IVDID_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "error.hpp"

namespace ivdid {

// Default width below which a transport source interval counts as a point.
inline constexpr double kDefaultWidthFloor = 1e-12;

/// Closed, bounded real interval [lower, upper].
///
/// Degenerate intervals (lower == upper) stand for scalar observations.
/// Construction never reorders endpoints; an out-of-order pair throws
/// InvalidInterval.
class Interval {
public:
    constexpr Interval() noexcept = default;

    Interval(double lower, double upper) : lower_(lower), upper_(upper)
    {
        if (!std::isfinite(lower) || !std::isfinite(upper)) {
            throw InvalidInterval("interval endpoints must be finite");
        }
        if (lower > upper) {
            std::ostringstream os;
            os << "invalid interval [" << lower << ", " << upper << "]: lower exceeds upper";
            throw InvalidInterval(os.str());
        }
    }

    static Interval point(double x) { return Interval(x, x); }

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    double width() const noexcept { return upper_ - lower_; }
    double midpoint() const noexcept { return 0.5 * (lower_ + upper_); }
    bool degenerate() const noexcept { return lower_ == upper_; }

    // Point at relative position t in [0, 1]; t = 0 is the lower endpoint.
    double at(double t) const noexcept { return (1.0 - t) * lower_ + t * upper_; }

    bool contains(double x, double tol = 0.0) const noexcept
    {
        return x >= lower_ - tol && x <= upper_ + tol;
    }

    bool contains(const Interval& other, double tol = 0.0) const noexcept
    {
        return other.lower_ >= lower_ - tol && other.upper_ <= upper_ + tol;
    }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lower_ = 0.0;
    double upper_ = 0.0;
};

inline std::ostream& operator<<(std::ostream& os, const Interval& iv)
{
    return os << '[' << iv.lower() << ", " << iv.upper() << ']';
}

inline bool approx_equal(const Interval& a, const Interval& b, double tol)
{
    return std::abs(a.lower() - b.lower()) <= tol && std::abs(a.upper() - b.upper()) <= tol;
}

// A ⊕ B = {a + b}.
inline Interval minkowski_sum(const Interval& a, const Interval& b)
{
    return Interval(a.lower() + b.lower(), a.upper() + b.upper());
}

// A ⊖ B = {a - b}; the width is |A| + |B|.
inline Interval minkowski_diff(const Interval& a, const Interval& b)
{
    return Interval(a.lower() - b.upper(), a.upper() - b.lower());
}

inline Interval scale(const Interval& a, double c)
{
    if (!(c >= 0.0)) {
        throw PreconditionError("interval scale factor must be nonnegative");
    }
    return Interval(c * a.lower(), c * a.upper());
}

/// Increasing affine map x -> slope * (x - anchor_in) + anchor_out.
///
/// Applied endpoint-wise it sends intervals to intervals and multiplies
/// widths by `slope`. Both the period-to-period transport of the control
/// group and the control-to-treated shift are instances.
class LinearIntervalMap {
public:
    LinearIntervalMap() = default;

    LinearIntervalMap(double slope, double anchor_in, double anchor_out)
        : slope_(slope), anchor_in_(anchor_in), anchor_out_(anchor_out)
    {
        if (!std::isfinite(slope) || slope < 0.0) {
            throw PreconditionError("linear interval map requires a finite nonnegative slope");
        }
        if (!std::isfinite(anchor_in) || !std::isfinite(anchor_out)) {
            throw PreconditionError("linear interval map anchors must be finite");
        }
    }

    static LinearIntervalMap identity() { return LinearIntervalMap(1.0, 0.0, 0.0); }

    /// The unique increasing affine map carrying `from` onto `to`.
    ///
    /// Throws TransportUndefined when `from` is narrower than `width_floor`.
    static LinearIntervalMap between(const Interval& from, const Interval& to,
                                     double width_floor = kDefaultWidthFloor)
    {
        if (!(from.width() > width_floor)) {
            std::ostringstream os;
            os << "transport undefined: source interval " << from << " has width " << from.width()
               << " (floor " << width_floor << ")";
            throw TransportUndefined(os.str());
        }
        return LinearIntervalMap(to.width() / from.width(), from.lower(), to.lower());
    }

    double slope() const noexcept { return slope_; }
    double anchor_in() const noexcept { return anchor_in_; }
    double anchor_out() const noexcept { return anchor_out_; }

    double operator()(double x) const noexcept { return slope_ * (x - anchor_in_) + anchor_out_; }

    friend bool operator==(const LinearIntervalMap&, const LinearIntervalMap&) = default;

private:
    double slope_ = 1.0;
    double anchor_in_ = 0.0;
    double anchor_out_ = 0.0;
};

inline Interval apply_map(const LinearIntervalMap& m, const Interval& a)
{
    return Interval(m(a.lower()), m(a.upper()));
}

/// Outcome of testing a map (A1, A2, B1) -> B2 against the three
/// desirability conditions: (i) B2 is a proper interval, (ii) the width
/// ratio |B2|/|B1| matches |A2|/|A1|, (iii) both endpoints of B moved by the
/// same positive multiple gamma of the corresponding endpoint moves of A.
struct LemmaReport {
    bool valid_interval = false;
    bool proportional_width = false;
    bool parallel_shift = false;
    // Common multiplier of condition (iii); empty when no endpoint moved.
    std::optional<double> gamma;

    bool all() const noexcept { return valid_interval && proportional_width && parallel_shift; }
};

namespace detail {

inline bool close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace detail

/// Raw-endpoint overload; accepts an inverted candidate image.
inline LemmaReport check_lemma_conditions(const Interval& a1, const Interval& a2, const Interval& b1,
                                          double b2_lower, double b2_upper, double tol = 1e-9)
{
    if (!(a1.width() > 0.0) || !(b1.width() > 0.0)) {
        throw PreconditionError("lemma conditions need positive-width A1 and B1");
    }
    LemmaReport r;
    r.valid_interval = b2_lower <= b2_upper;

    const double b2_width = b2_upper - b2_lower;
    r.proportional_width = r.valid_interval && detail::close(b2_width * a1.width(), a2.width() * b1.width(), tol);

    const double moves_a[2] = {a2.lower() - a1.lower(), a2.upper() - a1.upper()};
    const double moves_b[2] = {b2_lower - b1.lower(), b2_upper - b1.upper()};
    bool ok = true;
    std::optional<double> gamma;
    for (int k = 0; k < 2 && ok; ++k) {
        if (std::abs(moves_a[k]) <= tol) {
            // any gamma works for this endpoint only if B did not move either
            ok = std::abs(moves_b[k]) <= tol;
            continue;
        }
        const double g = moves_b[k] / moves_a[k];
        if (gamma && !detail::close(*gamma, g, tol)) {
            ok = false;
        }
        gamma = gamma.value_or(g);
    }
    if (ok && gamma && !(*gamma > 0.0)) {
        ok = false;
    }
    r.parallel_shift = ok;
    r.gamma = gamma;
    return r;
}

inline LemmaReport check_lemma_conditions(const Interval& a1, const Interval& a2, const Interval& b1,
                                          const Interval& b2, double tol = 1e-9)
{
    return check_lemma_conditions(a1, a2, b1, b2.lower(), b2.upper(), tol);
}

} // namespace ivdid

#endif // IVDID_INTERVAL_HPP
