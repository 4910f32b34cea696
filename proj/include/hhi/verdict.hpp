#pragma once
// Three-valued outcome of a numerically checked inequality.

#include <algorithm>
#include <cmath>
#include <string>

namespace hhi {

enum class Verdict { True, False, Indeterminate };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::True: return "true";
        case Verdict::False: return "false";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

/// Gaps below this many error estimates are not resolved.
inline constexpr double kVerdictErrFactor = 10.0;

/// lhs < rhs, given an absolute error estimate for (rhs - lhs) and a relative
/// guard below which a gap is treated as unresolved.
inline Verdict strict_less(double lhs, double rhs, double abs_err, double rel_guard) {
    const double gap = rhs - lhs;
    const double scale = std::max(std::fabs(lhs), std::fabs(rhs));
    if (!std::isfinite(gap)) return Verdict::Indeterminate;
    if (std::fabs(gap) < std::max(kVerdictErrFactor * abs_err, rel_guard * scale)) return Verdict::Indeterminate;
    return gap > 0.0 ? Verdict::True : Verdict::False;
}

/// lhs <= rhs; a difference inside the error band counts as satisfied.
inline Verdict less_equal(double lhs, double rhs, double abs_err) {
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) return Verdict::Indeterminate;
    return (lhs - rhs <= kVerdictErrFactor * abs_err) ? Verdict::True : Verdict::False;
}

/// Worst of several verdicts: any False wins, then Indeterminate.
inline Verdict combine(std::initializer_list<Verdict> vs) {
    Verdict r = Verdict::True;
    for (Verdict v : vs) {
        if (v == Verdict::False) return Verdict::False;
        if (v == Verdict::Indeterminate) r = Verdict::Indeterminate;
    }
    return r;
}

}  // namespace hhi
