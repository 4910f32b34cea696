#pragma once
// Default numerical tolerances. The CLI prints these in every report header.

namespace hhi {

struct Tolerances {
    double quad = 1e-10;   // relative, quadratures
    double sum = 1e-8;     // relative, series tails
    double guard = 1e-6;   // relative gap below which a strict verdict is indeterminate
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace hhi
