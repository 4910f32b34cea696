#pragma once
// Best-possible constant: the extremal family driven to eps -> 0, and a
// discretized operator-norm estimate by alternating Hoelder maximization.

#include <string>
#include <vector>

#include "hhi/inequality.hpp"

namespace hhi {

/// Extremal test pair at eps (validated against the admissible interval).
TestFunctionSpec extremal_pair(double eps, const HolderPair& hp, const Scheme& s);

/// Keeps the admissible entries of a decreasing schedule; if some were dropped,
/// continues by halving the smallest kept entry (or 0.8 eps_max) until the
/// original length is restored.
std::vector<double> clip_schedule(const std::vector<double>& eps, double eps_max);

struct SharpnessPoint {
    double eps = 0.0;
    double ratio = 0.0;   // I / (|f| |a|)
    double I = 0.0;
    double norm_f = 0.0;
    double norm_a = 0.0;
    double rel_err = 0.0;
    bool ok = false;
    std::string error;
};

struct SharpnessTrace {
    Regime regime = Regime::Forward;
    std::vector<SharpnessPoint> points;
    double k_value = 0.0;
    double extrapolated_limit = 0.0;  // intercept of the OLS line R = k0 - c eps
    double slope = 0.0;
    double fit_residual = 0.0;        // RMS residual of the fit
    /// Intercept of a least-squares quadratic in eps over all points (diagnostic
    /// only; NaN with fewer than three points).
    double quadratic_limit = 0.0;
    Verdict bound = Verdict::Indeterminate;     // R < k (forward), R > k (reverse)
    Verdict monotone = Verdict::Indeterminate;  // R moves toward k as eps decreases
    bool limit_ok = false;  // |limit - k| <= max(0.01 k, fit residual)
};

SharpnessTrace sharpness_trace(const std::vector<double>& eps_list, const HolderPair& hp, const Scheme& s,
                               const Tolerances& tol = {});

/// Discretized bilinear form B(f, a) = sum_i sum_n W_i K_in f_i a_n under
/// sum_i W_i Phi_i f_i^p = 1 and sum_n Psi_n a_n^q = 1.
/// Rows are x nodes (plus optional tail functions), columns are indices n
/// (plus an optional tail sequence).
struct OperatorGrid {
    std::vector<double> x_nodes;  // rows that are genuine nodes; tails are appended after
    std::vector<double> W, Phi;   // per row
    std::vector<double> Psi;      // per column
    std::vector<double> K;        // row-major, rows x cols
    long n_max = 0;
    int tail_rows = 0;
    int tail_cols = 0;
    std::size_t rows() const { return W.size(); }
    std::size_t cols() const { return Psi.size(); }
};

struct GridSpec {
    double x_lo = 1e-4;
    double x_hi = 1e4;
    int nx = 2000;
    long n_max = 5000;
    /// Extremal-shaped tail functions beyond the x range and past n_max, with
    /// this eps; 0 disables them (plain truncation).
    double tail_eps = 0.02;
};

/// Log-spaced midpoint grid: y_j = log x_j symmetric about log sqrt(x_lo x_hi),
/// weights x_j dy, so a wider range with the same spacing contains the narrower grid.
OperatorGrid build_operator_grid(const Scheme& s, const HolderPair& hp, const GridSpec& g,
                                 const Tolerances& tol = {});

struct OpnormResult {
    double estimate = 0.0;
    double err = 0.0;         // last change of the quotient
    int iterations = 0;
    bool converged = false;
    std::vector<double> f, a;  // maximizers on the grid (rows / cols)
};

/// Alternating maximization; each half step is the exact Hoelder maximizer, so the
/// quotient is nondecreasing. Forward regime only. Throws ConvergenceError with the
/// best value if max_iter is reached.
OpnormResult opnorm_estimate(const OperatorGrid& g, const HolderPair& hp, int max_iter = 20000,
                             double tol = 1e-10);

struct LadderResult {
    std::vector<GridSpec> specs;
    std::vector<OpnormResult> results;
    std::vector<double> plain;  // same ladder without tail functions
    double k_value = 0.0;
    bool monotone = false;
};

/// Three nested grids ending at `finest`: ranges shrunk by 10 and 100 in each
/// direction around the geometric center, n_max divided by 2 and 4, same spacing.
std::vector<GridSpec> default_ladder(const GridSpec& finest);
LadderResult opnorm_ladder(const Scheme& s, const HolderPair& hp, const std::vector<GridSpec>& ladder,
                           const Tolerances& tol = {}, bool with_plain = true);

}  // namespace hhi
