#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ctrlgrad/descent.hpp"

namespace ctrlgrad {

struct SignalSpec {
    enum class Kind { gaussian, spike };
    Kind kind = Kind::gaussian;
    /// Number of ±1 entries for Kind::spike.
    std::size_t spikes = 0;
};

/// Noiseless Gaussian sensing instance y = S·x̄.
///
/// Stream layout for a given seed: S (m×n, row-major), then the signal. A
/// gaussian signal takes n further normals; a spike(k) signal draws k distinct
/// positions by a partial Fisher–Yates shuffle of 0..n−1 (one below() call
/// each), then k signs (one uniform() < 0.5 each, in position order).
struct SensingProblem {
    Matrix sensing;
    Vector signal;
    Vector measurements;
    std::uint64_t seed = 0;
};

SensingProblem generate_sensing(std::size_t n, std::size_t m, std::uint64_t seed, const SignalSpec& signal = {});

/// f(x) = ‖Sx − y‖²/(2m): A = SᵀS/m, b = −Sᵀy/m, c = ‖y‖²/(2m).
/// The gradient carries the same 1/m factor as the objective.
QuadraticProblem to_quadratic(const SensingProblem& sp);

struct LipschitzEstimate {
    /// λ_max(SᵀS/m)
    double exact = 0.0;
    /// √m, a common rule of thumb for unnormalized sensing matrices.
    double sqrt_m_rule = 0.0;
};

LipschitzEstimate lipschitz_estimate(const SensingProblem& sp);

struct RegimeSpec {
    std::size_t n = 128;
    /// m/n per regime: oversampled, sampled, undersampled.
    std::vector<double> ratios{2.0, 1.0, 0.5};
};

enum class CsPolicy { zero, constant, state_feedback, gradient_feedback };

struct ExperimentConfig {
    RegimeSpec regimes;
    /// Number of control channels (columns of B).
    std::size_t d = 2;
    CsPolicy policy = CsPolicy::gradient_feedback;
    int iters = 5000;
    std::uint64_t seed = 0;
    SignalSpec signal;
    /// Entry value for CsPolicy::constant (u = value·1).
    double constant_value = 0.0;
    Coupling coupling = Coupling::euler;
    /// Also compute the Kalman rank of each induced control system.
    bool report_rank = true;
};

struct RegimeResult {
    double ratio = 0.0;
    std::size_t m = 0;
    std::uint64_t problem_seed = 0;
    std::uint64_t input_seed = 0;
    std::uint64_t init_seed = 0;
    LipschitzEstimate lipschitz;
    double gamma = 0.0;
    std::size_t kalman_rank = 0;
    bool controllable = false;
    SensingProblem problem;
    Matrix input;
    Vector x0;
    RunRecord plain;
    RunRecord controlled;
};

/// Per ratio r (index i): m = max(1, round(r·n)); the sensing problem, B (n×d)
/// and the Gaussian start x0 use seeds mix_seed(seed, 3i), 3i+1 and 3i+2.
/// Plain and controlled gradient descent both run `iters` steps with
/// γ = 1/λ_max(A). The default controlled policy is gradient feedback with the
/// step-scaled gain γ·B⁺A; the unscaled B⁺A gain is unstable at this step size
/// once d ≥ 2.
std::vector<RegimeResult> run_regime_experiment(const ExperimentConfig& cfg);

/// Columns: iter, l2_error_gd, l2_error_cgd, f_gd, f_cgd.
void write_regime_csv(const RegimeResult& r, std::ostream& out);

struct SweepRow {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t d = 0;
    std::size_t trials = 0;
    std::size_t min_rank = 0;
    std::size_t max_rank = 0;
    double mean_rank = 0.0;
    double frac_lower_ok = 0.0;
    double frac_upper_ok = 0.0;
    double frac_both_ok = 0.0;
};

/// gaussian_rank_check over `trials` seeds mix_seed(mix_seed(seed, d), t) for
/// each d. Empty when trials == 0.
std::vector<SweepRow> gaussian_controllability_sweep(std::size_t n, std::size_t m, const std::vector<std::size_t>& ds,
                                                     std::size_t trials, std::uint64_t seed);

} // namespace ctrlgrad
