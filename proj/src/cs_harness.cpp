#include "ctrlgrad/cs_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "ctrlgrad/errors.hpp"
#include "ctrlgrad/io.hpp"
#include "ctrlgrad/rng.hpp"

namespace ctrlgrad {

SensingProblem generate_sensing(std::size_t n, std::size_t m, std::uint64_t seed, const SignalSpec& signal)
{
    if (n == 0 || m == 0) {
        throw InvalidParameterError("generate_sensing: n and m must be >= 1");
    }
    if (signal.kind == SignalSpec::Kind::spike && signal.spikes > n) {
        throw InvalidParameterError("generate_sensing: spike count " + std::to_string(signal.spikes) +
                                    " exceeds n = " + std::to_string(n));
    }
    Rng rng(seed);
    SensingProblem sp;
    sp.seed = seed;
    sp.sensing = rng.gaussian_matrix(m, n);
    if (signal.kind == SignalSpec::Kind::gaussian) {
        sp.signal = rng.gaussian_vector(n);
    } else {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < signal.spikes; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(idx[i], idx[j]);
        }
        std::vector<std::size_t> chosen(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(signal.spikes));
        std::sort(chosen.begin(), chosen.end());
        sp.signal = Vector(n);
        for (std::size_t pos : chosen) {
            sp.signal[pos] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        }
    }
    sp.measurements = sp.sensing * sp.signal;
    return sp;
}

QuadraticProblem to_quadratic(const SensingProblem& sp)
{
    const double inv_m = 1.0 / static_cast<double>(sp.sensing.rows());
    const double ny = norm2(sp.measurements);
    return QuadraticProblem(inv_m * (transpose(sp.sensing) * sp.sensing),
                            -inv_m * transpose_times(sp.sensing, sp.measurements), 0.5 * inv_m * ny * ny);
}

LipschitzEstimate lipschitz_estimate(const SensingProblem& sp)
{
    const double s = spectral_norm(sp.sensing);
    const double m = static_cast<double>(sp.sensing.rows());
    return LipschitzEstimate{s * s / m, std::sqrt(m)};
}

std::vector<RegimeResult> run_regime_experiment(const ExperimentConfig& cfg)
{
    if (cfg.regimes.n == 0) {
        throw InvalidParameterError("run_regime_experiment: n must be >= 1");
    }
    if (cfg.iters < 1) {
        throw InvalidParameterError("run_regime_experiment: iters must be >= 1");
    }
    const std::size_t n = cfg.regimes.n;
    std::vector<RegimeResult> results;
    results.reserve(cfg.regimes.ratios.size());

    for (std::size_t i = 0; i < cfg.regimes.ratios.size(); ++i) {
        const double ratio = cfg.regimes.ratios[i];
        if (!(ratio > 0.0)) {
            throw InvalidParameterError("run_regime_experiment: ratios must be positive");
        }
        RegimeResult r;
        r.ratio = ratio;
        r.m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n))));
        r.problem_seed = mix_seed(cfg.seed, 3 * i);
        r.input_seed = mix_seed(cfg.seed, 3 * i + 1);
        r.init_seed = mix_seed(cfg.seed, 3 * i + 2);

        r.problem = generate_sensing(n, r.m, r.problem_seed, cfg.signal);
        r.input = Rng(r.input_seed).gaussian_matrix(n, cfg.d);
        r.x0 = Rng(r.init_seed).gaussian_vector(n);

        const ControlSystem sys(to_quadratic(r.problem), r.input);
        r.lipschitz = lipschitz_estimate(r.problem);
        r.gamma = 1.0 / r.lipschitz.exact;
        if (cfg.report_rank && cfg.d > 0) {
            const ControllabilityReport rep = is_controllable(sys);
            r.kalman_rank = rep.rank;
            r.controllable = rep.controllable;
        }

        DescentConfig dc;
        dc.gamma = r.gamma;
        dc.max_iters = cfg.iters;
        dc.stop_tol = 0.0;
        dc.coupling = cfg.coupling;

        ControlPolicy controlled;
        switch (cfg.policy) {
        case CsPolicy::zero:
            controlled = policy::Zero{};
            break;
        case CsPolicy::constant:
            controlled = policy::Constant{Vector(cfg.d, cfg.constant_value)};
            break;
        case CsPolicy::state_feedback:
            controlled = policy::StateFeedback{design_feedback(sys)};
            break;
        case CsPolicy::gradient_feedback:
            controlled = policy::GradientFeedback{r.gamma * design_feedback(sys)};
            break;
        }

        r.plain = run_descent(sys, policy::Zero{}, r.x0, dc, r.problem.signal);
        r.controlled = run_descent(sys, controlled, r.x0, dc, r.problem.signal);
        results.push_back(std::move(r));
    }
    return results;
}

void write_regime_csv(const RegimeResult& r, std::ostream& out)
{
    out << "iter,l2_error_gd,l2_error_cgd,f_gd,f_cgd\n";
    const std::size_t rows = std::min(r.plain.history.size(), r.controlled.history.size());
    for (std::size_t k = 0; k < rows; ++k) {
        const auto& p = r.plain.history[k];
        const auto& c = r.controlled.history[k];
        out << k << ',' << io::format_double(p.dist_to_ref.value_or(std::numeric_limits<double>::quiet_NaN())) << ','
            << io::format_double(c.dist_to_ref.value_or(std::numeric_limits<double>::quiet_NaN())) << ','
            << io::format_double(p.f_value) << ',' << io::format_double(c.f_value) << '\n';
    }
}

std::vector<SweepRow> gaussian_controllability_sweep(std::size_t n, std::size_t m, const std::vector<std::size_t>& ds,
                                                     std::size_t trials, std::uint64_t seed)
{
    std::vector<SweepRow> table;
    if (trials == 0) {
        return table;
    }
    for (std::size_t d : ds) {
        SweepRow row;
        row.n = n;
        row.m = m;
        row.d = d;
        row.trials = trials;
        row.min_rank = std::numeric_limits<std::size_t>::max();
        std::size_t lower = 0;
        std::size_t upper = 0;
        std::size_t both = 0;
        double rank_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const GaussianRankResult g = gaussian_rank_check(n, m, d, mix_seed(mix_seed(seed, d), t));
            row.min_rank = std::min(row.min_rank, g.rank);
            row.max_rank = std::max(row.max_rank, g.rank);
            rank_sum += static_cast<double>(g.rank);
            lower += g.lower_ok ? 1 : 0;
            upper += g.upper_ok ? 1 : 0;
            both += (g.lower_ok && g.upper_ok) ? 1 : 0;
        }
        const double tt = static_cast<double>(trials);
        row.mean_rank = rank_sum / tt;
        row.frac_lower_ok = static_cast<double>(lower) / tt;
        row.frac_upper_ok = static_cast<double>(upper) / tt;
        row.frac_both_ok = static_cast<double>(both) / tt;
        table.push_back(row);
    }
    return table;
}

} // namespace ctrlgrad
