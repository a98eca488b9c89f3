#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "aprobe/metrology.hpp"
#include "aprobe/oracle.hpp"

namespace aprobe {

struct OutcomeSample {
    Scheme scheme = Scheme::homodyne;
    std::vector<double> values;
    uint64_t seed = 0;
    uint64_t stream = 0;
    ProtocolParams params;
    MeasurementConfig config;
    Kind kind = Kind::quartic;
    double ks_statistic = 0.0;  // sanity bound vs the generating cdf
};

// Sampling rejects physical-scale presets: the likelihood needs O(Np) Fock
// terms, so photon numbers beyond the cap are closed-form-only territory.
inline constexpr double kSamplingNpCap = 1.0e4;

OutcomeSample sample_homodyne(const MeasurementConfig& cfg, const ProtocolParams& p, Kind kind,
                              int m, uint64_t seed, uint64_t stream = 0);

struct EstimateResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::vector<std::pair<double, double>> log_likelihood_curve;
    int iterations = 0;
    bool converged = false;
};

EstimateResult mle_estimate(const OutcomeSample& sample, std::pair<double, double> bracket);

struct SaturationReport {
    double variance = 0.0;
    double fisher = 0.0;
    double statistic = 0.0;  // Var * M * F, expected near 1
    double ci_lo = 0.0;      // bootstrap 95% interval on the statistic
    double ci_hi = 0.0;
    double phi = 0.0;
    int n_repeats = 0;
    int m = 0;
    std::vector<double> estimates;
};

SaturationReport crb_saturation_experiment(const ProtocolParams& p, Kind kind, int m,
                                           int n_repeats, uint64_t seed,
                                           std::optional<double> phi = std::nullopt,
                                           int threads = 1);

struct ClosureRound {
    int round = 0;
    double gamma_hat = 0.0;
    double std_error = 0.0;
    double tau = 0.0;
    double visibility = 0.0;
    bool converged = false;
};

// Adaptive loop closure: measure, update the period from the estimated
// anharmonicity, rerun. Each round samples the oracle's reduced field state
// and fits a single-parameter model that tracks the misclosed loop (see
// docs/numerics.md). Stops early once |change| < std_error.
std::vector<ClosureRound> adaptive_closure(const ProtocolParams& p, Kind kind, int rounds,
                                           int m_per_round, uint64_t seed,
                                           std::pair<double, double> bracket,
                                           const RunOptions& = {});

// Inverse-CDF sampler over a tabulated pdf (monotone cubic CDF interpolation).
class PdfSampler {
public:
    PdfSampler(std::vector<double> grid, std::vector<double> pdf);
    double draw(CounterRng& rng) const;
    double cdf_at(double x) const;

private:
    std::vector<double> x_;
    std::vector<double> cdf_;
    std::vector<double> slope_;  // Fritsch-Carlson tangents
};

}  // namespace aprobe
