#include "aprobe/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "aprobe/parallel.hpp"
#include "aprobe/rng.hpp"

namespace aprobe {

namespace {

constexpr uint64_t kBootstrapStream = uint64_t(1) << 40;
constexpr uint64_t kAdaptiveStreamBase = uint64_t(1) << 41;

}  // namespace

PdfSampler::PdfSampler(std::vector<double> grid, std::vector<double> pdf) : x_(std::move(grid)) {
    const size_t n = x_.size();
    if (n < 3 || pdf.size() != n) throw ConfigError("PdfSampler: invalid tabulation");
    cdf_.assign(n, 0.0);
    for (size_t i = 1; i < n; ++i)
        cdf_[i] = cdf_[i - 1] +
                  0.5 * (std::max(0.0, pdf[i]) + std::max(0.0, pdf[i - 1])) * (x_[i] - x_[i - 1]);
    const double total = cdf_.back();
    if (!(total > 0.0)) throw ZeroInformation("PdfSampler: pdf integrates to zero");
    for (auto& v : cdf_) v /= total;

    // Fritsch-Carlson monotone tangents for the cdf.
    std::vector<double> secant(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) secant[i] = (cdf_[i + 1] - cdf_[i]) / (x_[i + 1] - x_[i]);
    slope_.assign(n, 0.0);
    slope_[0] = secant[0];
    slope_[n - 1] = secant[n - 2];
    for (size_t i = 1; i + 1 < n; ++i) slope_[i] = 0.5 * (secant[i - 1] + secant[i]);
    for (size_t i = 0; i + 1 < n; ++i) {
        if (secant[i] <= 0.0) {
            slope_[i] = 0.0;
            slope_[i + 1] = 0.0;
        } else {
            const double a = slope_[i] / secant[i];
            const double b = slope_[i + 1] / secant[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double t = 3.0 / std::sqrt(s);
                slope_[i] = t * a * secant[i];
                slope_[i + 1] = t * b * secant[i];
            }
        }
    }
}

namespace {

inline double hermite_eval(double f0, double f1, double m0, double m1, double h, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return f0 * (2.0 * t3 - 3.0 * t2 + 1.0) + m0 * h * (t3 - 2.0 * t2 + t) +
           f1 * (-2.0 * t3 + 3.0 * t2) + m1 * h * (t3 - t2);
}

}  // namespace

double PdfSampler::cdf_at(double x) const {
    if (x <= x_.front()) return 0.0;
    if (x >= x_.back()) return 1.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const size_t i = static_cast<size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    return hermite_eval(cdf_[i], cdf_[i + 1], slope_[i], slope_[i + 1], h, (x - x_[i]) / h);
}

double PdfSampler::draw(CounterRng& rng) const {
    const double u = rng.next_double();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    size_t i = it == cdf_.begin() ? 0 : static_cast<size_t>(it - cdf_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    double lo = 0.0, hi = 1.0;
    for (int step = 0; step < 60; ++step) {
        const double mid = 0.5 * (lo + hi);
        if (hermite_eval(cdf_[i], cdf_[i + 1], slope_[i], slope_[i + 1], h, mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    return x_[i] + 0.5 * (lo + hi) * h;
}

OutcomeSample sample_homodyne(const MeasurementConfig& cfg_in, const ProtocolParams& p, Kind kind,
                              int m, uint64_t seed, uint64_t stream) {
    if (m < 1) throw ConfigError("sample_homodyne: M must be >= 1");
    if (p.np() > kSamplingNpCap)
        throw CapabilityError(
            "sample_homodyne: photon number " + std::to_string(p.np()) +
            " is closed-form-only territory; sampling needs O(Np) Fock terms per outcome");
    const MeasurementConfig cfg = resolve_config(cfg_in, p);
    const HomodyneTable table(cfg, p, kind);
    std::vector<double> pdf;
    table.tabulate(cfg.phi, pdf, nullptr);
    std::vector<double> mass_terms(pdf.size());
    const auto w = simpson_weights(static_cast<int>(pdf.size()),
                                   table.grid()[1] - table.grid()[0]);
    for (size_t i = 0; i < pdf.size(); ++i) mass_terms[i] = w[i] * pdf[i];
    if (pairwise_sum(mass_terms) < 1.0 - 1e-8)
        throw GridCoverageError("sample_homodyne: grid mass check failed");

    const PdfSampler sampler(table.grid(), pdf);
    CounterRng rng(seed, stream);
    OutcomeSample sample;
    sample.scheme = Scheme::homodyne;
    sample.values.resize(m);
    for (int i = 0; i < m; ++i) sample.values[i] = sampler.draw(rng);
    sample.seed = seed;
    sample.stream = stream;
    sample.params = p;
    sample.config = cfg;
    sample.kind = kind;

    std::vector<double> sorted = sample.values;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    for (int i = 0; i < m; ++i) {
        const double f = sampler.cdf_at(sorted[i]);
        ks = std::max(ks, std::max(std::abs(f - double(i) / m), std::abs(f - double(i + 1) / m)));
    }
    sample.ks_statistic = ks;
    return sample;
}

namespace {

// Log-likelihood of the pure effective-map model as a function of the
// anharmonicity, with analytic first and second derivatives.
class PureLikelihood {
public:
    PureLikelihood(const OutcomeSample& sample) : phi_(sample.config.phi) {
        ProtocolParams base = sample.params;
        base.gamma = 0.0;
        base.delta = 0.0;
        const EffectiveKerrMap map = effective_map(base, sample.kind);
        const FockVector kerr = map.apply(
            coherent_vector(base.alpha, base.field_dim(), base.trunc_tol));
        c0_ = kerr.amp;
        gen_ = map.dtheta;
        const int d = static_cast<int>(c0_.size());
        psi_.resize(sample.values.size(), d);
        std::vector<double> row(d);
        for (size_t i = 0; i < sample.values.size(); ++i) {
            oscillator_wavefunctions(sample.values[i], d, row);
            for (int mm = 0; mm < d; ++mm) psi_(i, mm) = row[mm];
        }
    }

    void coefficients(double theta, Vec& c) const {
        const int d = static_cast<int>(c0_.size());
        c.resize(d);
        for (int m = 0; m < d; ++m)
            c[m] = c0_[m] * std::exp(cplx(0, theta * gen_[m] - phi_ * m));
    }

    double loglik(double theta) const {
        Vec c;
        coefficients(theta, c);
        const Eigen::VectorXd o_re = psi_ * c.real();
        const Eigen::VectorXd o_im = psi_ * c.imag();
        double acc = 0.0;
        for (int i = 0; i < o_re.size(); ++i)
            acc += std::log(std::max(o_re[i] * o_re[i] + o_im[i] * o_im[i], 1e-300));
        return acc;
    }

    // observed information -d2l/dtheta2 at theta
    double observed_information(double theta) const {
        Vec c;
        coefficients(theta, c);
        Vec dc(c.size()), d2c(c.size());
        for (int m = 0; m < c.size(); ++m) {
            dc[m] = c[m] * cplx(0, gen_[m]);
            d2c[m] = dc[m] * cplx(0, gen_[m]);
        }
        const Eigen::VectorXd o_re = psi_ * c.real(), o_im = psi_ * c.imag();
        const Eigen::VectorXd d_re = psi_ * dc.real(), d_im = psi_ * dc.imag();
        const Eigen::VectorXd e_re = psi_ * d2c.real(), e_im = psi_ * d2c.imag();
        double info = 0.0;
        for (int i = 0; i < o_re.size(); ++i) {
            const double p = std::max(o_re[i] * o_re[i] + o_im[i] * o_im[i], 1e-300);
            const double dp = 2.0 * (o_re[i] * d_re[i] + o_im[i] * d_im[i]);
            const double d2p = 2.0 * (o_re[i] * e_re[i] + o_im[i] * e_im[i]) +
                               2.0 * (d_re[i] * d_re[i] + d_im[i] * d_im[i]);
            info -= (d2p * p - dp * dp) / (p * p);
        }
        return info;
    }

private:
    double phi_;
    Vec c0_;
    std::vector<double> gen_;
    Eigen::MatrixXd psi_;
};

struct GoldenResult {
    double arg = 0.0;
    double val = 0.0;
    int iterations = 0;
};

template <typename F>
GoldenResult golden_max_tracked(F&& f, double lo, double hi, double tol, int max_iter) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int it = 0;
    while (it < max_iter && (b - a) > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        ++it;
    }
    GoldenResult r;
    r.iterations = it;
    if (f1 >= f2) {
        r.arg = x1;
        r.val = f1;
    } else {
        r.arg = x2;
        r.val = f2;
    }
    return r;
}

EstimateResult maximize_likelihood(const std::function<double(double)>& loglik,
                                   std::pair<double, double> bracket,
                                   const std::function<double(double)>& observed_info) {
    const auto [lo, hi] = bracket;
    if (!(hi > lo)) throw ConfigError("mle_estimate: invalid bracket");
    EstimateResult res;
    constexpr int kCurvePoints = 13;
    double curve_max = -std::numeric_limits<double>::infinity();
    double curve_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kCurvePoints; ++i) {
        const double th = lo + (hi - lo) * i / (kCurvePoints - 1);
        const double ll = loglik(th);
        res.log_likelihood_curve.emplace_back(th, ll);
        curve_max = std::max(curve_max, ll);
        curve_min = std::min(curve_min, ll);
    }
    if (curve_max - curve_min < 1e-9 * (1.0 + std::abs(curve_max)))
        throw NonConvergence("mle_estimate: likelihood is flat over the bracket");

    const double tol = 1e-7 * (hi - lo);
    const GoldenResult g = golden_max_tracked(loglik, lo, hi, tol, 300);
    res.iterations = g.iterations;
    res.estimate = g.arg;
    if (g.arg - lo < 5.0 * tol || hi - g.arg < 5.0 * tol)
        throw BracketError("mle_estimate: maximum sits on the bracket boundary");
    const double info = observed_info(g.arg);
    if (!(info > 0.0))
        throw NonConvergence("mle_estimate: non-positive observed information at the maximum");
    res.std_error = 1.0 / std::sqrt(info);
    res.converged = true;
    return res;
}

}  // namespace

EstimateResult mle_estimate(const OutcomeSample& sample, std::pair<double, double> bracket) {
    if (sample.scheme != Scheme::homodyne)
        throw ConfigError("mle_estimate: only homodyne samples are supported");
    const PureLikelihood like(sample);
    return maximize_likelihood([&](double th) { return like.loglik(th); }, bracket,
                               [&](double th) { return like.observed_information(th); });
}

SaturationReport crb_saturation_experiment(const ProtocolParams& p, Kind kind, int m,
                                           int n_repeats, uint64_t seed,
                                           std::optional<double> phi, int threads) {
    if (n_repeats < 2) throw ConfigError("crb_saturation_experiment: need at least 2 repeats");
    const double strength = p.strength(kind);
    if (!(strength > 0.0))
        throw ZeroInformation("crb_saturation_experiment: anharmonicity must be positive");

    MeasurementConfig cfg;
    if (phi) {
        cfg.phi = *phi;
    } else {
        cfg.phi = optimize_phase(p, kind, 24).first;
    }
    const double fisher = fisher_homodyne(cfg, p, kind);
    if (!(fisher > 0.0))
        throw ZeroInformation("crb_saturation_experiment: homodyne information vanishes");

    SaturationReport rep;
    rep.phi = cfg.phi;
    rep.fisher = fisher;
    rep.n_repeats = n_repeats;
    rep.m = m;
    rep.estimates.resize(n_repeats);
    const std::pair<double, double> bracket{strength / 10.0, strength * 10.0};
    parallel_for(n_repeats, threads, [&](int r) {
        const OutcomeSample sample = sample_homodyne(cfg, p, kind, m, seed, uint64_t(r));
        rep.estimates[r] = mle_estimate(sample, bracket).estimate;
    });

    double mean = 0.0;
    for (double e : rep.estimates) mean += e;
    mean /= n_repeats;
    double var = 0.0;
    for (double e : rep.estimates) var += (e - mean) * (e - mean);
    var /= (n_repeats - 1);
    rep.variance = var;
    rep.statistic = var * m * fisher;

    // bootstrap interval on the statistic
    constexpr int kBoot = 1000;
    std::vector<double> stats(kBoot);
    CounterRng rng(seed, kBootstrapStream);
    for (int b = 0; b < kBoot; ++b) {
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n_repeats; ++i) {
            const int idx = std::min(n_repeats - 1,
                                     int(rng.next_double() * n_repeats));
            const double e = rep.estimates[idx];
            s += e;
            s2 += e * e;
        }
        const double v = (s2 - s * s / n_repeats) / (n_repeats - 1);
        stats[b] = v * m * fisher;
    }
    std::sort(stats.begin(), stats.end());
    rep.ci_lo = stats[static_cast<int>(0.025 * kBoot)];
    rep.ci_hi = stats[static_cast<int>(0.975 * kBoot)];
    return rep;
}

namespace {

// Single-parameter model of the (possibly misclosed) loop: four equally
// spaced pulses with rotation angle theta(v) = omega(v) * tau / 4 between
// them compose into a residual displacement mu1(v) per photon and a quadratic
// phase phi2(v); the anharmonic phase keeps its closed-loop form. At the
// self-consistent period this reduces to the effective Kerr map.
struct MisclosureModel {
    ProtocolParams params;
    Kind kind;
    double tau;
    Vec c0;                    // coherent amplitudes
    std::vector<double> gen;   // anharmonic generator dtheta

    FockDensity density(double v) const {
        ProtocolParams q = params;
        if (kind == Kind::quartic)
            q.gamma = v;
        else
            q.delta = v;
        const double omega = kind == Kind::quartic
                                 ? anharmonic_frequency(q.omega_m, v, q.amp_sq_effective())
                                 : q.omega_m;
        const double angle = omega * tau / 4.0;
        const PulseSequence seq = lossy_sequence(q.lambda, q.epsilon, tau);
        cplx mu1 = 0.0;
        double phi2 = 0.0;
        for (int k = 0; k < 4; ++k) {
            mu1 += cplx(0, seq.lambdas[k] / std::sqrt(2.0)) * std::exp(cplx(0, k * angle));
            for (int j = 0; j < k; ++j)
                phi2 += 0.5 * seq.lambdas[k] * seq.lambdas[j] * std::sin((k - j) * angle);
        }
        const double damp = 0.5 * std::norm(mu1) * (1.0 + 2.0 * q.nbar);
        const int d = static_cast<int>(c0.size());
        Mat rho(d, d);
        for (int n = 0; n < d; ++n)
            for (int mm = 0; mm < d; ++mm) {
                const double dn = double(n) - mm;
                const double phase = phi2 * (double(n) * n - double(mm) * mm) +
                                     v * (gen[n] - gen[mm]);
                rho(n, mm) = c0[n] * std::conj(c0[mm]) *
                             std::exp(cplx(-damp * dn * dn, phase));
            }
        return FockDensity{std::move(rho)};
    }
};

double density_loglik(const MisclosureModel& model, double v, std::span<const double> values,
                      double phi) {
    const FockDensity rho = model.density(v);
    double acc = 0.0;
    for (double x : values) acc += std::log(std::max(homodyne_pdf_density(x, rho, phi), 1e-300));
    return acc;
}

}  // namespace

std::vector<ClosureRound> adaptive_closure(const ProtocolParams& p, Kind kind, int rounds,
                                           int m_per_round, uint64_t seed,
                                           std::pair<double, double> bracket,
                                           const RunOptions& options) {
    if (rounds < 1) throw ConfigError("adaptive_closure: rounds must be >= 1");
    if (kind == Kind::harmonic) throw ConfigError("adaptive_closure: kind must be anharmonic");
    p.validate();

    const int dim_c = p.field_dim();
    MisclosureModel model;
    model.params = p;
    model.kind = kind;
    {
        ProtocolParams base = p;
        base.gamma = 0.0;
        base.delta = 0.0;
        const EffectiveKerrMap map = effective_map(base, kind);
        model.gen = map.dtheta;
        // The model's phi2 term supplies the quadratic phase (it reduces to
        // lambda^2 n^2 at exact closure), so c0 is the bare coherent state.
        model.c0 = coherent_vector(p.alpha, dim_c, p.trunc_tol).amp;
    }

    // measurement phase fixed once, from the pure model at the bracket's
    // geometric midpoint
    ProtocolParams phi_params = p;
    const double mid = std::sqrt(std::max(bracket.first, 1e-300) * bracket.second);
    if (kind == Kind::quartic)
        phi_params.gamma = mid;
    else
        phi_params.delta = mid;
    const double phi = optimize_phase(phi_params, kind, 24).first;

    RunOptions opts = options;
    opts.build_joint = false;

    std::vector<ClosureRound> trace;
    double tau = 2.0 * kPi / p.omega_m;  // start from the bare period
    double previous_hat = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < rounds; ++k) {
        opts.tau_override = tau;
        const ProtocolRun run = run_protocol(p, kind, opts);
        const double visibility = std::abs(mean_annihilation(run.reduced_field)) /
                                  std::abs(p.alpha);

        // sample the oracle's field state and fit the single-parameter model
        std::vector<double> pdf;
        MeasurementConfig cfg;
        cfg.phi = phi;
        cfg = resolve_config(cfg, p);
        const int points = cfg.x_grid.points;
        const double step = (cfg.x_grid.hi - cfg.x_grid.lo) / (points - 1);
        std::vector<double> grid(points);
        pdf.resize(points);
        for (int i = 0; i < points; ++i) {
            grid[i] = cfg.x_grid.lo + i * step;
            pdf[i] = homodyne_pdf_density(grid[i], run.reduced_field, phi);
        }
        const PdfSampler sampler(grid, pdf);
        CounterRng rng(seed, kAdaptiveStreamBase + uint64_t(k));
        std::vector<double> values(m_per_round);
        for (int i = 0; i < m_per_round; ++i) values[i] = sampler.draw(rng);

        model.tau = tau;
        const auto loglik = [&](double v) { return density_loglik(model, v, values, phi); };
        const auto observed_info = [&](double v) {
            const double h = std::max(std::abs(v) * 1e-3, (bracket.second - bracket.first) * 1e-5);
            return -(loglik(v + h) - 2.0 * loglik(v) + loglik(v - h)) / (h * h);
        };
        const EstimateResult est = maximize_likelihood(loglik, bracket, observed_info);

        ClosureRound row;
        row.round = k;
        row.gamma_hat = est.estimate;
        row.std_error = est.std_error;
        row.tau = tau;
        row.visibility = visibility;
        row.converged = !std::isnan(previous_hat) &&
                        std::abs(est.estimate - previous_hat) < est.std_error;
        trace.push_back(row);
        if (row.converged) break;
        previous_hat = est.estimate;

        if (kind == Kind::quartic) {
            ProtocolParams q = p;
            q.gamma = est.estimate;
            tau = 2.0 * kPi / anharmonic_frequency(q.omega_m, q.gamma, q.amp_sq_effective());
        }
        // cubic: the frequency is unshifted, tau stays at the bare period
    }
    return trace;
}

}  // namespace aprobe
