#include "aprobe/dynamics.hpp"

#include <cmath>

namespace aprobe {

FockVector EffectiveKerrMap::apply(const FockVector& psi) const {
    if (psi.dim() != dim()) throw DimensionMismatch("EffectiveKerrMap: dimension mismatch");
    Vec out(psi.dim());
    for (int n = 0; n < psi.dim(); ++n) out[n] = psi.amp[n] * std::exp(cplx(0, theta[n]));
    return FockVector{std::move(out)};
}

FockDensity EffectiveKerrMap::apply(const FockDensity& rho) const {
    if (rho.dim() != dim()) throw DimensionMismatch("EffectiveKerrMap: dimension mismatch");
    Mat out(rho.dim(), rho.dim());
    for (int i = 0; i < rho.dim(); ++i)
        for (int j = 0; j < rho.dim(); ++j)
            out(i, j) = rho.mat(i, j) * std::exp(cplx(0, theta[i] - theta[j]));
    return FockDensity{std::move(out)};
}

cplx PulseSequence::residual_mu() const {
    return cplx(lambdas[3] - lambdas[1], lambdas[0] - lambdas[2]) / std::sqrt(2.0);
}

double PulseSequence::harmonic_phase_coefficient() const {
    return lambdas[2] * lambdas[1] +
           0.5 * (lambdas[1] - lambdas[3]) * (lambdas[0] - lambdas[2]);
}

double anharmonic_frequency(double omega_m, double gamma, double amp_sq) {
    return omega_m * (1.0 + (3.0 / 8.0) * gamma * (2.0 + amp_sq));
}

double loop_period(const ProtocolParams& p, Kind kind) {
    if (kind == Kind::quartic) {
        enforce_validity(p, kind);
        return 2.0 * kPi / anharmonic_frequency(p.omega_m, p.gamma, p.amp_sq_effective());
    }
    return 2.0 * kPi / p.omega_m;
}

Mat quadrature_correction_quartic(int dim_m) {
    if (dim_m < 4) throw DimensionMismatch("quadrature_correction_quartic: dim_m must be >= 4");
    const LadderOps ops = ladder_operators(dim_m);
    const Mat& b = ops.a;
    const Mat bd = b.adjoint();
    const Mat b2 = b * b;
    const Mat b3 = b2 * b;
    return b3 - b3.adjoint() - 3.0 * bd + 3.0 * b - 3.0 * bd * bd * b + 3.0 * bd * b2;
}

Mat heisenberg_b_quartic(double t, const ProtocolParams& p) {
    enforce_validity(p, Kind::quartic);
    const double w = anharmonic_frequency(p.omega_m, p.gamma, p.amp_sq_effective());
    const LadderOps ops = ladder_operators(p.dim_m);
    const Mat& b = ops.a;
    const Mat bd = b.adjoint();
    const Mat bd3 = bd * bd * bd;
    const Mat b3 = b * b * b;
    const cplx em1 = std::exp(cplx(0, -w * t));
    const cplx ep1 = std::exp(cplx(0, w * t));
    const cplx em3 = std::exp(cplx(0, -3.0 * w * t));
    const cplx ep3 = std::exp(cplx(0, 3.0 * w * t));
    Mat out = em1 * b;
    out += (p.gamma / 4.0) *
           ((em1 - ep3) * 0.25 * bd3 + (em3 - em1) * 0.5 * b3 +
            (em1 - ep1) * 1.5 * (bd + bd * bd * b));
    return out;
}

Mat heisenberg_b_cubic(double t, const ProtocolParams& p) {
    enforce_validity(p, Kind::cubic);
    const double w = p.omega_m;  // unshifted at first order
    const LadderOps ops = ladder_operators(p.dim_m);
    const Mat& b = ops.a;
    const Mat bd = b.adjoint();
    const Mat b2 = b * b;
    const Mat bd2 = bd * bd;
    const Mat occ = 2.0 * bd * b + Mat::Identity(p.dim_m, p.dim_m);
    const cplx em1 = std::exp(cplx(0, -w * t));
    const cplx em2 = std::exp(cplx(0, -2.0 * w * t));
    const cplx ep2 = std::exp(cplx(0, 2.0 * w * t));
    Mat out = em1 * b;
    out += (p.delta / std::pow(2.0, 1.5)) *
           ((em1 - 1.0) * occ + (em2 - em1) * b2 + (em1 - ep2) * bd2 / 3.0);
    return out;
}

Mat heisenberg_x(double t, const ProtocolParams& p, Kind kind) {
    Mat b_t;
    switch (kind) {
        case Kind::quartic: b_t = heisenberg_b_quartic(t, p); break;
        case Kind::cubic: b_t = heisenberg_b_cubic(t, p); break;
        case Kind::harmonic: {
            ProtocolParams q = p;
            q.gamma = 0.0;
            b_t = heisenberg_b_quartic(t, q);
            break;
        }
    }
    return (b_t + b_t.adjoint()) / std::sqrt(2.0);
}

std::array<Mat, 4> quadratures_cubic_quarter_periods(const ProtocolParams& p) {
    const double tau = loop_period(p, Kind::cubic);
    std::array<Mat, 4> out;
    for (int k = 0; k < 4; ++k) out[k] = heisenberg_x(k * tau / 4.0, p, Kind::cubic);
    return out;
}

namespace {

EffectiveKerrMap build_map(const ProtocolParams& p, Kind kind, int dim) {
    EffectiveKerrMap map;
    map.kind = kind;
    map.theta.resize(dim);
    map.dtheta.resize(dim);
    const double l2 = p.lambda * p.lambda;
    const double l3 = l2 * p.lambda;
    const double l4 = l2 * l2;
    for (int n = 0; n < dim; ++n) {
        const double n2 = double(n) * n;
        if (kind == Kind::quartic) {
            const double gen = 0.5 * (l4 * n2 * n2 + 3.0 * l2 * n2 * p.nbar);
            map.theta[n] = l2 * n2 - p.gamma * gen;
            map.dtheta[n] = -gen;
        } else {
            const double gen = (2.0 / 9.0) * l3 * n2 * n;
            map.theta[n] = l2 * n2 - p.delta * gen;
            map.dtheta[n] = -gen;
        }
    }
    return map;
}

}  // namespace

EffectiveKerrMap effective_map_quartic(const ProtocolParams& p) {
    enforce_validity(p, Kind::quartic);
    return build_map(p, Kind::quartic, p.field_dim());
}

EffectiveKerrMap effective_map_cubic(const ProtocolParams& p) {
    enforce_validity(p, Kind::cubic);
    return build_map(p, Kind::cubic, p.field_dim());
}

EffectiveKerrMap effective_map(const ProtocolParams& p, Kind kind) {
    if (kind == Kind::harmonic) {
        ProtocolParams q = p;
        q.gamma = 0.0;
        return build_map(q, Kind::quartic, p.field_dim());
    }
    return kind == Kind::quartic ? effective_map_quartic(p) : effective_map_cubic(p);
}

cplx mean_field_exact(const ProtocolParams& p, Kind kind) {
    const int dim = p.field_dim();
    const FockVector psi = effective_map(p, kind).apply(coherent_vector(p.alpha, dim, p.trunc_tol));
    cplx acc = 0.0;
    for (int n = 0; n + 1 < dim; ++n)
        acc += std::conj(psi.amp[n]) * std::sqrt(double(n + 1)) * psi.amp[n + 1];
    return acc;
}

cplx mean_field_harmonic_factor(double lambda, double np) {
    const cplx two_il2(0.0, 2.0 * lambda * lambda);
    return std::exp(cplx(0.0, lambda * lambda) - np * (1.0 - std::exp(two_il2)));
}

cplx mean_field_approx(const ProtocolParams& p, Kind kind) {
    enforce_validity(p, kind);
    const double np = p.np();
    const double l = p.lambda;
    double phase;
    if (kind == Kind::quartic) {
        phase = 0.5 * p.gamma * std::pow(l, 4) *
                (4.0 * np * np * np + 18.0 * np * np + 10.0 * np + 1.0);
    } else if (kind == Kind::cubic) {
        phase = (2.0 / 9.0) * p.delta * std::pow(l, 3) * (3.0 * np * np + 3.0 * np + 1.0);
    } else {
        phase = 0.0;
    }
    return p.alpha * mean_field_harmonic_factor(l, np) * std::exp(cplx(0, -phase));
}

PulseSequence lossy_sequence(double lambda1, double epsilon, double tau) {
    if (epsilon < 0.0 || epsilon >= 1.0) throw ConfigError("lossy_sequence: epsilon not in [0, 1)");
    PulseSequence seq;
    seq.tau = tau;
    double l = lambda1;
    for (int i = 0; i < 4; ++i) {
        seq.lambdas[i] = l;
        seq.times[i] = i * tau / 4.0;
        l *= (1.0 - epsilon);
    }
    return seq;
}

cplx lossy_harmonic_expectation(const PulseSequence& seq, double nbar, int n) {
    const double mu2 = std::norm(seq.residual_mu());
    const double n2 = double(n) * n;
    const double damping = -0.5 * mu2 * n2 * (1.0 + 2.0 * nbar);
    return std::exp(cplx(damping, n2 * seq.harmonic_phase_coefficient()));
}

}  // namespace aprobe
