#pragma once

#include <array>

#include "aprobe/fock.hpp"
#include "aprobe/params.hpp"

namespace aprobe {

// Photon-number-diagonal unitary the field picks up after one closed loop.
// theta holds the phases, dtheta their derivative with respect to the
// anharmonicity (gamma or delta) -- the generator used by the estimation layer.
struct EffectiveKerrMap {
    Kind kind = Kind::quartic;
    std::vector<double> theta;
    std::vector<double> dtheta;

    int dim() const { return static_cast<int>(theta.size()); }
    FockVector apply(const FockVector& psi) const;
    FockDensity apply(const FockDensity& rho) const;
};

struct PulseSequence {
    std::array<double, 4> lambdas{};
    std::array<double, 4> times{};
    double tau = 2.0 * kPi;

    // (1/sqrt2)[(l4-l2) + i(l1-l3)]; zero iff the loop closes exactly.
    cplx residual_mu() const;
    // coefficient of n^2 in the harmonic phase: l3*l2 + (l2-l4)(l1-l3)/2
    double harmonic_phase_coefficient() const;
};

/// omega_m * (1 + (3/8) gamma (2 + amp_sq)).
double anharmonic_frequency(double omega_m, double gamma, double amp_sq);

/// Loop period for the given kind; the quartic loop must track the shifted
/// frequency, the cubic (and harmonic) one runs at 2 pi / omega_m.
double loop_period(const ProtocolParams& p, Kind kind);

/// Anti-Hermitian deformation operator b^3 - b^dag3 - 3 b^dag + 3 b
/// - 3 b^dag^2 b + 3 b^dag b^2 on dim_m levels.
Mat quadrature_correction_quartic(int dim_m);

/// First-order-in-gamma Heisenberg annihilation operator b(t).
Mat heisenberg_b_quartic(double t, const ProtocolParams& p);
/// First-order-in-delta analog (frequency unshifted).
Mat heisenberg_b_cubic(double t, const ProtocolParams& p);

/// X quadrature at t built from the Heisenberg solution.
Mat heisenberg_x(double t, const ProtocolParams& p, Kind kind);
/// The four cubic quadratures at 0, tau/4, tau/2, 3tau/4.
std::array<Mat, 4> quadratures_cubic_quarter_periods(const ProtocolParams& p);

EffectiveKerrMap effective_map_quartic(const ProtocolParams& p);
EffectiveKerrMap effective_map_cubic(const ProtocolParams& p);
EffectiveKerrMap effective_map(const ProtocolParams& p, Kind kind);

/// <a> on the map-evolved coherent state, summed over the Fock series.
cplx mean_field_exact(const ProtocolParams& p, Kind kind);
/// Closed-form approximation alpha * <a>_0 * exp(-i anharmonic phase).
cplx mean_field_approx(const ProtocolParams& p, Kind kind);
/// The harmonic factor <a>_0 = exp(i lambda^2 - Np (1 - e^{2 i lambda^2})).
cplx mean_field_harmonic_factor(double lambda, double np);

/// Four couplings with ratio 1-epsilon between consecutive pulses.
PulseSequence lossy_sequence(double lambda1, double epsilon, double tau = 2.0 * kPi);

/// Thermal expectation of the lossy harmonic loop operator at photon number n.
cplx lossy_harmonic_expectation(const PulseSequence& seq, double nbar, int n);

}  // namespace aprobe
