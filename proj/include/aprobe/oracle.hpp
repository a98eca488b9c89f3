#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aprobe/dynamics.hpp"
#include "aprobe/fock.hpp"
#include "aprobe/params.hpp"

namespace aprobe {

// Mechanical Hamiltonian H0 in units of hbar (energies in units of omega_m
// when omega_m = 1). The anharmonic power is assembled on an enlarged space
// and cropped: X^k couples n to n +/- k, so a naive truncation corrupts the
// top levels.
struct MechHamiltonian {
    int dim = 0;
    Mat mat;
    Kind kind = Kind::harmonic;
    double strength = 0.0;
    double omega_m = 1.0;
};

MechHamiltonian build_hamiltonian(Kind kind, double strength, double omega_m, int dim_m);

/// Exact-diagonalization gap E_{level+1} - E_level.
double energy_gap_check(const MechHamiltonian& h, int level);

struct RunOptions {
    double tau_override = 0.0;    // 0 = derive from the kind
    bool build_joint = true;      // assemble the final joint density matrix
    long long max_joint_dim = 1600;  // cap on dim_c * dim_m
};

struct ProtocolRun {
    ProtocolParams params;
    PulseSequence seq;
    Kind kind = Kind::quartic;
    double tau = 0.0;
    JointState final_joint;       // empty when options.build_joint is false
    FockDensity reduced_field;
    FockDensity reduced_mech;
    std::map<std::string, double> diagnostics;
};

// Brute-force four-pulse loop on the joint space: pulses exp(i lambda_k n_c X_m)
// interleaved with exact anharmonic free evolution over quarter periods, plus
// the mechanics-only completion rotation (irrelevant to the reduced field,
// required for the mechanics return diagnostic). See docs/numerics.md.
ProtocolRun run_protocol(const ProtocolParams& params, const PulseSequence& seq,
                         const FockDensity& field_state, Kind kind, const RunOptions& = {});

/// Convenience: lossless/lossy sequence from params, coherent input field.
ProtocolRun run_protocol(const ProtocolParams& params, Kind kind, const RunOptions& = {});

struct LossRow {
    double epsilon = 0.0;
    double purity_harmonic = 0.0;
    double purity_anharmonic = 0.0;
    double harm_coeff_predicted = 0.0;   // coefficient of n^2
    double harm_coeff_extracted = 0.0;
    double harm_coeff_error = 0.0;
    double harm_modulus_error = 0.0;     // coherence-modulus deviation vs prediction
    double anharmonic_phase = 0.0;       // arg(<a>_anharmonic / <a>_harmonic)
    double mech_return_fidelity = 0.0;
};

std::vector<LossRow> loss_sweep(const ProtocolParams& params, Kind kind,
                                std::span<const double> epsilons, const RunOptions& = {});

}  // namespace aprobe
