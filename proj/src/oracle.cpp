#include "aprobe/oracle.hpp"

#include <cmath>

namespace aprobe {

namespace {

constexpr int kEdgeBuffer = 8;
constexpr double kEnsembleCutoff = 1e-16;

}  // namespace

MechHamiltonian build_hamiltonian(Kind kind, double strength, double omega_m, int dim_m) {
    if (dim_m < 8) throw DimensionMismatch("build_hamiltonian: dim_m must be >= 8");
    MechHamiltonian h;
    h.dim = dim_m;
    h.kind = kind;
    h.strength = strength;
    h.omega_m = omega_m;
    Mat mat = Mat::Zero(dim_m, dim_m);
    for (int n = 0; n < dim_m; ++n) mat(n, n) = omega_m * (n + 0.5);
    if (kind != Kind::harmonic && strength != 0.0) {
        const int big = dim_m + kEdgeBuffer;
        const Mat x = ladder_operators(big).x;
        if (kind == Kind::quartic) {
            const Mat x2 = x * x;
            mat += (strength / 4.0) * omega_m * (x2 * x2).topLeftCorner(dim_m, dim_m);
        } else {
            mat += (strength / 3.0) * omega_m * (x * x * x).topLeftCorner(dim_m, dim_m);
        }
    }
    h.mat = std::move(mat);
    return h;
}

double energy_gap_check(const MechHamiltonian& h, int level) {
    if (level < 0 || level + 1 >= h.dim - kEdgeBuffer)
        throw TruncationError("energy_gap_check: level too close to the truncation edge");
    Eigen::SelfAdjointEigenSolver<Mat> es(h.mat, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailure("energy_gap_check: eigensolver failed");
    return es.eigenvalues()[level + 1] - es.eigenvalues()[level];
}

namespace {

// Diagonalized generator for applying exp(i s G) per field index in
// O(dim_m^2) each: columns of the joint vector are mechanics segments.
struct BlockUnitary {
    Mat vectors;          // G = vectors * diag(values) * vectors^dag
    Eigen::VectorXd values;

    // seg <- V exp(i phase_scale * values) V^dag seg
    void apply(Eigen::Ref<Vec> seg, double phase_scale, Vec& scratch) const {
        scratch.noalias() = vectors.adjoint() * seg;
        for (int k = 0; k < values.size(); ++k)
            scratch[k] *= std::exp(cplx(0, phase_scale * values[k]));
        seg.noalias() = vectors * scratch;
    }
};

struct WeightedVector {
    double weight;
    Vec psi;  // length dim_c * dim_m, field-major
};

std::vector<std::pair<double, Vec>> spectral_ensemble(const FockDensity& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.mat);
    if (es.info() != Eigen::Success) throw EigenFailure("run_protocol: state eigensolver failed");
    std::vector<std::pair<double, Vec>> out;
    for (int k = 0; k < rho.dim(); ++k) {
        const double w = es.eigenvalues()[k];
        if (w > kEnsembleCutoff) out.emplace_back(w, es.eigenvectors().col(k));
    }
    return out;
}

}  // namespace

ProtocolRun run_protocol(const ProtocolParams& params, const PulseSequence& seq,
                         const FockDensity& field_state, Kind kind, const RunOptions& options) {
    params.validate();
    enforce_validity(params, kind);
    const int dim_c = field_state.dim();
    const int dim_m = params.dim_m;
    if (static_cast<long long>(dim_c) * dim_m > options.max_joint_dim)
        throw DimensionCap("run_protocol: joint dimension " + std::to_string(dim_c * dim_m) +
                           " exceeds cap " + std::to_string(options.max_joint_dim));

    ProtocolRun run;
    run.params = params;
    run.seq = seq;
    run.kind = kind;
    run.tau = seq.tau;

    const MechHamiltonian h =
        build_hamiltonian(kind, params.strength(kind), params.omega_m, dim_m);
    Eigen::SelfAdjointEigenSolver<Mat> es_h(h.mat);
    if (es_h.info() != Eigen::Success) throw EigenFailure("run_protocol: H eigensolver failed");
    BlockUnitary free_evo{es_h.eigenvectors(), es_h.eigenvalues()};

    Eigen::SelfAdjointEigenSolver<Mat> es_x(ladder_operators(dim_m).x);
    if (es_x.info() != Eigen::Success) throw EigenFailure("run_protocol: X eigensolver failed");
    BlockUnitary pulse{es_x.eigenvectors(), es_x.eigenvalues()};

    const FockDensity nu = thermal_density(params.nbar, dim_m, params.trunc_tol);
    const auto field_parts = spectral_ensemble(field_state);
    const auto mech_parts = spectral_ensemble(nu);

    std::vector<WeightedVector> ensemble;
    ensemble.reserve(field_parts.size() * mech_parts.size());
    for (const auto& [wf, f] : field_parts)
        for (const auto& [wm, m] : mech_parts) {
            Vec psi(dim_c * dim_m);
            for (int j = 0; j < dim_c; ++j) psi.segment(j * dim_m, dim_m) = f[j] * m;
            ensemble.push_back({wf * wm, std::move(psi)});
        }

    const double quarter = run.tau / 4.0;
    Vec scratch(dim_m);
    for (auto& member : ensemble) {
        for (int k = 0; k < 4; ++k) {
            for (int j = 0; j < dim_c; ++j)
                pulse.apply(member.psi.segment(j * dim_m, dim_m), seq.lambdas[k] * j, scratch);
            for (int j = 0; j < dim_c; ++j)
                free_evo.apply(member.psi.segment(j * dim_m, dim_m), -quarter, scratch);
        }
    }

    // Reduced field and joint state before the completion rotation; a
    // mechanics-only unitary cannot change either reduced field or trace.
    Mat rho_field = Mat::Zero(dim_c, dim_c);
    double joint_trace = 0.0;
    for (const auto& member : ensemble) {
        joint_trace += member.weight * member.psi.squaredNorm();
        Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            grid(member.psi.data(), dim_c, dim_m);
        rho_field.noalias() += member.weight * (grid * grid.adjoint());
    }
    run.reduced_field = FockDensity{std::move(rho_field)};

    // Completion rotation exp(+i H tau): the loop seen by the mechanics.
    for (auto& member : ensemble)
        for (int j = 0; j < dim_c; ++j)
            free_evo.apply(member.psi.segment(j * dim_m, dim_m), run.tau, scratch);

    Mat rho_mech = Mat::Zero(dim_m, dim_m);
    for (const auto& member : ensemble) {
        Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            grid(member.psi.data(), dim_c, dim_m);
        rho_mech.noalias() += member.weight * (grid.transpose() * grid.conjugate());
    }
    run.reduced_mech = FockDensity{std::move(rho_mech)};

    if (options.build_joint) {
        Mat joint = Mat::Zero(dim_c * dim_m, dim_c * dim_m);
        for (const auto& member : ensemble)
            joint.noalias() += member.weight * (member.psi * member.psi.adjoint());
        run.final_joint = JointState{dim_c, dim_m, std::move(joint)};
    }

    ProtocolParams map_params = params;
    map_params.dim_c = dim_c;
    const FockDensity target = effective_map(map_params, kind).apply(field_state);
    run.diagnostics["fidelity_vs_effective_map"] = fidelity(run.reduced_field, target);
    run.diagnostics["field_purity"] = purity(run.reduced_field);
    run.diagnostics["mech_return_fidelity"] = fidelity(run.reduced_mech, nu);
    run.diagnostics["joint_trace"] = joint_trace;
    return run;
}

ProtocolRun run_protocol(const ProtocolParams& params, Kind kind, const RunOptions& options) {
    double tau = options.tau_override > 0.0 ? options.tau_override : loop_period(params, kind);
    const PulseSequence seq = lossy_sequence(params.lambda, params.epsilon, tau);
    const FockDensity field =
        pure_density(coherent_vector(params.alpha, params.field_dim(), params.trunc_tol));
    return run_protocol(params, seq, field, kind, options);
}

std::vector<LossRow> loss_sweep(const ProtocolParams& params, Kind kind,
                                std::span<const double> epsilons, const RunOptions& options) {
    if (kind == Kind::harmonic)
        throw ConfigError("loss_sweep: kind must be quartic or cubic");
    std::vector<LossRow> rows;
    const int dim_c = params.field_dim();
    const FockVector alpha_vec = coherent_vector(params.alpha, dim_c, params.trunc_tol);
    const FockDensity field = pure_density(alpha_vec);
    const int n_probe = std::min(3, dim_c - 1);

    RunOptions opts = options;
    opts.build_joint = false;

    for (double eps : epsilons) {
        ProtocolParams p = params;
        p.epsilon = eps;

        const double tau_anh = loop_period(p, kind);
        const PulseSequence seq_anh = lossy_sequence(p.lambda, eps, tau_anh);
        const ProtocolRun anh = run_protocol(p, seq_anh, field, kind, opts);

        const double tau_h = 2.0 * kPi / p.omega_m;
        const PulseSequence seq_h = lossy_sequence(p.lambda, eps, tau_h);
        const ProtocolRun harm = run_protocol(p, seq_h, field, Kind::harmonic, opts);

        LossRow row;
        row.epsilon = eps;
        row.purity_harmonic = harm.diagnostics.at("field_purity");
        row.purity_anharmonic = anh.diagnostics.at("field_purity");
        row.harm_coeff_predicted = seq_h.harmonic_phase_coefficient();

        const cplx ratio = harm.reduced_field.mat(n_probe, 0) /
                           (alpha_vec.amp[n_probe] * std::conj(alpha_vec.amp[0]));
        const cplx predicted = lossy_harmonic_expectation(seq_h, p.nbar, n_probe);
        row.harm_coeff_extracted =
            row.harm_coeff_predicted +
            std::arg(ratio / predicted) / (double(n_probe) * n_probe);
        row.harm_coeff_error = std::abs(row.harm_coeff_extracted - row.harm_coeff_predicted);
        row.harm_modulus_error = std::abs(std::abs(ratio) - std::abs(predicted));

        row.anharmonic_phase =
            std::arg(mean_annihilation(anh.reduced_field) / mean_annihilation(harm.reduced_field));
        row.mech_return_fidelity = anh.diagnostics.at("mech_return_fidelity");
        rows.push_back(row);
    }
    return rows;
}

}  // namespace aprobe
