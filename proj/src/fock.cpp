#include "aprobe/fock.hpp"

#include <algorithm>
#include <cmath>

namespace aprobe {

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::harmonic: return "harmonic";
        case Kind::quartic: return "quartic";
        case Kind::cubic: return "cubic";
    }
    return "?";
}

Kind kind_from_name(const std::string& name) {
    if (name == "harmonic") return Kind::harmonic;
    if (name == "quartic") return Kind::quartic;
    if (name == "cubic") return Kind::cubic;
    throw ConfigError("unknown kind '" + name + "' (expected harmonic, quartic or cubic)");
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

void FockVector::require_normalized(double tol) const {
    if (dim() < 1) throw DimensionMismatch("FockVector: dim must be >= 1");
    if (std::abs(norm_sq() - 1.0) > tol)
        throw NormError("FockVector: norm^2 deviates from 1 by " +
                        std::to_string(std::abs(norm_sq() - 1.0)));
}

void FockDensity::require_valid(double tol) const {
    if (dim() < 1) throw DimensionMismatch("FockDensity: dim must be >= 1");
    if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw NormError("FockDensity: not Hermitian within tolerance");
    if (std::abs(trace_real() - 1.0) > tol)
        throw NormError("FockDensity: trace deviates from 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(mat, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailure("FockDensity: eigensolver failed");
    if (es.eigenvalues().minCoeff() < -tol)
        throw NormError("FockDensity: negative eigenvalue beyond tolerance");
}

void JointState::require_valid(double tol) const {
    if (dim_c < 1 || dim_m < 1 || mat.rows() != dim_c * dim_m)
        throw DimensionMismatch("JointState: inconsistent dimensions");
    FockDensity as_density{mat};
    as_density.require_valid(tol);
}

void OperatorMatrix::require_hermitian(double tol) const {
    if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw NormError("OperatorMatrix: hermitian_flag set but matrix is not Hermitian");
}

int coherent_dim_for(cplx alpha) {
    const double np = std::norm(alpha);
    return static_cast<int>(std::ceil(np + 10.0 * std::sqrt(np + 1.0) + 10.0));
}

int thermal_dim_for(double nbar, double trunc_tol) {
    if (nbar <= 0.0) return 1;
    // tail beyond D levels is (nbar/(1+nbar))^D
    const double r = nbar / (1.0 + nbar);
    int dim = static_cast<int>(std::ceil(std::log(trunc_tol) / std::log(r))) + 2;
    return std::max(dim, 2);
}

FockVector coherent_vector(cplx alpha, int dim, double trunc_tol) {
    if (dim < 1) throw DimensionMismatch("coherent_vector: dim must be >= 1");
    Vec amp(dim);
    amp[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) amp[n] = amp[n - 1] * alpha / std::sqrt(double(n));
    const double kept = amp.squaredNorm();
    const double deficit = 1.0 - kept;
    if (deficit > trunc_tol)
        throw TruncationError("coherent_vector: truncation deficit " + std::to_string(deficit) +
                              " exceeds threshold at dim " + std::to_string(dim));
    amp /= std::sqrt(kept);
    return FockVector{std::move(amp)};
}

FockDensity thermal_density(double nbar, int dim, double trunc_tol) {
    if (dim < 1) throw DimensionMismatch("thermal_density: dim must be >= 1");
    if (nbar < 0.0) throw ConfigError("thermal_density: nbar must be >= 0");
    Mat mat = Mat::Zero(dim, dim);
    if (nbar == 0.0) {
        mat(0, 0) = 1.0;
        return FockDensity{std::move(mat)};
    }
    double kept = 0.0;
    const double r = nbar / (1.0 + nbar);
    double nu = 1.0 / (1.0 + nbar);
    for (int n = 0; n < dim; ++n) {
        mat(n, n) = nu;
        kept += nu;
        nu *= r;
    }
    if (1.0 - kept > trunc_tol)
        throw TruncationError("thermal_density: truncation deficit " + std::to_string(1.0 - kept) +
                              " exceeds threshold at dim " + std::to_string(dim));
    mat /= kept;
    return FockDensity{std::move(mat)};
}

LadderOps ladder_operators(int dim) {
    if (dim < 2) throw DimensionMismatch("ladder_operators: dim must be >= 2");
    Mat a = Mat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    const Mat ad = a.adjoint();
    LadderOps ops;
    ops.x = (ad + a) / std::sqrt(2.0);
    ops.p = cplx(0, 1) * (ad - a) / std::sqrt(2.0);
    ops.n = ad * a;
    ops.a = std::move(a);
    return ops;
}

FockVector number_vector(int n, int dim) {
    if (n < 0 || n >= dim) throw DimensionMismatch("number_vector: level outside truncation");
    Vec amp = Vec::Zero(dim);
    amp[n] = 1.0;
    return FockVector{std::move(amp)};
}

FockDensity pure_density(const FockVector& psi) {
    return FockDensity{psi.amp * psi.amp.adjoint()};
}

cplx inner(const FockVector& a, const FockVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("inner: dimension mismatch");
    return a.amp.dot(b.amp);  // Eigen's dot conjugates the left argument
}

JointState tensor(const FockDensity& field, const FockDensity& mech) {
    const int dc = field.dim(), dm = mech.dim();
    Mat out(dc * dm, dc * dm);
    for (int i = 0; i < dc; ++i)
        for (int j = 0; j < dc; ++j)
            out.block(i * dm, j * dm, dm, dm) = field.mat(i, j) * mech.mat;
    return JointState{dc, dm, std::move(out)};
}

FockDensity partial_trace_mech(const JointState& joint) {
    if (joint.mat.rows() != joint.dim_c * joint.dim_m)
        throw DimensionMismatch("partial_trace_mech: inconsistent joint dimensions");
    Mat out(joint.dim_c, joint.dim_c);
    for (int i = 0; i < joint.dim_c; ++i)
        for (int j = 0; j < joint.dim_c; ++j)
            out(i, j) = joint.mat.block(i * joint.dim_m, j * joint.dim_m, joint.dim_m, joint.dim_m)
                            .trace();
    return FockDensity{std::move(out)};
}

FockDensity partial_trace_field(const JointState& joint) {
    if (joint.mat.rows() != joint.dim_c * joint.dim_m)
        throw DimensionMismatch("partial_trace_field: inconsistent joint dimensions");
    Mat out = Mat::Zero(joint.dim_m, joint.dim_m);
    for (int i = 0; i < joint.dim_c; ++i)
        out += joint.mat.block(i * joint.dim_m, i * joint.dim_m, joint.dim_m, joint.dim_m);
    return FockDensity{std::move(out)};
}

OperatorMatrix unitary_from_hermitian(const OperatorMatrix& h, double t) {
    if (!h.hermitian) throw NormError("unitary_from_hermitian: hermitian_flag not set");
    Eigen::SelfAdjointEigenSolver<Mat> es(h.mat);
    if (es.info() != Eigen::Success) throw EigenFailure("unitary_from_hermitian: eigensolver failed");
    const auto& e = es.eigenvalues();
    Vec phases(e.size());
    for (int k = 0; k < e.size(); ++k) phases[k] = std::exp(cplx(0, -e[k] * t));
    Mat u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return OperatorMatrix{std::move(u), false};
}

double purity(const FockDensity& rho) {
    return (rho.mat * rho.mat).trace().real();
}

cplx mean_annihilation(const FockDensity& rho) {
    cplx acc = 0.0;
    for (int n = 0; n + 1 < rho.dim(); ++n)
        acc += std::sqrt(double(n + 1)) * rho.mat(n + 1, n);
    return acc;
}

namespace {

Mat hermitian_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    if (es.info() != Eigen::Success) throw EigenFailure("fidelity: eigensolver failed");
    Eigen::VectorXd e = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * e.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const FockDensity& rho, const FockDensity& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionMismatch("fidelity: dimension mismatch");
    // Pure shortcut: F = <psi| sigma |psi>.
    const double pr = purity(rho);
    const double ps = purity(sigma);
    if (pr > 1.0 - 1e-12 || ps > 1.0 - 1e-12) {
        const FockDensity& pure = (pr >= ps) ? rho : sigma;
        const FockDensity& other = (pr >= ps) ? sigma : rho;
        Eigen::SelfAdjointEigenSolver<Mat> es(pure.mat);
        if (es.info() != Eigen::Success) throw EigenFailure("fidelity: eigensolver failed");
        const int top = static_cast<int>(es.eigenvalues().size()) - 1;
        Vec psi = es.eigenvectors().col(top);
        double f = (psi.adjoint() * other.mat * psi)(0, 0).real();
        return std::clamp(f, 0.0, 1.0);
    }
    const Mat s = hermitian_sqrt(rho.mat);
    Eigen::SelfAdjointEigenSolver<Mat> es(s * sigma.mat * s, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailure("fidelity: eigensolver failed");
    double root_sum = 0.0;
    for (int k = 0; k < es.eigenvalues().size(); ++k)
        root_sum += std::sqrt(std::max(0.0, es.eigenvalues()[k]));
    return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

}  // namespace aprobe
