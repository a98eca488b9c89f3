#pragma once

#include "aprobe/common.hpp"
#include "aprobe/errors.hpp"

namespace aprobe {

/// Pure state over a truncated number basis.
struct FockVector {
    Vec amp;

    int dim() const { return static_cast<int>(amp.size()); }
    double norm_sq() const { return amp.squaredNorm(); }
    void require_normalized(double tol = kNormTol) const;
};

/// Density matrix over a truncated number basis.
struct FockDensity {
    Mat mat;

    int dim() const { return static_cast<int>(mat.rows()); }
    double trace_real() const { return mat.trace().real(); }
    // Hermiticity, unit trace and positivity within tolerance.
    void require_valid(double tol = kNormTol) const;
};

// Density matrix on a field (x) mechanics product space. Index ordering is
// field-major and fixed: joint index = c * dim_m + m. All composition goes
// through tensor()/partial_trace_*; nothing else does raw index math.
struct JointState {
    int dim_c = 0;
    int dim_m = 0;
    Mat mat;

    void require_valid(double tol = kNormTol) const;
};

struct OperatorMatrix {
    Mat mat;
    bool hermitian = false;

    int dim() const { return static_cast<int>(mat.rows()); }
    void require_hermitian(double tol = kHermTol) const;
};

struct LadderOps {
    Mat a;  // annihilation
    Mat x;  // (a^dag + a)/sqrt(2)
    Mat p;  // i(a^dag - a)/sqrt(2)
    Mat n;  // a^dag a
};

/// Truncation dimension that keeps the Poisson tail of |alpha> negligible.
int coherent_dim_for(cplx alpha);
/// Same for a thermal state with mean occupation nbar.
int thermal_dim_for(double nbar, double trunc_tol = kTruncTolDefault);

/// Coherent state |alpha> on dim levels. Throws TruncationError if the
/// neglected tail exceeds trunc_tol; otherwise renormalizes the kept levels.
FockVector coherent_vector(cplx alpha, int dim, double trunc_tol = kTruncTolDefault);

/// Thermal (Gibbs) state, diagonal nu_n = nbar^n/(1+nbar)^(n+1), renormalized.
FockDensity thermal_density(double nbar, int dim, double trunc_tol = kTruncTolDefault);

LadderOps ladder_operators(int dim);

FockVector number_vector(int n, int dim);
FockDensity pure_density(const FockVector& psi);

cplx inner(const FockVector& a, const FockVector& b);

JointState tensor(const FockDensity& field, const FockDensity& mech);
FockDensity partial_trace_mech(const JointState& joint);
FockDensity partial_trace_field(const JointState& joint);

/// exp(-i H t) through eigendecomposition; requires h.hermitian.
OperatorMatrix unitary_from_hermitian(const OperatorMatrix& h, double t);

/// Uhlmann fidelity, squared-overlap convention: F(|psi>,|phi>) = |<psi|phi>|^2.
double fidelity(const FockDensity& rho, const FockDensity& sigma);
double purity(const FockDensity& rho);

/// Tr[a rho].
cplx mean_annihilation(const FockDensity& rho);

}  // namespace aprobe
