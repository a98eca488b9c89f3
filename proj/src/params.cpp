#include "aprobe/params.hpp"

#include <cmath>
#include <sstream>

#include "aprobe/errors.hpp"
#include "aprobe/fock.hpp"

namespace aprobe {

double ProtocolParams::strength(Kind kind) const {
    switch (kind) {
        case Kind::harmonic: return 0.0;
        case Kind::quartic: return gamma;
        case Kind::cubic: return delta;
    }
    return 0.0;
}

double ProtocolParams::amp_sq_effective() const {
    if (amp_sq >= 0.0) return amp_sq;
    const double a = lambda * np();
    return a * a;
}

int ProtocolParams::field_dim() const {
    return dim_c > 0 ? dim_c : coherent_dim_for(alpha);
}

void ProtocolParams::validate() const {
    if (lambda < 0.0) throw ConfigError("params.lambda must be >= 0");
    if (nbar < 0.0) throw ConfigError("params.nbar must be >= 0");
    if (omega_m <= 0.0) throw ConfigError("params.omega_m must be > 0");
    if (epsilon < 0.0 || epsilon >= 1.0) throw ConfigError("params.epsilon must be in [0, 1)");
    if (dim_c < 0 || dim_m < 1) throw ConfigError("params dimensions must be positive");
    if (trunc_tol <= 0.0 || trunc_tol >= 1.0) throw ConfigError("params.trunc_tol must be in (0, 1)");
}

bool ValidityReport::all_ok() const {
    for (const auto& f : flags)
        if (!f.ok) return false;
    return true;
}

std::string ValidityReport::to_text() const {
    std::ostringstream os;
    for (const auto& f : flags)
        os << f.name << ": " << f.value << " (" << (f.ok ? "ok" : "warn") << ") " << f.detail
           << "\n";
    return os.str();
}

ValidityReport check_validity(const ProtocolParams& p, Kind kind) {
    ValidityReport r;
    const double np = p.np();
    if (kind == Kind::quartic) {
        const double pert = std::abs(p.gamma) * p.amp_sq_effective();
        r.flags.push_back({"perturbative_quartic", pert, pert < 0.1,
                           "|gamma|*(lambda*Np)^2, must stay well below 1"});
        const double mf = std::abs(p.gamma) * std::pow(p.lambda, 4) * np * np * np;
        r.flags.push_back({"mean_field_quartic", mf, mf < 0.1,
                           "|gamma|*lambda^4*Np^3, controls the closed-form phase"});
    } else if (kind == Kind::cubic) {
        const double pert = std::abs(p.delta) * p.lambda * np;
        r.flags.push_back(
            {"perturbative_cubic", pert, pert < 0.1, "|delta|*lambda*Np, must stay well below 1"});
        const double mf = std::abs(p.delta) * std::pow(p.lambda, 3) * np * np;
        r.flags.push_back({"mean_field_cubic", mf, mf < 0.1,
                           "|delta|*lambda^3*Np^2, controls the closed-form phase"});
    }
    if (p.nbar > 0.0) {
        const double dom = p.lambda * p.lambda * np * np / std::max(p.nbar, 1e-300);
        r.flags.push_back({"thermal_dominance", dom, dom > 1.0,
                           "lambda^2*Np^2/nbar, must stay well above 1"});
    }
    if (p.epsilon > 0.0) {
        const double loss = p.epsilon * p.nbar / std::max(np, 1e-300);
        r.flags.push_back({"loss_condition", loss, loss < 1e-3,
                           "epsilon*nbar/Np, keeps losses off the anharmonic phase"});
    }
    return r;
}

void enforce_validity(const ProtocolParams& p, Kind kind) {
    if (!p.strict) return;
    const ValidityReport r = check_validity(p, kind);
    for (const auto& f : r.flags)
        if (!f.ok)
            throw PerturbationError("validity flag '" + f.name + "' failed: value " +
                                    std::to_string(f.value) + " (" + f.detail + ")");
}

}  // namespace aprobe
