#pragma once

#include <string>
#include <vector>

#include "aprobe/common.hpp"

namespace aprobe {

// All quantities are dimensionless; omega_m fixes the time unit.
struct ProtocolParams {
    double lambda = 0.1;       // rescaled pulse coupling
    double gamma = 0.0;        // quartic anharmonicity
    double delta = 0.0;        // cubic anharmonicity
    double nbar = 0.0;         // initial mean thermal phonons
    cplx alpha{2.0, 0.0};      // field amplitude
    double omega_m = 1.0;      // bare mechanical frequency
    double epsilon = 0.0;      // per-loop pulse loss fraction
    int dim_c = 0;             // field truncation; 0 = derive from alpha
    int dim_m = 30;            // mechanics truncation
    double trunc_tol = kTruncTolDefault;
    double amp_sq = -1.0;      // oscillation amplitude^2 for the frequency
                               // shift; < 0 means the default (lambda*Np)^2
    bool strict = false;       // promote validity warnings to errors

    double np() const { return std::norm(alpha); }
    double strength(Kind kind) const;
    double amp_sq_effective() const;
    int field_dim() const;

    // Throws ConfigError on structurally invalid values.
    void validate() const;
};

struct ValidityFlag {
    std::string name;
    double value = 0.0;  // dimensionless figure; small (or large) is good
    bool ok = true;
    std::string detail;
};

struct ValidityReport {
    std::vector<ValidityFlag> flags;
    bool all_ok() const;
    std::string to_text() const;
};

// Perturbative and thermal-dominance conditions for the requested kind.
// With params.strict set, a failed flag raises PerturbationError.
ValidityReport check_validity(const ProtocolParams& p, Kind kind);
void enforce_validity(const ProtocolParams& p, Kind kind);

}  // namespace aprobe
