#pragma once

#include <span>
#include <utility>
#include <vector>

#include "aprobe/dynamics.hpp"
#include "aprobe/params.hpp"

namespace aprobe {

enum class Scheme { homodyne, heterodyne };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int points = 4001;  // composite Simpson needs an odd count
};

struct PolarGridSpec {
    double radius = 0.0;
    int radial = 601;
    int angular = 256;
};

struct MeasurementConfig {
    Scheme scheme = Scheme::homodyne;
    double phi = kPi / 2.0;
    GridSpec x_grid;         // lo == hi means: derive from alpha
    PolarGridSpec eta_grid;  // radius == 0 means: derive from alpha
};

/// Fills in grid defaults for the given state amplitude.
MeasurementConfig resolve_config(MeasurementConfig cfg, const ProtocolParams& p);

struct FisherReport {
    Kind parameter_kind = Kind::quartic;
    Scheme scheme = Scheme::homodyne;
    double phi = 0.0;
    double qfi = 0.0;
    double fi = 0.0;
    double ratio = 0.0;     // fi/qfi
    double crb_var = 0.0;   // 1/(M * qfi)
    double snr = 0.0;       // strength^2 * M * qfi
    double m = 1.0;
};

/// Map-evolved coherent state and its parameter derivative i * dtheta * psi.
FockVector state_vector(const ProtocolParams& p, Kind kind);
FockVector state_derivative(const ProtocolParams& p, Kind kind);

/// 4 (<dpsi|dpsi> - |<dpsi|psi>|^2); psi must be normalized.
double qfi_pure(const FockVector& psi, const FockVector& dpsi);
/// QFI of the effective-map state computed from the analytic generator.
double qfi_numeric(const ProtocolParams& p, Kind kind);

double qfi_quartic_closed(double lambda, double np);
double qfi_cubic_closed(double lambda, double np);

double homodyne_pdf(double x, const MeasurementConfig& cfg, const ProtocolParams& p, Kind kind);
double homodyne_pdf_dtheta(double x, const MeasurementConfig& cfg, const ProtocolParams& p,
                           Kind kind);
/// Homodyne distribution of an arbitrary field density matrix.
double homodyne_pdf_density(double x, const FockDensity& rho, double phi);

double fisher_homodyne(const MeasurementConfig& cfg, const ProtocolParams& p, Kind kind);

/// Coarse scan plus golden-section refinement of the homodyne phase.
std::pair<double, double> optimize_phase(const ProtocolParams& p, Kind kind,
                                         std::span<const double> phi_grid);
std::pair<double, double> optimize_phase(const ProtocolParams& p, Kind kind, int coarse_points = 24);

double heterodyne_pdf(cplx eta, const ProtocolParams& p, Kind kind);
double fisher_heterodyne(const ProtocolParams& p, Kind kind);
double fisher_heterodyne(const MeasurementConfig& cfg, const ProtocolParams& p, Kind kind);

double cramer_rao(double info, double m);
double snr_bound(double value, double qfi, double m);

FisherReport fisher_report(const ProtocolParams& p, const MeasurementConfig& cfg, Kind kind,
                           double m);

// Tabulated homodyne model over the measurement grid; reused by the Fisher
// quadrature, the phase optimizer and the sampling layer.
class HomodyneTable {
public:
    HomodyneTable(const MeasurementConfig& cfg, const ProtocolParams& p, Kind kind);

    const std::vector<double>& grid() const { return x_; }
    // pdf and its parameter derivative at every grid point for phase phi
    void tabulate(double phi, std::vector<double>& pdf, std::vector<double>* dpdf) const;
    double fisher(double phi) const;
    double mass(double phi) const;
    int dim() const { return static_cast<int>(c_.size()); }
    // log-likelihood pieces for a single outcome
    double pdf_at(double x, double phi) const;

private:
    std::vector<double> x_;
    std::vector<double> simpson_;
    Eigen::MatrixXd psi_;  // wavefunctions, points x dim
    Vec c_;
    std::vector<double> dtheta_;
};

/// L^2-normalized oscillator wavefunctions psi_m(x) for m < dim.
void oscillator_wavefunctions(double x, int dim, std::span<double> out);

/// Simpson weights for an odd-length uniform grid.
std::vector<double> simpson_weights(int points, double step);

}  // namespace aprobe
