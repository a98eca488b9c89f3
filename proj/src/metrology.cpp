#include "aprobe/metrology.hpp"

#include <algorithm>
#include <cmath>

#include "aprobe/fock.hpp"

namespace aprobe {

namespace {

constexpr double kPdfFloor = 1e-300;  // below this, (dp)^2/p contributes zero
constexpr double kHomodyneMass = 1e-8;
constexpr double kHeterodyneMass = 1e-6;

}  // namespace

const char* scheme_name(Scheme s) {
    return s == Scheme::homodyne ? "homodyne" : "heterodyne";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "homodyne") return Scheme::homodyne;
    if (name == "heterodyne") return Scheme::heterodyne;
    throw ConfigError("unknown measurement scheme '" + name + "'");
}

MeasurementConfig resolve_config(MeasurementConfig cfg, const ProtocolParams& p) {
    const double amp = std::abs(p.alpha);
    if (cfg.x_grid.lo == cfg.x_grid.hi) {
        const double half = std::sqrt(2.0) * amp + 8.0;
        cfg.x_grid.lo = -half;
        cfg.x_grid.hi = half;
    }
    if (cfg.x_grid.points < 3 || cfg.x_grid.points % 2 == 0)
        throw ConfigError("measurement.x_points must be odd and >= 3");
    if (cfg.eta_grid.radius <= 0.0) cfg.eta_grid.radius = amp + 8.0;
    if (cfg.eta_grid.radial < 3 || cfg.eta_grid.radial % 2 == 0)
        throw ConfigError("measurement.eta_radial must be odd and >= 3");
    if (cfg.eta_grid.angular < 8) throw ConfigError("measurement.eta_angular must be >= 8");
    return cfg;
}

FockVector state_vector(const ProtocolParams& p, Kind kind) {
    return effective_map(p, kind).apply(coherent_vector(p.alpha, p.field_dim(), p.trunc_tol));
}

FockVector state_derivative(const ProtocolParams& p, Kind kind) {
    const EffectiveKerrMap map = effective_map(p, kind);
    FockVector psi = map.apply(coherent_vector(p.alpha, p.field_dim(), p.trunc_tol));
    for (int n = 0; n < psi.dim(); ++n) psi.amp[n] *= cplx(0, map.dtheta[n]);
    return psi;
}

double qfi_pure(const FockVector& psi, const FockVector& dpsi) {
    psi.require_normalized();
    if (psi.dim() != dpsi.dim()) throw DimensionMismatch("qfi_pure: dimension mismatch");
    const double dd = dpsi.norm_sq();
    const cplx overlap = dpsi.amp.dot(psi.amp);
    return std::max(0.0, 4.0 * (dd - std::norm(overlap)));
}

double qfi_numeric(const ProtocolParams& p, Kind kind) {
    return qfi_pure(state_vector(p, kind), state_derivative(p, kind));
}

double qfi_quartic_closed(double lambda, double np) {
    const double poly = np * (np * (np * (np * (np * (np * (16.0 * np + 216.0) + 964.0) + 1640.0) +
                                        952.0) +
                                  126.0) +
                              1.0);
    return std::pow(lambda, 8) * poly;
}

double qfi_cubic_closed(double lambda, double np) {
    const double poly = np * (np * (np * (np * (9.0 * np + 54.0) + 84.0) + 30.0) + 1.0);
    return (16.0 / 81.0) * std::pow(lambda, 6) * poly;
}

void oscillator_wavefunctions(double x, int dim, std::span<double> out) {
    out[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    if (dim > 1) out[1] = std::sqrt(2.0) * x * out[0];
    for (int m = 2; m < dim; ++m)
        out[m] = x * std::sqrt(2.0 / m) * out[m - 1] - std::sqrt((m - 1.0) / m) * out[m - 2];
}

std::vector<double> simpson_weights(int points, double step) {
    std::vector<double> w(points, 0.0);
    const double h3 = step / 3.0;
    w[0] = h3;
    w[points - 1] = h3;
    for (int i = 1; i + 1 < points; ++i) w[i] = (i % 2 == 1 ? 4.0 : 2.0) * h3;
    return w;
}

HomodyneTable::HomodyneTable(const MeasurementConfig& cfg_in, const ProtocolParams& p, Kind kind) {
    const MeasurementConfig cfg = resolve_config(cfg_in, p);
    const EffectiveKerrMap map = effective_map(p, kind);
    c_ = map.apply(coherent_vector(p.alpha, p.field_dim(), p.trunc_tol)).amp;
    dtheta_ = map.dtheta;

    const int points = cfg.x_grid.points;
    const double step = (cfg.x_grid.hi - cfg.x_grid.lo) / (points - 1);
    x_.resize(points);
    for (int i = 0; i < points; ++i) x_[i] = cfg.x_grid.lo + i * step;
    simpson_ = simpson_weights(points, step);

    psi_.resize(points, dim());
    std::vector<double> row(dim());
    for (int i = 0; i < points; ++i) {
        oscillator_wavefunctions(x_[i], dim(), row);
        for (int m = 0; m < dim(); ++m) psi_(i, m) = row[m];
    }
}

void HomodyneTable::tabulate(double phi, std::vector<double>& pdf,
                             std::vector<double>* dpdf) const {
    const int d = dim();
    Eigen::VectorXd cr(d), ci(d), dr(d), di(d);
    for (int m = 0; m < d; ++m) {
        const cplx rot = c_[m] * std::exp(cplx(0, -phi * m));
        cr[m] = rot.real();
        ci[m] = rot.imag();
        const cplx drot = rot * cplx(0, dtheta_[m]);
        dr[m] = drot.real();
        di[m] = drot.imag();
    }
    const Eigen::VectorXd o_re = psi_ * cr;
    const Eigen::VectorXd o_im = psi_ * ci;
    const int points = static_cast<int>(x_.size());
    pdf.resize(points);
    for (int i = 0; i < points; ++i) pdf[i] = o_re[i] * o_re[i] + o_im[i] * o_im[i];
    if (dpdf) {
        const Eigen::VectorXd d_re = psi_ * dr;
        const Eigen::VectorXd d_im = psi_ * di;
        dpdf->resize(points);
        for (int i = 0; i < points; ++i)
            (*dpdf)[i] = 2.0 * (o_re[i] * d_re[i] + o_im[i] * d_im[i]);
    }
}

double HomodyneTable::mass(double phi) const {
    std::vector<double> pdf;
    tabulate(phi, pdf, nullptr);
    std::vector<double> terms(pdf.size());
    for (size_t i = 0; i < pdf.size(); ++i) terms[i] = simpson_[i] * pdf[i];
    return pairwise_sum(terms);
}

double HomodyneTable::fisher(double phi) const {
    std::vector<double> pdf, dpdf;
    tabulate(phi, pdf, &dpdf);
    std::vector<double> mass_terms(pdf.size()), fi_terms(pdf.size());
    for (size_t i = 0; i < pdf.size(); ++i) {
        mass_terms[i] = simpson_[i] * pdf[i];
        fi_terms[i] = pdf[i] > kPdfFloor ? simpson_[i] * dpdf[i] * dpdf[i] / pdf[i] : 0.0;
    }
    const double mass = pairwise_sum(mass_terms);
    if (mass < 1.0 - kHomodyneMass)
        throw GridCoverageError("fisher_homodyne: grid covers only " + std::to_string(mass) +
                                " of the outcome probability");
    return pairwise_sum(fi_terms);
}

double HomodyneTable::pdf_at(double x, double phi) const {
    const int d = dim();
    std::vector<double> row(d);
    oscillator_wavefunctions(x, d, row);
    cplx o = 0.0;
    for (int m = 0; m < d; ++m) o += c_[m] * std::exp(cplx(0, -phi * m)) * row[m];
    return std::norm(o);
}

double homodyne_pdf(double x, const MeasurementConfig& cfg, const ProtocolParams& p, Kind kind) {
    const MeasurementConfig r = resolve_config(cfg, p);
    const EffectiveKerrMap map = effective_map(p, kind);
    const Vec c = map.apply(coherent_vector(p.alpha, p.field_dim(), p.trunc_tol)).amp;
    std::vector<double> row(c.size());
    oscillator_wavefunctions(x, static_cast<int>(c.size()), row);
    cplx o = 0.0;
    for (int m = 0; m < c.size(); ++m) o += c[m] * std::exp(cplx(0, -r.phi * m)) * row[m];
    return std::norm(o);
}

double homodyne_pdf_dtheta(double x, const MeasurementConfig& cfg, const ProtocolParams& p,
                           Kind kind) {
    const MeasurementConfig r = resolve_config(cfg, p);
    const EffectiveKerrMap map = effective_map(p, kind);
    const Vec c = map.apply(coherent_vector(p.alpha, p.field_dim(), p.trunc_tol)).amp;
    std::vector<double> row(c.size());
    oscillator_wavefunctions(x, static_cast<int>(c.size()), row);
    cplx o = 0.0, do_ = 0.0;
    for (int m = 0; m < c.size(); ++m) {
        const cplx term = c[m] * std::exp(cplx(0, -r.phi * m)) * row[m];
        o += term;
        do_ += term * cplx(0, map.dtheta[m]);
    }
    return 2.0 * (std::conj(o) * do_).real();
}

double homodyne_pdf_density(double x, const FockDensity& rho, double phi) {
    const int d = rho.dim();
    std::vector<double> row(d);
    oscillator_wavefunctions(x, d, row);
    Vec g(d);
    for (int m = 0; m < d; ++m) g[m] = row[m] * std::exp(cplx(0, -phi * m));
    const cplx val = (g.transpose() * (rho.mat * g.conjugate()))(0, 0);
    return std::max(0.0, val.real());
}

double fisher_homodyne(const MeasurementConfig& cfg, const ProtocolParams& p, Kind kind) {
    const MeasurementConfig r = resolve_config(cfg, p);
    return HomodyneTable(r, p, kind).fisher(r.phi);
}

namespace {

// Golden-section maximization; deterministic, returns (argmax, max).
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol, int max_iter) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
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
    }
    return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

std::pair<double, double> optimize_phase(const ProtocolParams& p, Kind kind,
                                         std::span<const double> phi_grid) {
    if (phi_grid.empty()) throw ConfigError("optimize_phase: empty phase grid");
    MeasurementConfig cfg;
    cfg = resolve_config(cfg, p);
    const HomodyneTable table(cfg, p, kind);

    int best = 0;
    std::vector<double> fi(phi_grid.size());
    for (size_t i = 0; i < phi_grid.size(); ++i) {
        fi[i] = table.fisher(phi_grid[i]);
        if (fi[i] > fi[best]) best = static_cast<int>(i);  // ties keep the smaller phi
    }
    const double lo = best > 0 ? phi_grid[best - 1] : phi_grid[best];
    const double hi = best + 1 < static_cast<int>(phi_grid.size()) ? phi_grid[best + 1]
                                                                   : phi_grid[best];
    double phi_star = phi_grid[best];
    double fi_star = fi[best];
    if (hi > lo) {
        auto [phi_g, fi_g] =
            golden_max([&](double phi) { return table.fisher(phi); }, lo, hi, 1e-7, 200);
        if (fi_g > fi_star) {
            phi_star = phi_g;
            fi_star = fi_g;
        }
    }
    return {phi_star, fi_star};
}

std::pair<double, double> optimize_phase(const ProtocolParams& p, Kind kind, int coarse_points) {
    std::vector<double> grid(coarse_points);
    for (int i = 0; i < coarse_points; ++i) grid[i] = i * kPi / coarse_points;
    return optimize_phase(p, kind, grid);
}

double heterodyne_pdf(cplx eta, const ProtocolParams& p, Kind kind) {
    const Vec c = state_vector(p, kind).amp;
    cplx t = std::exp(-0.5 * std::norm(eta));
    cplx f = c[0] * t;
    const cplx eta_conj = std::conj(eta);
    for (int m = 1; m < c.size(); ++m) {
        t *= eta_conj / std::sqrt(double(m));
        f += c[m] * t;
    }
    return std::norm(f);
}

double fisher_heterodyne(const MeasurementConfig& cfg_in, const ProtocolParams& p, Kind kind) {
    const MeasurementConfig cfg = resolve_config(cfg_in, p);
    const EffectiveKerrMap map = effective_map(p, kind);
    const Vec c = map.apply(coherent_vector(p.alpha, p.field_dim(), p.trunc_tol)).amp;
    const int d = static_cast<int>(c.size());

    const int nr = cfg.eta_grid.radial;
    const int na = cfg.eta_grid.angular;
    const double dr = cfg.eta_grid.radius / (nr - 1);
    const std::vector<double> wr = simpson_weights(nr, dr);
    const double dth = 2.0 * kPi / na;

    std::vector<double> mass_terms, fi_terms;
    mass_terms.reserve(size_t(nr) * na);
    fi_terms.reserve(size_t(nr) * na);
    for (int i = 0; i < nr; ++i) {
        const double r = i * dr;
        const double gauss = std::exp(-0.5 * r * r);
        for (int j = 0; j < na; ++j) {
            const double th = j * dth;
            const cplx eta_conj = std::polar(r, -th);
            cplx t = gauss;
            cplx f = c[0] * t, df = c[0] * t * cplx(0, map.dtheta[0]);
            for (int m = 1; m < d; ++m) {
                t *= eta_conj / std::sqrt(double(m));
                const cplx term = c[m] * t;
                f += term;
                df += term * cplx(0, map.dtheta[m]);
            }
            const double pdf = std::norm(f);
            const double dpdf = 2.0 * (std::conj(f) * df).real();
            const double w = wr[i] * r * dth / kPi;
            mass_terms.push_back(w * pdf);
            fi_terms.push_back(pdf > kPdfFloor ? w * dpdf * dpdf / pdf : 0.0);
        }
    }
    const double mass = pairwise_sum(mass_terms);
    if (mass < 1.0 - kHeterodyneMass)
        throw GridCoverageError("fisher_heterodyne: grid covers only " + std::to_string(mass) +
                                " of the outcome probability");
    return pairwise_sum(fi_terms);
}

double fisher_heterodyne(const ProtocolParams& p, Kind kind) {
    MeasurementConfig cfg;
    cfg.scheme = Scheme::heterodyne;
    return fisher_heterodyne(cfg, p, kind);
}

double cramer_rao(double info, double m) {
    if (m < 1.0) throw ConfigError("cramer_rao: M must be >= 1");
    if (!(info > 0.0)) throw ZeroInformation("cramer_rao: Fisher information must be positive");
    return 1.0 / (m * info);
}

double snr_bound(double value, double qfi, double m) {
    if (m < 1.0) throw ConfigError("snr_bound: M must be >= 1");
    return value * value * m * qfi;
}

FisherReport fisher_report(const ProtocolParams& p, const MeasurementConfig& cfg_in, Kind kind,
                           double m) {
    const MeasurementConfig cfg = resolve_config(cfg_in, p);
    FisherReport rep;
    rep.parameter_kind = kind;
    rep.scheme = cfg.scheme;
    rep.phi = cfg.phi;
    rep.m = m;
    rep.qfi = qfi_numeric(p, kind);
    rep.fi = cfg.scheme == Scheme::homodyne ? fisher_homodyne(cfg, p, kind)
                                            : fisher_heterodyne(cfg, p, kind);
    rep.ratio = rep.qfi > 0.0 ? rep.fi / rep.qfi : 0.0;
    rep.crb_var = rep.qfi > 0.0 ? 1.0 / (m * rep.qfi) : std::numeric_limits<double>::infinity();
    rep.snr = snr_bound(p.strength(kind), rep.qfi, m);
    return rep;
}

}  // namespace aprobe
