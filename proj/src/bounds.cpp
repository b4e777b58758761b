#include "qadvlab/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qadvlab/qmath.hpp"
#include "qadvlab/rng.hpp"

namespace qadvlab::bounds {

namespace {

// Compensated (Kahan) accumulator so reduction order never leaks into results.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

McEstimate reduce_draws(const std::vector<double>& values) {
    KahanSum sum;
    for (double v : values) sum.add(v);
    const int n = static_cast<int>(values.size());
    const double mean = sum.value() / n;
    KahanSum sq;
    for (double v : values) sq.add((v - mean) * (v - mean));
    McEstimate out;
    out.mean = mean;
    out.n_draws = n;
    out.stderr = n > 1 ? std::sqrt(std::max(0.0, sq.value() / (n - 1)) / n) : 0.0;
    return out;
}

} // namespace

void BoundConfig::validate() const {
    require(b > 0.0, ErrorCode::ConfigError, "bounds: b must be > 0");
    require(epsilon >= 0.0, ErrorCode::ConfigError, "bounds: epsilon must be >= 0");
    require(m >= 1, ErrorCode::ConfigError, "bounds: m must be >= 1");
    require(d >= 1, ErrorCode::ConfigError, "bounds: d must be >= 1");
    require(d_h >= 1, ErrorCode::ConfigError, "bounds: d_H must be >= 1");
    require(l_layers >= 1, ErrorCode::ConfigError, "bounds: L must be >= 1");
    require(k_classes >= 2, ErrorCode::ConfigError, "bounds: K must be >= 2");
    require(gamma > 0.0, ErrorCode::ConfigError, "bounds: gamma must be > 0");
    require(min_x_norm > 0.0, ErrorCode::ConfigError, "bounds: min_x_norm must be > 0");
    require(delta_conf > 0.0 && delta_conf < 1.0, ErrorCode::ConfigError,
            "bounds: delta_conf must lie in (0,1)");
    require(b_loss > 0.0, ErrorCode::ConfigError, "bounds: B_loss must be > 0");
    require(eta > 0.0, ErrorCode::ConfigError, "bounds: eta must be > 0");
}

std::string variant_name(ExcessVariant v) { return v == ExcessVariant::Prop1 ? "prop1" : "appendix"; }

ExcessVariant variant_from_name(const std::string& name) {
    if (name == "prop1") return ExcessVariant::Prop1;
    if (name == "appendix") return ExcessVariant::Appendix;
    fail(ErrorCode::ConfigError, "unknown excess variant: " + name);
}

void BoundReport::check_finite() const {
    for (double v : {rc_bound, excess_scaled, arc_bound, pac_slack, assembled_generalization_bound})
        require(std::isfinite(v) && v >= 0.0, ErrorCode::NumericalFailure,
                "BoundReport: non-finite or negative entry");
}

std::string BoundReport::to_json() const {
    nlohmann::json j;
    j["rc_bound"] = rc_bound;
    j["excess_scaled"] = excess_scaled;
    j["arc_bound"] = arc_bound;
    j["pac_slack"] = pac_slack;
    j["assembled_generalization_bound"] = assembled_generalization_bound;
    nlohmann::json prov = nlohmann::json::array();
    for (const auto& [thm, formula] : provenance) prov.push_back({{"theorem", thm}, {"formula", formula}});
    j["provenance"] = prov;
    return j.dump(2);
}

namespace {

void check_thm2_order(const SchattenOrder& r) {
    if (!r.is_inf())
        require(r.value() == 1.0 || r.value() >= 2.0, ErrorCode::UnsupportedOrder,
                "rc_bound_thm2: the theorem covers r in {1} u [2, inf]; r in (1,2) unsupported");
}

// Second-moment eigenvalues clamped at the PSD tolerance; values at the
// numerical noise floor are exact zeros of the rank-deficient S2, so they are
// zeroed before the square root amplifies them.
std::vector<double> sqrt_eigs(std::vector<double> eigs) {
    double top = 0.0;
    for (double l : eigs) top = std::max(top, l);
    const double floor = 1e-12 * std::max(1.0, top);
    for (double& l : eigs) {
        require(l >= -tols().psd, ErrorCode::NumericalFailure,
                "rc_bound_thm2: second-moment matrix has a negative eigenvalue");
        l = l <= floor ? 0.0 : std::sqrt(l);
    }
    return eigs;
}

double khintchine_constant(double beta) { return std::pow(2.0, -0.25) * std::sqrt(M_PI * beta / M_E); }

// Theorem 2 cases from the eigenvalues of S2 = sum_i rho_i^2.
double rc_from_s2_eigs(const std::vector<double>& s2_eigs, const BoundConfig& cfg) {
    const double scale = cfg.b / static_cast<double>(cfg.m);
    if (!cfg.r.is_inf() && cfg.r.value() == 1.0) {
        double top = 0.0;
        for (double l : s2_eigs) top = std::max(top, std::abs(l));
        return scale * std::sqrt(2.0 * std::log(static_cast<double>(cfg.d_h)) * top);
    }
    const std::vector<double> roots = sqrt_eigs(s2_eigs);
    if (cfg.r.is_inf())
        return scale * qmath::schatten_norm_from_eigs(roots, SchattenOrder(1.0));
    const double beta = cfg.r.value() / (cfg.r.value() - 1.0);
    return scale * khintchine_constant(beta) *
           qmath::schatten_norm_from_eigs(roots, SchattenOrder(beta));
}

} // namespace

double rc_bound_thm2(const std::vector<DensityMatrix>& states, const BoundConfig& cfg) {
    cfg.validate();
    check_thm2_order(cfg.r);
    require(!states.empty() && static_cast<int>(states.size()) == cfg.m, ErrorCode::InvalidArgument,
            "rc_bound_thm2: dataset size must equal cfg.m");
    const std::size_t n = states.front().dim();
    CMatrix s2(n);
    for (const DensityMatrix& rho : states) s2 += rho.mat() * rho.mat();
    const auto ed = qmath::eigh(HermitianMatrix(s2.symmetrized()));
    return rc_from_s2_eigs(ed.eigenvalues, cfg);
}

namespace {

// Gram matrix of unit vectors; nonzero spectrum of sum_i c_i psi_i psi_i^dag
// equals the spectrum of G^{1/2} diag(c) G^{1/2}.
CMatrix gram_matrix(const std::vector<sv::State>& states) {
    const std::size_t m = states.size();
    CMatrix g(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) g(i, j) = sv::inner(states[i], states[j]);
    return g;
}

CMatrix psd_sqrt(const CMatrix& h) {
    const auto ed = qmath::eigh(HermitianMatrix(h.symmetrized()));
    const std::size_t n = h.dim();
    CMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += ed.eigenvectors(i, k) * std::sqrt(std::max(0.0, ed.eigenvalues[k])) *
                     std::conj(ed.eigenvectors(j, k));
            out(i, j) = s;
        }
    return out;
}

} // namespace

double rc_bound_thm2_pure(const std::vector<sv::State>& states, const BoundConfig& cfg) {
    cfg.validate();
    check_thm2_order(cfg.r);
    require(!states.empty() && static_cast<int>(states.size()) == cfg.m, ErrorCode::InvalidArgument,
            "rc_bound_thm2_pure: dataset size must equal cfg.m");
    // For pure states rho_i^2 = rho_i, so S2 = Psi Psi^dag and its nonzero
    // eigenvalues are those of the Gram matrix; missing zeros contribute
    // nothing to any of the three cases.
    const auto ed = qmath::eigh(HermitianMatrix(gram_matrix(states).symmetrized()));
    return rc_from_s2_eigs(ed.eigenvalues, cfg);
}

McEstimate mc_rc_estimate(const std::vector<DensityMatrix>& states, const std::vector<int>& labels,
                          const BoundConfig& cfg, int n_draws, std::uint64_t seed) {
    cfg.validate();
    require(n_draws >= 1, ErrorCode::InvalidArgument, "mc_rc_estimate: n_draws must be >= 1");
    require(static_cast<int>(states.size()) == cfg.m, ErrorCode::InvalidArgument,
            "mc_rc_estimate: dataset size must equal cfg.m");
    (void)labels; // sigma_i y_i = sigma_i in distribution
    const SchattenOrder dual = qmath::dual_order(cfg.r);
    const std::size_t n = states.front().dim();
    std::vector<double> values(n_draws);
    for (int t = 0; t < n_draws; ++t) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t));
        CMatrix acc(n);
        for (const DensityMatrix& rho : states) {
            const double s = rng.rademacher();
            CMatrix term = rho.mat();
            term *= cplx(s, 0.0);
            acc += term;
        }
        values[t] = cfg.b / cfg.m * qmath::schatten_norm(HermitianMatrix(acc.symmetrized()), dual);
    }
    return reduce_draws(values);
}

McEstimate mc_rc_estimate_pure(const std::vector<sv::State>& states, const std::vector<int>& labels,
                               const BoundConfig& cfg, int n_draws, std::uint64_t seed) {
    cfg.validate();
    require(n_draws >= 1, ErrorCode::InvalidArgument, "mc_rc_estimate: n_draws must be >= 1");
    require(static_cast<int>(states.size()) == cfg.m, ErrorCode::InvalidArgument,
            "mc_rc_estimate: dataset size must equal cfg.m");
    (void)labels;
    const SchattenOrder dual = qmath::dual_order(cfg.r);
    const std::size_t m = states.size();
    const CMatrix root = psd_sqrt(gram_matrix(states));
    std::vector<double> values(n_draws);
    for (int t = 0; t < n_draws; ++t) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t));
        std::vector<double> sigma(m);
        for (double& s : sigma) s = rng.rademacher();
        // G^{1/2} diag(sigma) G^{1/2}, an m x m proxy with the same spectrum.
        CMatrix small(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < m; ++k) s += root(i, k) * sigma[k] * root(k, j);
                small(i, j) = s;
            }
        values[t] =
            cfg.b / cfg.m * qmath::schatten_norm(HermitianMatrix(small.symmetrized()), dual);
    }
    return reduce_draws(values);
}

double excess_classical_prop1(const BoundConfig& cfg, embed::Family family, ExcessVariant variant) {
    cfg.validate();
    if (cfg.epsilon == 0.0) return 0.0;
    const double d = static_cast<double>(cfg.d);
    const double l = static_cast<double>(cfg.l_layers);
    const double eps = cfg.epsilon;
    const double inv_p = cfg.p.reciprocal();

    switch (family) {
        case embed::Family::Amplitude: {
            if (variant == ExcessVariant::Prop1) {
                double ceil_log = std::ceil(std::log2(d));
                const double prefactor = std::pow(2.0, 1.0 + ceil_log);
                const double ratio =
                    eps * std::max(1.0, std::pow(d, 0.5 - inv_p)) / cfg.min_x_norm;
                return prefactor * std::min(ratio, 1.0);
            }
            const double ratio = eps * std::max(d, std::pow(d, 1.5 - inv_p)) / cfg.min_x_norm;
            return 2.0 * std::min(ratio, d);
        }
        case embed::Family::Angle:
        case embed::Family::LLayerAngle: {
            const double base = variant == ExcessVariant::Prop1 ? 2.0 * eps : eps;
            return 2.0 * l * std::pow(base, d) * std::pow(d, -d * inv_p);
        }
        case embed::Family::Dense:
        case embed::Family::LLayerDense: {
            const double base =
                (variant == ExcessVariant::Prop1 ? 2.0 : 1.0) * std::sqrt(2.0) * eps;
            const double dim_factor =
                std::max(std::pow(d, -d / 4.0), std::pow(d, -d * inv_p / 2.0));
            return 2.0 * l * std::pow(base, d / 2.0) * dim_factor;
        }
    }
    fail(ErrorCode::InvalidArgument, "excess_classical_prop1: unknown family");
}

double excess_quantum(const BoundConfig& cfg) {
    cfg.validate();
    const double dh = static_cast<double>(cfg.d_h);
    const double expo = 2.0 - cfg.r.reciprocal() - cfg.p.reciprocal();
    return cfg.epsilon * std::max(dh, std::pow(dh, expo));
}

double erf_approx(double x) {
    // Abramowitz & Stegun 7.1.26.
    const double ax = std::abs(x);
    const double t = 1.0 / (1.0 + 0.3275911 * ax);
    const double poly = t * (0.254829592 +
                        t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    const double val = 1.0 - poly * std::exp(-ax * ax);
    return x < 0.0 ? -val : val;
}

double j_of_r(const SchattenOrder& r) {
    const double two_pow = std::pow(2.0, r.reciprocal());
    const double root_log = std::sqrt(std::log(6.0 * two_pow));
    const double bracket = (1.0 / (6.0 * two_pow)) * root_log +
                           0.5 * std::sqrt(M_PI) * (1.0 - erf_approx(root_log));
    return 36.0 * two_pow * bracket;
}

BoundReport arc_bound_thm3(const std::vector<DensityMatrix>& states, const BoundConfig& cfg,
                           double excess_s) {
    require(excess_s >= 0.0, ErrorCode::InvalidArgument, "arc_bound_thm3: excess must be >= 0");
    BoundReport rep;
    rep.rc_bound = rc_bound_thm2(states, cfg);
    rep.excess_scaled = excess_s;
    rep.arc_bound = rep.rc_bound + cfg.b * excess_s * j_of_r(cfg.r) / std::sqrt(cfg.m);
    rep.pac_slack = pac_slack_term(cfg);
    rep.assembled_generalization_bound = 2.0 * cfg.eta * rep.arc_bound + rep.pac_slack;
    rep.provenance = {
        {"thm2", "RC <= (b/m) * khintchine(sum rho_i^2, r)"},
        {"thm3", "ARC <= RC + b*S*J(r)/sqrt(m)"},
        {"thm1", "G <= 2*eta*ARC + 3*B*sqrt(ln(2/delta)/(2m))"},
    };
    rep.check_finite();
    return rep;
}

std::pair<double, double> noisy_bounds_thm4(const std::vector<DensityMatrix>& states,
                                            const BoundConfig& cfg) {
    cfg.validate();
    std::vector<std::size_t> offenders;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto ed = qmath::eigh(states[i].hermitian());
        if (ed.eigenvalues.front() < cfg.epsilon - 1e-12) offenders.push_back(i);
    }
    if (!offenders.empty()) {
        std::ostringstream os;
        os << "noisy_bounds_thm4: Assumption 1 violated (lambda_min < epsilon) at indices";
        for (std::size_t i : offenders) os << ' ' << i;
        fail(ErrorCode::AssumptionViolation, os.str());
    }
    const double rc = rc_bound_thm2(states, cfg);
    return {rc, rc + thm4_upper_term(cfg)};
}

double thm4_upper_term(const BoundConfig& cfg) {
    const double dh = static_cast<double>(cfg.d_h);
    const double expo = 1.0 - cfg.p.reciprocal() - cfg.r.reciprocal();
    return cfg.b * cfg.epsilon * std::max(1.0, std::pow(dh, expo)) / std::sqrt(cfg.m);
}

double covering_log_lemma1(const BoundConfig& cfg, double delta) {
    cfg.validate();
    const double limit = std::pow(2.0, cfg.r.reciprocal()) * cfg.b;
    require(delta > 0.0 && delta <= limit, ErrorCode::InvalidArgument,
            "covering_log_lemma1: delta must lie in (0, 2^{1/r} b]");
    const double dh = static_cast<double>(cfg.d_h);
    return dh * dh * std::log(3.0 * limit / delta);
}

double multiclass_bound_thm5(const std::vector<DensityMatrix>& states, const BoundConfig& cfg,
                             double excess_s) {
    require(excess_s >= 0.0, ErrorCode::InvalidArgument, "multiclass_bound_thm5: excess >= 0");
    const double rc = rc_bound_thm2(states, cfg);
    const double k = static_cast<double>(cfg.k_classes);
    const double j_prime = 2.0 * j_of_r(cfg.r); // Appendix prefactor 72 = 2 * 36
    return (2.0 * k / cfg.gamma) * rc +
           k * cfg.b * excess_s * j_prime / (cfg.gamma * std::sqrt(cfg.m));
}

double pac_slack_term(const BoundConfig& cfg) {
    cfg.validate();
    return 3.0 * cfg.b_loss * std::sqrt(std::log(2.0 / cfg.delta_conf) / (2.0 * cfg.m));
}

double pac_assemble_thm1(double empirical_risk, double complexity_term, const BoundConfig& cfg) {
    require(empirical_risk >= 0.0 && complexity_term >= 0.0, ErrorCode::InvalidArgument,
            "pac_assemble_thm1: inputs must be nonnegative");
    return empirical_risk + 2.0 * cfg.eta * complexity_term + pac_slack_term(cfg);
}

namespace {

struct Bloch {
    double x = 0.0, y = 0.0, z = 0.0;
};

Bloch bloch_of(const DensityMatrix& rho) {
    Bloch s;
    s.x = 2.0 * rho.mat()(0, 1).real();
    s.y = -2.0 * rho.mat()(0, 1).imag();
    s.z = (rho.mat()(0, 0) - rho.mat()(1, 1)).real();
    return s;
}

// Maximize c*a0 + w.a - t_sum*eps*sqrt(2)*|a| over a0^2 + |a|^2 <= radius^2
// by projected gradient ascent; 20 random restarts plus the RC-aligned start.
double pga_max(double c, const Bloch& w, double t_sum, double eps, double radius,
               Rng& restart_rng) {
    const double kappa_coeff = eps * std::sqrt(2.0) * t_sum;
    auto objective = [&](const std::array<double, 4>& u) {
        const double an = std::sqrt(u[1] * u[1] + u[2] * u[2] + u[3] * u[3]);
        return c * u[0] + w.x * u[1] + w.y * u[2] + w.z * u[3] - kappa_coeff * an;
    };
    auto project = [&](std::array<double, 4>& u) {
        const double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]);
        if (n > radius)
            for (double& v : u) v *= radius / n;
    };

    double best = -std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 21; ++restart) {
        std::array<double, 4> u{};
        if (restart == 0) {
            // Deterministic start aligned with the epsilon = 0 maximizer.
            const double wn = std::sqrt(w.x * w.x + w.y * w.y + w.z * w.z);
            const double scale = std::sqrt(c * c + wn * wn);
            if (scale > 1e-15)
                u = {radius * c / scale, radius * w.x / scale, radius * w.y / scale,
                     radius * w.z / scale};
        } else {
            for (double& v : u) v = restart_rng.uniform(-1.0, 1.0);
            project(u);
        }
        for (int k = 1; k <= 600; ++k) {
            const double an = std::sqrt(u[1] * u[1] + u[2] * u[2] + u[3] * u[3]);
            std::array<double, 4> g{c, w.x, w.y, w.z};
            if (an > 1e-15) {
                g[1] -= kappa_coeff * u[1] / an;
                g[2] -= kappa_coeff * u[2] / an;
                g[3] -= kappa_coeff * u[3] / an;
            }
            const double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
            if (gn < 1e-15) break;
            const double step = 0.5 * radius / std::sqrt(static_cast<double>(k));
            for (int i = 0; i < 4; ++i) u[i] += step * g[i] / gn;
            project(u);
        }
        best = std::max(best, objective(u));
    }
    return best;
}

} // namespace

McEstimate mc_arc_estimate_small(const std::vector<DensityMatrix>& states,
                                 const std::vector<int>& labels, const BoundConfig& cfg,
                                 int n_draws, std::uint64_t seed) {
    cfg.validate();
    require(cfg.d_h == 2 && !cfg.r.is_inf() && cfg.r.value() == 2.0 && !cfg.p.is_inf() &&
                cfg.p.value() == 2.0,
            ErrorCode::InvalidArgument, "mc_arc_estimate_small: requires d_H = 2, r = p = 2");
    require(states.size() == labels.size() && static_cast<int>(states.size()) == cfg.m,
            ErrorCode::InvalidArgument, "mc_arc_estimate_small: dataset size mismatch");
    require(n_draws >= 1, ErrorCode::InvalidArgument, "mc_arc_estimate_small: n_draws >= 1");
    for (std::size_t i = 0; i < states.size(); ++i) {
        require(states[i].dim() == 2, ErrorCode::InvalidArgument, "mc_arc_estimate_small: d_H != 2");
        const auto ed = qmath::eigh(states[i].hermitian());
        require(ed.eigenvalues.front() >= cfg.epsilon - 1e-12, ErrorCode::AssumptionViolation,
                "mc_arc_estimate_small: Assumption 1 violated at index " + std::to_string(i));
    }

    std::vector<Bloch> bloch(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) bloch[i] = bloch_of(states[i]);
    const double radius = cfg.b / std::sqrt(2.0); // ||A||_2 <= b in (a0, a) coordinates

    std::vector<double> values(n_draws);
    for (int t = 0; t < n_draws; ++t) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t));
        double c = 0.0, t_sum = 0.0;
        Bloch w;
        for (std::size_t i = 0; i < states.size(); ++i) {
            const double sigma = rng.rademacher();
            const double y_signed = 1.0 - 2.0 * labels[i];
            c += sigma * y_signed;
            w.x += sigma * y_signed * bloch[i].x;
            w.y += sigma * y_signed * bloch[i].y;
            w.z += sigma * y_signed * bloch[i].z;
            t_sum += sigma;
        }
        values[t] = pga_max(c, w, t_sum, cfg.epsilon, radius, rng) / cfg.m;
    }
    return reduce_draws(values);
}

} // namespace qadvlab::bounds
