#include "qadvlab/attacks.hpp"

#include <cmath>

#include "qadvlab/qmath.hpp"
#include "qadvlab/rng.hpp"

namespace qadvlab::attacks {

std::string space_name(AttackSpace s) { return s == AttackSpace::Classical ? "classical" : "quantum"; }

AttackSpace space_from_name(const std::string& name) {
    if (name == "classical") return AttackSpace::Classical;
    if (name == "quantum") return AttackSpace::Quantum;
    fail(ErrorCode::ConfigError, "unknown attack space: " + name);
}

QuantumAttackChannel QuantumAttackChannel::identity(int n_qubits) {
    QuantumAttackChannel c;
    c.n_qubits = n_qubits;
    c.thetas.assign(static_cast<std::size_t>(n_qubits) * 3, 0.0);
    return c;
}

bool QuantumAttackChannel::is_identity() const {
    for (double t : thetas)
        if (t != 0.0) return false;
    return true;
}

void QuantumAttackChannel::apply(sv::State& psi) const {
    for (int q = 0; q < n_qubits; ++q)
        sv::apply_1q(psi, n_qubits, q,
                     sv::rot(thetas[3 * q], thetas[3 * q + 1], thetas[3 * q + 2]));
}

DensityMatrix QuantumAttackChannel::apply(const DensityMatrix& rho) const {
    if (is_identity()) return rho; // bit-exact at theta = 0
    CMatrix out = rho.mat();
    for (int q = 0; q < n_qubits; ++q)
        sv::apply_1q_density(out, n_qubits, q,
                             sv::rot(thetas[3 * q], thetas[3 * q + 1], thetas[3 * q + 2]));
    return DensityMatrix::unchecked(out);
}

model::PreparedState QuantumAttackChannel::apply(const model::PreparedState& in) const {
    model::PreparedState out = in;
    if (is_identity()) return out;
    for (sv::State& v : out.vectors) apply(v);
    return out;
}

namespace {

double lp_norm(const std::vector<double>& v, const SchattenOrder& p) {
    if (p.is_inf()) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double top = 0.0;
    for (double x : v) top = std::max(top, std::abs(x));
    if (top == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x) / top, p.value());
    return top * std::pow(s, 1.0 / p.value());
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

} // namespace

embed::FeatureVector fgsm_classical(const model::ClassifierModel& m, const model::LabeledSample& s,
                                    const AttackBudget& budget) {
    require(budget.space == AttackSpace::Classical, ErrorCode::InvalidArgument,
            "fgsm_classical: classical budget required");
    budget.validate();
    if (budget.epsilon == 0.0) return s.x;

    const std::vector<double> g = model::grad_input(m, s);
    const std::size_t d = g.size();
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax == 0.0) return s.x;

    std::vector<double> delta(d, 0.0);
    if (budget.p.is_inf()) {
        for (std::size_t j = 0; j < d; ++j) delta[j] = budget.epsilon * sign(g[j]);
    } else if (budget.p.value() == 1.0) {
        // All budget on the steepest coordinate; first index wins ties.
        std::size_t j_star = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::abs(g[j]) > std::abs(g[j_star])) j_star = j;
        delta[j_star] = budget.epsilon * sign(g[j_star]);
    } else if (budget.p.value() == 2.0) {
        const double nrm = lp_norm(g, budget.p);
        for (std::size_t j = 0; j < d; ++j) delta[j] = budget.epsilon * g[j] / nrm;
    } else {
        const double expo = 1.0 / (budget.p.value() - 1.0);
        for (std::size_t j = 0; j < d; ++j)
            delta[j] = sign(g[j]) * std::pow(std::abs(g[j]) / gmax, expo);
        const double nrm = lp_norm(delta, budget.p);
        for (double& v : delta) v *= budget.epsilon / nrm;
    }

    embed::FeatureVector out = s.x;
    for (std::size_t j = 0; j < d; ++j) out[j] += delta[j];
    return out;
}

embed::FeatureVector random_perturb(const embed::FeatureVector& x, const AttackBudget& budget,
                                    std::uint64_t seed) {
    require(budget.space == AttackSpace::Classical, ErrorCode::InvalidArgument,
            "random_perturb: classical budget required");
    budget.validate();
    embed::FeatureVector out = x;
    if (budget.epsilon == 0.0) return out;
    Rng rng = Rng::substream(seed, 0x70657274ull); // "pert"

    if (budget.p.is_inf()) {
        for (double& v : out) v += rng.uniform(-budget.epsilon, budget.epsilon);
        return out;
    }
    if (budget.p.value() == 2.0) {
        const std::size_t d = x.size();
        std::vector<double> dir(d);
        double nrm2 = 0.0;
        do {
            nrm2 = 0.0;
            for (double& v : dir) {
                v = rng.gauss();
                nrm2 += v * v;
            }
        } while (nrm2 < 1e-24);
        const double radius =
            budget.epsilon * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
        const double scale = radius / std::sqrt(nrm2);
        for (std::size_t j = 0; j < d; ++j) out[j] += scale * dir[j];
        return out;
    }
    fail(ErrorCode::UnsupportedOrder, "random_perturb: baseline supports p in {2, inf} only");
}

namespace {

double budget_norm(const DensityMatrix& a, const DensityMatrix& b, const SchattenOrder& p) {
    CMatrix diff = a.mat();
    diff -= b.mat();
    return qmath::schatten_norm(HermitianMatrix(diff.symmetrized()), p);
}

} // namespace

DensityMatrix quantum_fgsm(const model::ClassifierModel& m, const DensityMatrix& rho, int y,
                           const AttackBudget& budget, int max_iter, double lr) {
    require(budget.space == AttackSpace::Quantum, ErrorCode::InvalidArgument,
            "quantum_fgsm: quantum budget required");
    budget.validate();
    require(max_iter >= 0, ErrorCode::InvalidArgument, "quantum_fgsm: max_iter must be >= 0");

    const int n = m.n_qubits();
    const model::PreparedState in = model::PreparedState::from_density(rho);
    const std::vector<double> f0 = model::scores(m, in);
    const std::vector<double> dldf = model::loss_score_gradient(m, f0, y);

    // Parameter-shift gradient of the loss at the identity channel.
    QuantumAttackChannel channel = QuantumAttackChannel::identity(n);
    std::vector<double> grad(channel.thetas.size(), 0.0);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        channel.thetas[i] = M_PI / 2.0;
        const std::vector<double> fp = model::scores(m, channel.apply(in));
        channel.thetas[i] = -M_PI / 2.0;
        const std::vector<double> fm = model::scores(m, channel.apply(in));
        channel.thetas[i] = 0.0;
        double df = 0.0;
        for (std::size_t k = 0; k < dldf.size(); ++k) df += dldf[k] * 0.5 * (fp[k] - fm[k]);
        grad[i] = df;
    }

    for (std::size_t i = 0; i < grad.size(); ++i) channel.thetas[i] = lr * sign(grad[i]);

    int iter = 0;
    while (budget_norm(rho, channel.apply(rho), budget.p) >= budget.epsilon && iter < max_iter) {
        for (double& t : channel.thetas) t /= 2.0;
        ++iter;
    }
    if (iter == max_iter)
        channel = QuantumAttackChannel::identity(n);
    return channel.apply(rho);
}

double adversarial_loss(const model::ClassifierModel& m, const model::LabeledSample& s,
                        const AttackConfig& cfg) {
    if (cfg.budget.space == AttackSpace::Classical) {
        const embed::FeatureVector x_adv = fgsm_classical(m, s, cfg.budget);
        const double adv = model::loss(m, {x_adv, s.y});
        if (!cfg.reject_non_increasing) return adv;
        return std::max(adv, model::loss(m, s));
    }
    const DensityMatrix rho = embed::embed(m.embedding, s.x);
    const DensityMatrix rho_adv =
        quantum_fgsm(m, rho, s.y, cfg.budget, cfg.max_iter, cfg.effective_lr());
    const double adv = model::loss(m, model::PreparedState::from_density(rho_adv), s.y);
    if (!cfg.reject_non_increasing) return adv;
    return std::max(adv, model::loss(m, model::PreparedState::from_density(rho), s.y));
}

std::vector<double> adversarial_loss_sweep(const model::ClassifierModel& m,
                                           const model::LabeledSample& s, const AttackConfig& cfg,
                                           const std::vector<double>& epsilons) {
    require(cfg.budget.space == AttackSpace::Classical, ErrorCode::InvalidArgument,
            "adversarial_loss_sweep: classical attacks only");
    std::vector<double> out;
    out.reserve(epsilons.size());
    double best = model::loss(m, s);
    double eps_prev = -1.0;
    for (double eps : epsilons) {
        require(eps >= eps_prev, ErrorCode::InvalidArgument,
                "adversarial_loss_sweep: epsilon grid must be ascending");
        eps_prev = eps;
        AttackBudget b = cfg.budget;
        b.epsilon = eps;
        const embed::FeatureVector x_adv = fgsm_classical(m, s, b);
        // warm start: a point feasible at a smaller radius stays feasible, so
        // the best loss seen so far carries over.
        best = std::max(best, model::loss(m, {x_adv, s.y}));
        out.push_back(best);
    }
    return out;
}

} // namespace qadvlab::attacks
