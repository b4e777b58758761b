#include "qadvlab/selftest.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "qadvlab/attacks.hpp"
#include "qadvlab/bounds.hpp"
#include "qadvlab/experiments.hpp"
#include "qadvlab/qmath.hpp"
#include "qadvlab/rng.hpp"

namespace qadvlab::selftest {

namespace {

CMatrix random_hermitian(std::size_t n, Rng& rng) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = rng.uniform(-1.0, 1.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx z(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

bool suite_norm_monotonicity() {
    Rng rng(11);
    const std::vector<SchattenOrder> orders = {SchattenOrder(1.0), SchattenOrder(1.5),
                                               SchattenOrder(2.0), SchattenOrder(4.0),
                                               SchattenOrder::infinity()};
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rng.below(6);
        const HermitianMatrix m(random_hermitian(n, rng));
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& r : orders) {
            const double v = qmath::schatten_norm(m, r);
            if (v > prev + 1e-9) return false; // r <= s implies ||.||_s <= ||.||_r
            prev = v;
        }
    }
    return true;
}

bool suite_holder_equality() {
    Rng rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rng.below(5);
        const HermitianMatrix m(random_hermitian(n, rng));
        for (double rv : {1.0, 1.5, 2.0, 3.0, -1.0}) {
            const SchattenOrder r = rv < 0 ? SchattenOrder::infinity() : SchattenOrder(rv);
            const double b = 0.5 + rng.uniform();
            const HermitianMatrix a = qmath::holder_extremizer(m, r, b);
            if (qmath::schatten_norm(a, r) > b + tols().holder) return false;
            const double want = b * qmath::schatten_norm(m, qmath::dual_order(r));
            const double got = trace_product(a.mat(), m.mat()).real();
            if (std::abs(got - want) > tols().holder * std::max(1.0, m.mat().frobenius_norm()))
                return false;
        }
    }
    return true;
}

bool suite_eigh_reconstruction() {
    Rng rng(13);
    for (std::size_t n : {2ul, 5ul, 16ul, 64ul}) {
        const HermitianMatrix m(random_hermitian(n, rng));
        const auto ed = qmath::eigh(m);
        CMatrix recon(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    s += ed.eigenvectors(i, k) * ed.eigenvalues[k] *
                         std::conj(ed.eigenvectors(j, k));
                recon(i, j) = s;
            }
        recon -= m.mat();
        if (recon.frobenius_norm() >
            tols().eigh_recon_rel * std::max(1.0, m.mat().frobenius_norm()))
            return false;
    }
    return true;
}

bool suite_embedding_validity() {
    Rng rng(14);
    for (int rep = 0; rep < 20; ++rep) {
        for (embed::Family fam : {embed::Family::Amplitude, embed::Family::Angle,
                                  embed::Family::Dense, embed::Family::LLayerAngle}) {
            embed::EmbeddingSpec spec;
            spec.family = fam;
            spec.input_dim = 2 + static_cast<int>(rng.below(3));
            spec.layers = (fam == embed::Family::LLayerAngle) ? 2 : 1;
            spec.fixed_unitary_seed = 42;
            embed::FeatureVector x(spec.input_dim);
            for (double& v : x) v = rng.uniform(-2.0, 2.0);
            if (fam == embed::Family::Amplitude) x[0] += 3.0; // keep away from zero
            const DensityMatrix rho = embed::embed(spec, x);
            qmath::validate_density(rho.mat(), 1e-10);
            const auto ed = qmath::eigh(rho.hermitian());
            if (std::abs(ed.eigenvalues.back() - 1.0) > 1e-10) return false; // pure
        }
    }
    return true;
}

bool suite_depolarize_affine() {
    Rng rng(15);
    for (int rep = 0; rep < 20; ++rep) {
        embed::FeatureVector x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        embed::FeatureVector z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const DensityMatrix r1 = embed::angle_embed(x);
        const DensityMatrix r2 = embed::angle_embed(z);
        const double lam = 0.02, al = rng.uniform();
        CMatrix mixed = r1.mat();
        mixed *= cplx(al, 0.0);
        CMatrix other = r2.mat();
        other *= cplx(1.0 - al, 0.0);
        mixed += other;
        const CMatrix lhs = embed::depolarize(DensityMatrix::unchecked(mixed), lam).mat();
        CMatrix rhs = embed::depolarize(r1, lam).mat();
        rhs *= cplx(al, 0.0);
        CMatrix rhs2 = embed::depolarize(r2, lam).mat();
        rhs2 *= cplx(1.0 - al, 0.0);
        rhs += rhs2;
        CMatrix diff = lhs;
        diff -= rhs;
        if (diff.frobenius_norm() > 1e-12) return false;
        const auto ed = qmath::eigh(HermitianMatrix(lhs.symmetrized()));
        if (ed.eigenvalues.front() < lam - 1e-12) return false;
    }
    return true;
}

bool suite_attack_feasibility() {
    Rng rng(16);
    embed::EmbeddingSpec spec;
    spec.family = embed::Family::Angle;
    spec.input_dim = 2;
    for (int rep = 0; rep < 20; ++rep) {
        model::ClassifierModel m;
        m.embedding = spec;
        m.params = model::CircuitParams::random_init(2, 2, rng.next_u64());
        model::LabeledSample s;
        s.x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        s.y = static_cast<int>(rng.below(2));
        for (double pv : {1.0, 2.0, 3.0, -1.0}) {
            attacks::AttackBudget budget;
            budget.space = attacks::AttackSpace::Classical;
            budget.p = pv < 0 ? SchattenOrder::infinity() : SchattenOrder(pv);
            budget.epsilon = 0.3;
            const embed::FeatureVector x_adv = attacks::fgsm_classical(m, s, budget);
            std::vector<double> delta(s.x.size());
            for (std::size_t j = 0; j < delta.size(); ++j) delta[j] = x_adv[j] - s.x[j];
            double norm = 0.0;
            if (budget.p.is_inf())
                for (double v : delta) norm = std::max(norm, std::abs(v));
            else {
                for (double v : delta) norm += std::pow(std::abs(v), budget.p.value());
                norm = std::pow(norm, 1.0 / budget.p.value());
            }
            if (norm > budget.epsilon + 1e-12) return false;
        }
    }
    return true;
}

bool suite_quantum_fgsm_budget() {
    Rng rng(17);
    embed::EmbeddingSpec spec;
    spec.family = embed::Family::Angle;
    spec.input_dim = 2;
    for (int rep = 0; rep < 20; ++rep) {
        model::ClassifierModel m;
        m.embedding = spec;
        m.params = model::CircuitParams::random_init(2, 2, rng.next_u64());
        embed::FeatureVector x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const DensityMatrix rho = embed::embed(spec, x);
        attacks::AttackBudget budget;
        budget.space = attacks::AttackSpace::Quantum;
        budget.p = SchattenOrder::infinity();
        budget.epsilon = 0.05;
        const DensityMatrix adv =
            attacks::quantum_fgsm(m, rho, static_cast<int>(rng.below(2)), budget, 30, 0.05);
        qmath::validate_density(adv.mat(), 1e-10);
        CMatrix diff = rho.mat();
        diff -= adv.mat();
        const double norm = qmath::schatten_norm(HermitianMatrix(diff.symmetrized()), budget.p);
        if (!(norm < budget.epsilon || diff.frobenius_norm() == 0.0)) return false;
    }
    return true;
}

bool suite_rc_dominance() {
    Rng rng(18);
    for (int rep = 0; rep < 10; ++rep) {
        const int m = 2 + static_cast<int>(rng.below(6));
        std::vector<DensityMatrix> states;
        for (int i = 0; i < m; ++i)
            states.push_back(embed::angle_embed({rng.uniform(-2, 2), rng.uniform(-2, 2)}));
        for (double rv : {1.0, 2.0, -1.0}) {
            bounds::BoundConfig cfg;
            cfg.r = rv < 0 ? SchattenOrder::infinity() : SchattenOrder(rv);
            cfg.b = 1.0;
            cfg.m = m;
            cfg.d = 2;
            cfg.d_h = 4;
            const double bound = bounds::rc_bound_thm2(states, cfg);
            const auto mc = bounds::mc_rc_estimate(states, {}, cfg, 200, rng.next_u64());
            if (mc.mean > bound + 3.0 * mc.stderr) return false;
        }
    }
    return true;
}

bool suite_determinism() {
    experiments::GaussianTaskSpec task;
    task.d = 2;
    task.train_m = 6;
    task.test_m = 6;
    task.seed = 99;
    const auto a = experiments::gen_dataset(task);
    const auto b = experiments::gen_dataset(task);
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        if (a.train[i].y != b.train[i].y) return false;
        for (std::size_t j = 0; j < a.train[i].x.size(); ++j)
            if (a.train[i].x[j] != b.train[i].x[j]) return false;
    }
    return true;
}

} // namespace

bool run_all(std::ostream& os) {
    struct Suite {
        const char* name;
        std::function<bool()> fn;
    };
    const std::vector<Suite> suites = {
        {"norm_monotonicity", suite_norm_monotonicity},
        {"holder_equality", suite_holder_equality},
        {"eigh_reconstruction", suite_eigh_reconstruction},
        {"embedding_validity", suite_embedding_validity},
        {"depolarize_affine", suite_depolarize_affine},
        {"attack_feasibility", suite_attack_feasibility},
        {"quantum_fgsm_budget", suite_quantum_fgsm_budget},
        {"rc_dominance", suite_rc_dominance},
        {"dataset_determinism", suite_determinism},
    };
    bool all_ok = true;
    for (const Suite& s : suites) {
        bool ok = false;
        try {
            ok = s.fn();
        } catch (const std::exception& e) {
            os << "FAIL " << s.name << " (exception: " << e.what() << ")\n";
            all_ok = false;
            continue;
        }
        os << (ok ? "PASS " : "FAIL ") << s.name << '\n';
        all_ok = all_ok && ok;
    }
    return all_ok;
}

} // namespace qadvlab::selftest
