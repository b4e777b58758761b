#pragma once

#include <cstdint>
#include <vector>

#include "qadvlab/model.hpp"

namespace qadvlab::attacks {

enum class AttackSpace { Classical, Quantum };

std::string space_name(AttackSpace s);
AttackSpace space_from_name(const std::string& name);

struct AttackBudget {
    AttackSpace space = AttackSpace::Classical;
    SchattenOrder p = SchattenOrder::infinity(); // l_p classical / p-Schatten quantum
    double epsilon = 0.0;

    void validate() const {
        require(epsilon >= 0.0, ErrorCode::ConfigError, "attack: epsilon must be >= 0");
    }
};

// Config-file block; lr <= 0 means "use epsilon" (recorded in outputs).
struct AttackConfig {
    AttackBudget budget;
    double lr = 0.0;
    int max_iter = 30;
    std::uint64_t seed = 0;
    bool reject_non_increasing = true; // harness rejection rule

    double effective_lr() const { return lr > 0.0 ? lr : budget.epsilon; }
};

// One layer of per-qubit Rot gates; identity at all-zero angles.
struct QuantumAttackChannel {
    int n_qubits = 1;
    std::vector<double> thetas; // (1, n_qubits, 3)

    static QuantumAttackChannel identity(int n_qubits);
    bool is_identity() const;
    void apply(sv::State& psi) const;
    DensityMatrix apply(const DensityMatrix& rho) const;
    model::PreparedState apply(const model::PreparedState& in) const;
};

// Dual-norm steepest ascent step; sign rule at p = inf (FGSM).
embed::FeatureVector fgsm_classical(const model::ClassifierModel& m, const model::LabeledSample& s,
                                    const AttackBudget& budget);

// Uniform baseline draw on the l_p ball (p in {2, inf}).
embed::FeatureVector random_perturb(const embed::FeatureVector& x, const AttackBudget& budget,
                                    std::uint64_t seed);

// Algorithm: theta <- lr * sign(grad at identity); halve until the p-Schatten
// budget holds or max_iter is hit (then fall back to the identity channel).
DensityMatrix quantum_fgsm(const model::ClassifierModel& m, const DensityMatrix& rho, int y,
                           const AttackBudget& budget, int max_iter, double lr);

// Loss at the configured attack's output (a feasible point, so a lower bound
// on the true adversarial loss). With the rejection rule active the value is
// never below the clean loss.
double adversarial_loss(const model::ClassifierModel& m, const model::LabeledSample& s,
                        const AttackConfig& cfg);

// Warm-started evaluation over an ascending epsilon grid: each entry keeps the
// best feasible perturbation seen so far, so values are non-decreasing.
std::vector<double> adversarial_loss_sweep(const model::ClassifierModel& m,
                                           const model::LabeledSample& s, const AttackConfig& cfg,
                                           const std::vector<double>& epsilons);

} // namespace qadvlab::attacks
