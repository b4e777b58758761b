#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qadvlab/cmatrix.hpp"
#include "qadvlab/embeddings.hpp"

namespace qadvlab::bounds {

struct BoundConfig {
    SchattenOrder r = SchattenOrder::infinity(); // observable norm order
    double b = 1.0;                              // observable norm budget
    SchattenOrder p = SchattenOrder::infinity(); // attack norm order
    double epsilon = 0.0;
    int m = 1;
    int d = 1;
    std::size_t d_h = 2;
    int l_layers = 1;
    int k_classes = 2;
    double gamma = 1.0;
    double min_x_norm = 1.0; // min ||x||_2 over the domain (amplitude case)
    double delta_conf = 0.05;
    double b_loss = 1.0; // loss range bound B
    double eta = 2.5;    // loss Lipschitz constant

    void validate() const;
};

enum class ExcessVariant { Prop1, Appendix };

std::string variant_name(ExcessVariant v);
ExcessVariant variant_from_name(const std::string& name);

struct BoundReport {
    double rc_bound = 0.0;
    double excess_scaled = 0.0; // the S value fed into Theorem 3
    double arc_bound = 0.0;
    double pac_slack = 0.0;
    double assembled_generalization_bound = 0.0;
    std::vector<std::pair<std::string, std::string>> provenance; // (theorem id, formula)

    void check_finite() const;
    std::string to_json() const;
};

struct McEstimate {
    double mean = 0.0;
    double stderr = 0.0;
    int n_draws = 0;
};

// Theorem 2 RC bound from the dataset second-moment matrix; r in {1} u [2, inf].
double rc_bound_thm2(const std::vector<DensityMatrix>& states, const BoundConfig& cfg);
// Same bound for pure-state datasets via the m x m Gram matrix.
double rc_bound_thm2_pure(const std::vector<sv::State>& states, const BoundConfig& cfg);

// Exact empirical RC of F_r by Monte Carlo over Rademacher draws: per draw
// (b/m) ||sum_i sigma_i rho_i||_{r/(r-1)} (the supremum over A_r is exact by
// Hoelder; labels are absorbed by symmetry).
McEstimate mc_rc_estimate(const std::vector<DensityMatrix>& states, const std::vector<int>& labels,
                          const BoundConfig& cfg, int n_draws, std::uint64_t seed);
// Gram-matrix route for pure-state datasets; same estimator.
McEstimate mc_rc_estimate_pure(const std::vector<sv::State>& states, const std::vector<int>& labels,
                               const BoundConfig& cfg, int n_draws, std::uint64_t seed);

// Scaled excess RC S^C for classical attacks (Proposition 1 or the
// Appendix-E constants; both are preserved, see the variant enum).
double excess_classical_prop1(const BoundConfig& cfg, embed::Family family,
                              ExcessVariant variant = ExcessVariant::Prop1);

// S^Q <= epsilon * max{d_H, d_H^{2 - 1/r - 1/p}}.
double excess_quantum(const BoundConfig& cfg);

// Dudley constant J(r) = 36 * 2^{1/r} * [ (2^{-1/r}/6) sqrt(ln(6 2^{1/r}))
//   + (sqrt(pi)/2)(1 - erf(sqrt(ln(6 2^{1/r})))) ].
double j_of_r(const SchattenOrder& r);

// Abramowitz-Stegun 7.1.26 rational approximation, |error| <= 1.5e-7.
double erf_approx(double x);

// Theorem 3: arc = rc + b * S * J(r) / sqrt(m).
BoundReport arc_bound_thm3(const std::vector<DensityMatrix>& states, const BoundConfig& cfg,
                           double excess_s);

// Theorem 4 under Assumption 1 (lambda_min(rho_i) >= epsilon): returns
// (rc reference, rc + b eps max{1, d_H^{1-1/p-1/r}} / sqrt(m)).
std::pair<double, double> noisy_bounds_thm4(const std::vector<DensityMatrix>& states,
                                            const BoundConfig& cfg);
// Formula-only variant for callers that already verified Assumption 1.
double thm4_upper_term(const BoundConfig& cfg);

// Lemma 1 as a log-count: d_H^2 * ln(3 * 2^{1/r} b / delta).
double covering_log_lemma1(const BoundConfig& cfg, double delta);

// Theorem 5: (2K/gamma) rc + K b S J'(r) / (gamma sqrt(m)), J' = 2 J.
double multiclass_bound_thm5(const std::vector<DensityMatrix>& states, const BoundConfig& cfg,
                             double excess_s);

// Theorem 1 assembly: empirical + 2 eta complexity + 3 B sqrt(ln(2/delta)/(2m)).
double pac_assemble_thm1(double empirical_risk, double complexity_term, const BoundConfig& cfg);
double pac_slack_term(const BoundConfig& cfg);

// Monte-Carlo ARC for d_H = 2, r = p = 2 under Assumption 1: the inner
// minimum has the closed form -eps ||A - (TrA/2) I||_2 and the supremum over
// the r = 2 ball is found by projected gradient ascent with restarts.
McEstimate mc_arc_estimate_small(const std::vector<DensityMatrix>& states,
                                 const std::vector<int>& labels, const BoundConfig& cfg,
                                 int n_draws, std::uint64_t seed);

} // namespace qadvlab::bounds
