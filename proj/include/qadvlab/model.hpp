#pragma once

#include <string>
#include <vector>

#include "qadvlab/embeddings.hpp"

namespace qadvlab::model {

// Variational circuit angles, shape (layers, n_qubits, 3), radians.
struct CircuitParams {
    int layers = 4;
    int n_qubits = 1;
    std::vector<double> angles; // row-major [layer][qubit][3]

    static CircuitParams zeros(int layers, int n_qubits);
    static CircuitParams random_init(int layers, int n_qubits, std::uint64_t seed);

    double& angle(int l, int q, int k) { return angles[(l * n_qubits + q) * 3 + k]; }
    double angle(int l, int q, int k) const { return angles[(l * n_qubits + q) * 3 + k]; }
    std::size_t size() const { return angles.size(); }
    void validate() const;
};

enum class Measurement { ZAll, ZFirst };

std::string measurement_name(Measurement m);
Measurement measurement_from_name(const std::string& name);

struct LabeledSample {
    embed::FeatureVector x;
    int y = 0; // class label in [0, K); binary y in {0,1} maps to +1/-1 via 1-2y
};

struct ClassifierModel {
    embed::EmbeddingSpec embedding;
    CircuitParams params;
    Measurement measurement = Measurement::ZAll;
    int num_classes = 2;
    double alpha = 10.0; // binary loss sharpness
    double gamma = 1.0;  // multiclass margin

    int n_qubits() const { return embedding.n_qubits(); }
    std::size_t hilbert_dim() const { return embedding.hilbert_dim(); }
    // b = ||M||_inf of the fixed measurement.
    double norm_budget() const;
    // eta for Theorem 1 contraction: alpha/4 binary, 1/gamma multiclass.
    double loss_lipschitz() const;
    void validate() const;
};

// Spectral form of an input state: score evaluation and channel application
// work per pure component, so mixed states cost one eigh up front.
struct PreparedState {
    std::vector<double> weights;
    std::vector<sv::State> vectors;

    static PreparedState pure(sv::State psi);
    static PreparedState from_density(const DensityMatrix& rho);
    std::size_t dim() const { return vectors.empty() ? 0 : vectors.front().size(); }
};

void apply_circuit(sv::State& psi, const CircuitParams& p);
CMatrix circuit_unitary(const CircuitParams& p, std::size_t dim);

// Diagonal of the fixed measurement M_k in the computational basis.
// Binary (class_k = 0) uses the configured ZAll/ZFirst; multiclass uses the
// basis projector |k><k|.
std::vector<double> measurement_diag(const ClassifierModel& m, int class_k);

// A = U_theta^dag M_k U_theta.
HermitianMatrix effective_observable(const ClassifierModel& m, int class_k = 0);

double score(const ClassifierModel& m, const PreparedState& in);
double score(const ClassifierModel& m, const sv::State& psi);
double score(const ClassifierModel& m, const DensityMatrix& rho);
std::vector<double> score_multiclass(const ClassifierModel& m, const PreparedState& in);

// phi(t) = 1 / (1 + e^{alpha t}) evaluated stably.
double sigmoid_loss(double alpha, double t);
// Ramp phi_gamma(t): 1 for t <= 0, 1 - t/gamma on (0, gamma), 0 beyond.
double ramp_loss(double gamma, double t);

double binary_loss(const ClassifierModel& m, double f, int y);
double binary_loss(const ClassifierModel& m, const PreparedState& in, int y);
double multiclass_loss(const ClassifierModel& m, const PreparedState& in, int y);
double loss(const ClassifierModel& m, const PreparedState& in, int y);
double loss(const ClassifierModel& m, const LabeledSample& s);

// Score vector view used by attack gradients: {f} for binary, f_k otherwise.
std::vector<double> scores(const ClassifierModel& m, const PreparedState& in);
double loss_from_scores(const ClassifierModel& m, const std::vector<double>& f, int y);
// d loss / d scores at the given score vector (ramp uses the sub-gradient).
std::vector<double> loss_score_gradient(const ClassifierModel& m, const std::vector<double>& f,
                                        int y);

PreparedState prepare(const ClassifierModel& m, const embed::FeatureVector& x);

// d loss / d angles via the parameter-shift rule (shift +-pi/2).
std::vector<double> grad_params(const ClassifierModel& m, const PreparedState& in, int y);

// d loss / d x; parameter shift (+-pi/4 per occurrence) for rotation
// families, central finite differences for amplitude.
std::vector<double> grad_input(const ClassifierModel& m, const LabeledSample& s);

std::string to_checkpoint_json(const ClassifierModel& m);
ClassifierModel from_checkpoint_json(const std::string& text);

} // namespace qadvlab::model
