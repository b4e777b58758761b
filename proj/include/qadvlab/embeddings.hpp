#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qadvlab/cmatrix.hpp"
#include "qadvlab/statevec.hpp"

namespace qadvlab::embed {

enum class Family { Amplitude, Angle, Dense, LLayerAngle, LLayerDense };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

using FeatureVector = std::vector<double>;

struct EmbeddingSpec {
    Family family = Family::Angle;
    int input_dim = 1;
    int layers = 1;                      // 1 for non-repeated families
    std::uint64_t fixed_unitary_seed = 0; // ignored when layers == 1
    double depolarize_lambda = 0.0;       // 0 = noiseless

    // Feature count after padding (dense families pad odd d with one zero).
    int effective_dim() const;
    int n_qubits() const;
    std::size_t hilbert_dim() const;
    bool rotation_family() const;
    // Throws on cap violations or an invalid depolarization strength.
    void validate() const;
};

// Pure-state embeddings as statevectors (the fast path for model evaluation).
sv::State embed_state(const EmbeddingSpec& spec, const FeatureVector& x);

// Same circuit with a single occurrence (layer, coordinate) of x shifted by
// delta; used by the parameter-shift input gradient. layer is 1-based.
sv::State embed_state_shifted(const EmbeddingSpec& spec, const FeatureVector& x, int layer,
                              int coord, double delta);

// x -> rho(x), including the depolarizing wrapper when lambda > 0.
DensityMatrix embed(const EmbeddingSpec& spec, const FeatureVector& x);

DensityMatrix amplitude_embed(const FeatureVector& x);
DensityMatrix angle_embed(const FeatureVector& x);
DensityMatrix dense_embed(const FeatureVector& x);
DensityMatrix llayer_embed(const FeatureVector& x, const EmbeddingSpec& spec);

// rho' = (1 - lambda d_H) rho + lambda I, valid for 0 <= lambda <= 1/d_H.
DensityMatrix depolarize(const DensityMatrix& rho, double lambda_min);

// ||rho - rho'||_1 = 2 sqrt(1 - |<psi|psi'>|^2) for pure states.
double pure_trace_distance(const DensityMatrix& rho, const DensityMatrix& rho_prime);

// Deterministic Haar-like unitary: Ginibre draw, Gram-Schmidt, first nonzero
// entry of each column made real-positive.
CMatrix seeded_unitary(std::size_t dim, std::uint64_t seed, std::uint64_t index);

} // namespace qadvlab::embed
