#include "qadvlab/embeddings.hpp"

#include <cmath>

#include "qadvlab/qmath.hpp"
#include "qadvlab/rng.hpp"

namespace qadvlab::embed {

std::string family_name(Family f) {
    switch (f) {
        case Family::Amplitude: return "amplitude";
        case Family::Angle: return "angle";
        case Family::Dense: return "dense";
        case Family::LLayerAngle: return "llayer_angle";
        case Family::LLayerDense: return "llayer_dense";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "amplitude") return Family::Amplitude;
    if (name == "angle") return Family::Angle;
    if (name == "dense") return Family::Dense;
    if (name == "llayer_angle") return Family::LLayerAngle;
    if (name == "llayer_dense") return Family::LLayerDense;
    fail(ErrorCode::ConfigError, "unknown embedding family: " + name);
}

int EmbeddingSpec::effective_dim() const {
    if (family == Family::Dense || family == Family::LLayerDense)
        return input_dim + (input_dim % 2);
    return input_dim;
}

int EmbeddingSpec::n_qubits() const {
    switch (family) {
        case Family::Amplitude: {
            int n = 0;
            while ((1 << n) < input_dim) ++n;
            return n;
        }
        case Family::Angle:
        case Family::LLayerAngle: return input_dim;
        case Family::Dense:
        case Family::LLayerDense: return effective_dim() / 2;
    }
    return 0;
}

std::size_t EmbeddingSpec::hilbert_dim() const { return std::size_t{1} << n_qubits(); }

bool EmbeddingSpec::rotation_family() const { return family != Family::Amplitude; }

void EmbeddingSpec::validate() const {
    require(input_dim >= 1, ErrorCode::ConfigError, "embedding: input_dim must be >= 1");
    require(layers >= 1, ErrorCode::ConfigError, "embedding: layers must be >= 1");
    if (family != Family::LLayerAngle && family != Family::LLayerDense)
        require(layers == 1, ErrorCode::ConfigError,
                "embedding: layers > 1 requires an L-layer family");
    require(n_qubits() <= tols().qubit_cap, ErrorCode::DimensionCap,
            "embedding: " + std::to_string(n_qubits()) + " qubits exceeds cap " +
                std::to_string(tols().qubit_cap));
    require(depolarize_lambda >= 0.0, ErrorCode::ConfigError, "embedding: negative lambda");
    require(depolarize_lambda * static_cast<double>(hilbert_dim()) <= 1.0 + 1e-15,
            ErrorCode::ConfigError, "embedding: lambda * d_H must be <= 1");
}

namespace {

sv::State amplitude_state(const FeatureVector& x) {
    double nrm2 = 0.0;
    for (double v : x) nrm2 += v * v;
    const double nrm = std::sqrt(nrm2);
    require(nrm > 1e-12, ErrorCode::InvalidArgument, "amplitude_embed: zero feature vector");

    std::size_t dim = 1;
    while (dim < x.size()) dim <<= 1;
    sv::State psi(dim, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) psi[i] = x[i] / nrm;
    return psi;
}

// Per-qubit rotation layer; shift_coord (0-based) offsets that coordinate by
// shift_delta, used for single-occurrence parameter shifts.
void apply_rotation_layer(sv::State& psi, const EmbeddingSpec& spec, const FeatureVector& x,
                          int shift_coord, double shift_delta) {
    const int n = spec.n_qubits();
    const bool dense = spec.family == Family::Dense || spec.family == Family::LLayerDense;
    auto coord = [&](int j) {
        double v = (j < static_cast<int>(x.size())) ? x[j] : 0.0; // dense padding
        if (j == shift_coord) v += shift_delta;
        return v;
    };
    for (int q = 0; q < n; ++q) {
        if (dense) {
            sv::apply_1q(psi, n, q, sv::exp_iy(coord(2 * q)));
            sv::apply_1q(psi, n, q, sv::exp_iz(coord(2 * q + 1)));
        } else {
            sv::apply_1q(psi, n, q, sv::exp_iy(coord(q)));
        }
    }
}

sv::State rotation_state(const EmbeddingSpec& spec, const FeatureVector& x, int shift_layer,
                         int shift_coord, double shift_delta) {
    spec.validate();
    require(static_cast<int>(x.size()) == spec.input_dim, ErrorCode::InvalidArgument,
            "embedding: feature vector length mismatch");
    for (double v : x)
        require(std::isfinite(v), ErrorCode::InvalidArgument, "embedding: non-finite feature");

    sv::State psi = sv::basis_state(spec.hilbert_dim(), 0);
    for (int l = 1; l <= spec.layers; ++l) {
        apply_rotation_layer(psi, spec, x, l == shift_layer ? shift_coord : -1, shift_delta);
        if (spec.layers > 1)
            sv::apply_dense(psi, seeded_unitary(psi.size(), spec.fixed_unitary_seed, l));
    }
    return psi;
}

} // namespace

sv::State embed_state(const EmbeddingSpec& spec, const FeatureVector& x) {
    if (spec.family == Family::Amplitude) {
        spec.validate();
        require(static_cast<int>(x.size()) == spec.input_dim, ErrorCode::InvalidArgument,
                "embedding: feature vector length mismatch");
        return amplitude_state(x);
    }
    return rotation_state(spec, x, 0, -1, 0.0);
}

sv::State embed_state_shifted(const EmbeddingSpec& spec, const FeatureVector& x, int layer,
                              int coord, double delta) {
    require(spec.rotation_family(), ErrorCode::InvalidArgument,
            "embed_state_shifted: rotation families only");
    return rotation_state(spec, x, layer, coord, delta);
}

DensityMatrix embed(const EmbeddingSpec& spec, const FeatureVector& x) {
    DensityMatrix rho = DensityMatrix::unchecked(sv::outer(embed_state(spec, x)));
    if (spec.depolarize_lambda > 0.0) return depolarize(rho, spec.depolarize_lambda);
    return rho;
}

DensityMatrix amplitude_embed(const FeatureVector& x) {
    EmbeddingSpec spec;
    spec.family = Family::Amplitude;
    spec.input_dim = static_cast<int>(x.size());
    return embed(spec, x);
}

DensityMatrix angle_embed(const FeatureVector& x) {
    EmbeddingSpec spec;
    spec.family = Family::Angle;
    spec.input_dim = static_cast<int>(x.size());
    return embed(spec, x);
}

DensityMatrix dense_embed(const FeatureVector& x) {
    EmbeddingSpec spec;
    spec.family = Family::Dense;
    spec.input_dim = static_cast<int>(x.size());
    return embed(spec, x);
}

DensityMatrix llayer_embed(const FeatureVector& x, const EmbeddingSpec& spec) {
    require(spec.family == Family::LLayerAngle || spec.family == Family::LLayerDense,
            ErrorCode::InvalidArgument, "llayer_embed: spec must name an L-layer family");
    return embed(spec, x);
}

DensityMatrix depolarize(const DensityMatrix& rho, double lambda_min) {
    const std::size_t d = rho.dim();
    require(lambda_min >= 0.0 && lambda_min * static_cast<double>(d) <= 1.0 + 1e-15,
            ErrorCode::InvalidArgument, "depolarize: lambda must lie in [0, 1/d_H]");
    if (lambda_min == 0.0) return rho;
    CMatrix out = rho.mat();
    out *= cplx(1.0 - lambda_min * static_cast<double>(d), 0.0);
    for (std::size_t i = 0; i < d; ++i) out(i, i) += lambda_min;
    return DensityMatrix::unchecked(out);
}

double pure_trace_distance(const DensityMatrix& rho, const DensityMatrix& rho_prime) {
    require(rho.dim() == rho_prime.dim(), ErrorCode::InvalidArgument, "dimension mismatch");
    auto check_pure = [](const DensityMatrix& r) {
        const auto ed = qmath::eigh(r.hermitian());
        require(std::abs(ed.eigenvalues.back() - 1.0) <= tols().pure_rank1,
                ErrorCode::InvalidArgument, "pure_trace_distance: state is not rank-1");
    };
    check_pure(rho);
    check_pure(rho_prime);
    // |<psi|psi'>|^2 = Tr(rho rho') for pure states.
    const double overlap = trace_product(rho.mat(), rho_prime.mat()).real();
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - overlap));
}

CMatrix seeded_unitary(std::size_t dim, std::uint64_t seed, std::uint64_t index) {
    Rng rng = Rng::substream(seed, index);
    CMatrix g(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) g(i, j) = cplx(rng.gauss(), rng.gauss());

    // Gram-Schmidt over columns with one re-orthogonalization pass.
    for (std::size_t c = 0; c < dim; ++c) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t p = 0; p < c; ++p) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < dim; ++i) proj += std::conj(g(i, p)) * g(i, c);
                for (std::size_t i = 0; i < dim; ++i) g(i, c) -= proj * g(i, p);
            }
        double nrm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) nrm += std::norm(g(i, c));
        nrm = std::sqrt(nrm);
        require(nrm > 1e-12, ErrorCode::NumericalFailure, "seeded_unitary: degenerate Ginibre draw");
        for (std::size_t i = 0; i < dim; ++i) g(i, c) /= nrm;
        // Phase fix: first entry of magnitude > 1e-12 made real-positive.
        for (std::size_t i = 0; i < dim; ++i)
            if (std::abs(g(i, c)) > 1e-12) {
                const cplx ph = std::conj(g(i, c)) / std::abs(g(i, c));
                for (std::size_t k = 0; k < dim; ++k) g(k, c) *= ph;
                break;
            }
    }
    return g;
}

} // namespace qadvlab::embed
