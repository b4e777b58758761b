#include "qadvlab/model.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "qadvlab/qmath.hpp"
#include "qadvlab/rng.hpp"

namespace qadvlab::model {

using json = nlohmann::json;

CircuitParams CircuitParams::zeros(int layers, int n_qubits) {
    CircuitParams p;
    p.layers = layers;
    p.n_qubits = n_qubits;
    p.angles.assign(static_cast<std::size_t>(layers) * n_qubits * 3, 0.0);
    return p;
}

CircuitParams CircuitParams::random_init(int layers, int n_qubits, std::uint64_t seed) {
    CircuitParams p = zeros(layers, n_qubits);
    Rng rng = Rng::substream(seed, 0x706172616d73ull); // "params"
    for (double& a : p.angles) a = rng.uniform(0.0, 2.0 * M_PI);
    return p;
}

void CircuitParams::validate() const {
    require(layers >= 1 && n_qubits >= 1, ErrorCode::ConfigError, "circuit: bad shape");
    require(angles.size() == static_cast<std::size_t>(layers) * n_qubits * 3,
            ErrorCode::ConfigError, "circuit: angle tensor shape mismatch");
    for (double a : angles)
        require(std::isfinite(a), ErrorCode::InvalidArgument, "circuit: non-finite angle");
}

std::string measurement_name(Measurement m) { return m == Measurement::ZAll ? "z_all" : "z_first"; }

Measurement measurement_from_name(const std::string& name) {
    if (name == "z_all") return Measurement::ZAll;
    if (name == "z_first") return Measurement::ZFirst;
    fail(ErrorCode::ConfigError, "unknown measurement: " + name);
}

double ClassifierModel::norm_budget() const {
    if (num_classes > 2) return 1.0; // basis projectors
    return measurement == Measurement::ZAll ? static_cast<double>(n_qubits()) : 1.0;
}

double ClassifierModel::loss_lipschitz() const {
    return num_classes > 2 ? 1.0 / gamma : alpha / 4.0;
}

void ClassifierModel::validate() const {
    embedding.validate();
    params.validate();
    require(params.n_qubits == n_qubits(), ErrorCode::ConfigError,
            "model: circuit qubit count must match the embedding");
    require(num_classes >= 2, ErrorCode::ConfigError, "model: num_classes must be >= 2");
    if (num_classes > 2)
        require(static_cast<std::size_t>(num_classes) <= hilbert_dim(), ErrorCode::ConfigError,
                "model: multiclass needs K <= d_H basis projectors");
    require(alpha > 0.0 && gamma > 0.0, ErrorCode::ConfigError, "model: alpha, gamma must be > 0");
}

PreparedState PreparedState::pure(sv::State psi) {
    PreparedState p;
    p.weights = {1.0};
    p.vectors = {std::move(psi)};
    return p;
}

PreparedState PreparedState::from_density(const DensityMatrix& rho) {
    const auto ed = qmath::eigh(rho.hermitian());
    PreparedState p;
    const std::size_t n = rho.dim();
    for (std::size_t k = 0; k < n; ++k) {
        if (ed.eigenvalues[k] < 1e-14) continue;
        sv::State v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = ed.eigenvectors(i, k);
        p.weights.push_back(ed.eigenvalues[k]);
        p.vectors.push_back(std::move(v));
    }
    require(!p.vectors.empty(), ErrorCode::InvalidArgument, "PreparedState: zero state");
    return p;
}

void apply_circuit(sv::State& psi, const CircuitParams& p) {
    const int n = p.n_qubits;
    for (int l = 0; l < p.layers; ++l) {
        for (int q = 0; q < n; ++q)
            sv::apply_1q(psi, n, q, sv::rot(p.angle(l, q, 0), p.angle(l, q, 1), p.angle(l, q, 2)));
        if (n >= 2)
            for (int q = 0; q < n; ++q) sv::apply_cnot(psi, n, q, (q + 1) % n);
    }
}

CMatrix circuit_unitary(const CircuitParams& p, std::size_t dim) {
    CMatrix u(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        sv::State col = sv::basis_state(dim, j);
        apply_circuit(col, p);
        for (std::size_t i = 0; i < dim; ++i) u(i, j) = col[i];
    }
    return u;
}

std::vector<double> measurement_diag(const ClassifierModel& m, int class_k) {
    const std::size_t dim = m.hilbert_dim();
    const int n = m.n_qubits();
    std::vector<double> diag(dim, 0.0);
    if (m.num_classes > 2) {
        require(class_k >= 0 && class_k < m.num_classes, ErrorCode::InvalidArgument,
                "measurement_diag: class out of range");
        diag[class_k] = 1.0;
        return diag;
    }
    if (m.measurement == Measurement::ZFirst) {
        const std::size_t top = dim >> 1;
        for (std::size_t i = 0; i < dim; ++i) diag[i] = (i < top) ? 1.0 : -1.0;
    } else {
        for (std::size_t i = 0; i < dim; ++i)
            diag[i] = n - 2.0 * std::popcount(static_cast<unsigned long long>(i));
    }
    return diag;
}

HermitianMatrix effective_observable(const ClassifierModel& m, int class_k) {
    const std::size_t dim = m.hilbert_dim();
    const CMatrix u = circuit_unitary(m.params, dim);
    const std::vector<double> diag = measurement_diag(m, class_k);
    CMatrix a(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) s += std::conj(u(k, i)) * diag[k] * u(k, j);
            a(i, j) = s;
        }
    return HermitianMatrix(a.symmetrized());
}

namespace {

double expectation(const CircuitParams& params, const std::vector<double>& diag,
                   const PreparedState& in) {
    double f = 0.0;
    for (std::size_t c = 0; c < in.vectors.size(); ++c) {
        sv::State phi = in.vectors[c];
        apply_circuit(phi, params);
        double e = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) e += diag[i] * std::norm(phi[i]);
        f += in.weights[c] * e;
    }
    return f;
}

} // namespace

double score(const ClassifierModel& m, const PreparedState& in) {
    require(in.dim() == m.hilbert_dim(), ErrorCode::InvalidArgument,
            "score: state dimension does not match the embedding");
    return expectation(m.params, measurement_diag(m, 0), in);
}

double score(const ClassifierModel& m, const sv::State& psi) {
    return score(m, PreparedState::pure(psi));
}

double score(const ClassifierModel& m, const DensityMatrix& rho) {
    return score(m, PreparedState::from_density(rho));
}

std::vector<double> score_multiclass(const ClassifierModel& m, const PreparedState& in) {
    require(in.dim() == m.hilbert_dim(), ErrorCode::InvalidArgument,
            "score: state dimension does not match the embedding");
    std::vector<double> out(m.num_classes);
    // One circuit pass per component; all class projectors read |phi_k|^2.
    std::vector<std::vector<double>> diags;
    diags.reserve(m.num_classes);
    for (int k = 0; k < m.num_classes; ++k) diags.push_back(measurement_diag(m, k));
    for (std::size_t c = 0; c < in.vectors.size(); ++c) {
        sv::State phi = in.vectors[c];
        apply_circuit(phi, m.params);
        for (int k = 0; k < m.num_classes; ++k) {
            double e = 0.0;
            for (std::size_t i = 0; i < phi.size(); ++i) e += diags[k][i] * std::norm(phi[i]);
            out[k] += in.weights[c] * e;
        }
    }
    return out;
}

double sigmoid_loss(double alpha, double t) {
    const double z = alpha * t;
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

double ramp_loss(double gamma, double t) {
    if (t <= 0.0) return 1.0;
    if (t >= gamma) return 0.0;
    return 1.0 - t / gamma;
}

double binary_loss(const ClassifierModel& m, double f, int y) {
    require(y == 0 || y == 1, ErrorCode::InvalidArgument, "binary_loss: label must be 0 or 1");
    const double y_signed = 1.0 - 2.0 * y;
    return sigmoid_loss(m.alpha, y_signed * f);
}

double binary_loss(const ClassifierModel& m, const PreparedState& in, int y) {
    return binary_loss(m, score(m, in), y);
}

namespace {

double margin(const std::vector<double>& f, int y) {
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < f.size(); ++k)
        if (static_cast<int>(k) != y) best_other = std::max(best_other, f[k]);
    return f[y] - best_other;
}

} // namespace

double multiclass_loss(const ClassifierModel& m, const PreparedState& in, int y) {
    require(y >= 0 && y < m.num_classes, ErrorCode::InvalidArgument, "label out of range");
    return ramp_loss(m.gamma, margin(score_multiclass(m, in), y));
}

double loss(const ClassifierModel& m, const PreparedState& in, int y) {
    return m.num_classes > 2 ? multiclass_loss(m, in, y) : binary_loss(m, in, y);
}

double loss(const ClassifierModel& m, const LabeledSample& s) {
    return loss(m, prepare(m, s.x), s.y);
}

std::vector<double> scores(const ClassifierModel& m, const PreparedState& in) {
    if (m.num_classes > 2) return score_multiclass(m, in);
    return {score(m, in)};
}

double loss_from_scores(const ClassifierModel& m, const std::vector<double>& f, int y) {
    if (m.num_classes > 2) return ramp_loss(m.gamma, margin(f, y));
    return binary_loss(m, f[0], y);
}

std::vector<double> loss_score_gradient(const ClassifierModel& m, const std::vector<double>& f,
                                        int y) {
    std::vector<double> g(f.size(), 0.0);
    if (m.num_classes > 2) {
        const double t = margin(f, y);
        if (t <= 0.0 || t >= m.gamma) return g;
        int k_star = -1;
        for (int k = 0; k < m.num_classes; ++k)
            if (k != y && (k_star < 0 || f[k] > f[k_star])) k_star = k;
        g[y] = -1.0 / m.gamma;
        g[k_star] = 1.0 / m.gamma;
        return g;
    }
    const double y_signed = 1.0 - 2.0 * y;
    const double phi = sigmoid_loss(m.alpha, y_signed * f[0]);
    g[0] = -m.alpha * phi * (1.0 - phi) * y_signed;
    return g;
}

PreparedState prepare(const ClassifierModel& m, const embed::FeatureVector& x) {
    if (m.embedding.depolarize_lambda > 0.0)
        return PreparedState::from_density(embed::embed(m.embedding, x));
    return PreparedState::pure(embed::embed_state(m.embedding, x));
}

namespace {

// d loss / d f at the current scores; binary case.
double binary_chain(const ClassifierModel& m, double f, int y) {
    const double y_signed = 1.0 - 2.0 * y;
    const double phi = sigmoid_loss(m.alpha, y_signed * f);
    return -m.alpha * phi * (1.0 - phi) * y_signed;
}

} // namespace

std::vector<double> grad_params(const ClassifierModel& m, const PreparedState& in, int y) {
    m.validate();
    std::vector<double> grad(m.params.size(), 0.0);
    CircuitParams shifted = m.params;

    if (m.num_classes == 2) {
        const std::vector<double> diag = measurement_diag(m, 0);
        const double chain = binary_chain(m, expectation(m.params, diag, in), y);
        if (chain == 0.0) return grad;
        for (std::size_t i = 0; i < grad.size(); ++i) {
            shifted.angles[i] = m.params.angles[i] + M_PI / 2.0;
            const double fp = expectation(shifted, diag, in);
            shifted.angles[i] = m.params.angles[i] - M_PI / 2.0;
            const double fm = expectation(shifted, diag, in);
            shifted.angles[i] = m.params.angles[i];
            grad[i] = chain * 0.5 * (fp - fm);
        }
        return grad;
    }

    // Multiclass ramp: subgradient through the margin f_y - f_{k*}.
    const std::vector<double> f = score_multiclass(m, in);
    const double t = margin(f, y);
    if (t <= 0.0 || t >= m.gamma) return grad;
    int k_star = -1;
    for (int k = 0; k < m.num_classes; ++k)
        if (k != y && (k_star < 0 || f[k] > f[k_star])) k_star = k;
    const std::vector<double> diag_y = measurement_diag(m, y);
    const std::vector<double> diag_k = measurement_diag(m, k_star);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        shifted.angles[i] = m.params.angles[i] + M_PI / 2.0;
        const double mp = expectation(shifted, diag_y, in) - expectation(shifted, diag_k, in);
        shifted.angles[i] = m.params.angles[i] - M_PI / 2.0;
        const double mm = expectation(shifted, diag_y, in) - expectation(shifted, diag_k, in);
        shifted.angles[i] = m.params.angles[i];
        grad[i] = (-1.0 / m.gamma) * 0.5 * (mp - mm);
    }
    return grad;
}

namespace {

double loss_at(const ClassifierModel& m, const embed::FeatureVector& x, int y) {
    return loss(m, prepare(m, x), y);
}

// Score as a function of x with the depolarizing factor split off; the
// identity component of a depolarized state does not depend on x.
double pure_score_for_grad(const ClassifierModel& m, const sv::State& psi,
                           const std::vector<double>& diag) {
    return expectation(m.params, diag, PreparedState::pure(psi));
}

} // namespace

std::vector<double> grad_input(const ClassifierModel& m, const LabeledSample& s) {
    m.validate();
    const int d = m.embedding.input_dim;
    std::vector<double> grad(d, 0.0);

    if (m.embedding.family == embed::Family::Amplitude) {
        // Central differences on the loss itself.
        embed::FeatureVector x = s.x;
        for (int j = 0; j < d; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
            const double xj = x[j];
            x[j] = xj + h;
            const double lp = loss_at(m, x, s.y);
            x[j] = xj - h;
            const double lm = loss_at(m, x, s.y);
            x[j] = xj;
            grad[j] = (lp - lm) / (2.0 * h);
        }
        return grad;
    }

    // Rotation families: shift +-pi/4 separately at each of the L re-uploads.
    const double depol_scale = 1.0 - m.embedding.depolarize_lambda * m.hilbert_dim();
    if (m.num_classes == 2) {
        const std::vector<double> diag = measurement_diag(m, 0);
        const double f0 = score(m, prepare(m, s.x));
        const double chain = binary_chain(m, f0, s.y);
        if (chain == 0.0) return grad;
        for (int j = 0; j < d; ++j) {
            double df = 0.0;
            for (int l = 1; l <= m.embedding.layers; ++l) {
                const double fp = pure_score_for_grad(
                    m, embed::embed_state_shifted(m.embedding, s.x, l, j, M_PI / 4.0), diag);
                const double fm = pure_score_for_grad(
                    m, embed::embed_state_shifted(m.embedding, s.x, l, j, -M_PI / 4.0), diag);
                df += fp - fm;
            }
            grad[j] = chain * depol_scale * df;
        }
        return grad;
    }

    const PreparedState in = prepare(m, s.x);
    const std::vector<double> f = score_multiclass(m, in);
    const double t = margin(f, s.y);
    if (t <= 0.0 || t >= m.gamma) return grad;
    int k_star = -1;
    for (int k = 0; k < m.num_classes; ++k)
        if (k != s.y && (k_star < 0 || f[k] > f[k_star])) k_star = k;
    const std::vector<double> diag_y = measurement_diag(m, s.y);
    const std::vector<double> diag_k = measurement_diag(m, k_star);
    for (int j = 0; j < d; ++j) {
        double dm = 0.0;
        for (int l = 1; l <= m.embedding.layers; ++l) {
            const sv::State up = embed::embed_state_shifted(m.embedding, s.x, l, j, M_PI / 4.0);
            const sv::State dn = embed::embed_state_shifted(m.embedding, s.x, l, j, -M_PI / 4.0);
            dm += (pure_score_for_grad(m, up, diag_y) - pure_score_for_grad(m, up, diag_k)) -
                  (pure_score_for_grad(m, dn, diag_y) - pure_score_for_grad(m, dn, diag_k));
        }
        grad[j] = (-1.0 / m.gamma) * depol_scale * dm;
    }
    return grad;
}

std::string to_checkpoint_json(const ClassifierModel& m) {
    json j;
    j["embedding"] = {{"family", embed::family_name(m.embedding.family)},
                      {"input_dim", m.embedding.input_dim},
                      {"layers", m.embedding.layers},
                      {"fixed_unitary_seed", m.embedding.fixed_unitary_seed},
                      {"depolarize_lambda", m.embedding.depolarize_lambda}};
    j["circuit"] = {{"layers", m.params.layers},
                    {"n_qubits", m.params.n_qubits},
                    {"angles", m.params.angles}};
    j["measurement"] = measurement_name(m.measurement);
    j["num_classes"] = m.num_classes;
    j["alpha"] = m.alpha;
    j["gamma"] = m.gamma;
    return j.dump(2);
}

ClassifierModel from_checkpoint_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("checkpoint parse error: ") + e.what());
    }
    try {
        ClassifierModel m;
        const json& e = j.at("embedding");
        m.embedding.family = embed::family_from_name(e.at("family").get<std::string>());
        m.embedding.input_dim = e.at("input_dim").get<int>();
        m.embedding.layers = e.at("layers").get<int>();
        m.embedding.fixed_unitary_seed = e.at("fixed_unitary_seed").get<std::uint64_t>();
        m.embedding.depolarize_lambda = e.at("depolarize_lambda").get<double>();
        const json& c = j.at("circuit");
        m.params.layers = c.at("layers").get<int>();
        m.params.n_qubits = c.at("n_qubits").get<int>();
        m.params.angles = c.at("angles").get<std::vector<double>>();
        m.measurement = measurement_from_name(j.at("measurement").get<std::string>());
        m.num_classes = j.at("num_classes").get<int>();
        m.alpha = j.at("alpha").get<double>();
        m.gamma = j.at("gamma").get<double>();
        m.validate();
        return m;
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("checkpoint field error: ") + e.what());
    }
}

} // namespace qadvlab::model
