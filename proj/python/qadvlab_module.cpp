#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "qadvlab/attacks.hpp"
#include "qadvlab/bounds.hpp"
#include "qadvlab/experiments.hpp"
#include "qadvlab/qmath.hpp"

namespace py = pybind11;
using namespace qadvlab;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

CMatrix matrix_from_numpy(const ComplexArray& arr) {
    require(arr.ndim() == 2 && arr.shape(0) == arr.shape(1), ErrorCode::InvalidArgument,
            "expected a square 2-d array");
    const std::size_t n = static_cast<std::size_t>(arr.shape(0));
    std::vector<cplx> entries(arr.data(), arr.data() + n * n);
    return CMatrix(n, std::move(entries));
}

py::array matrix_to_numpy(const CMatrix& m) {
    const std::size_t n = m.dim();
    py::array_t<std::complex<double>> out({n, n});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

SchattenOrder order_of(double r) {
    return std::isinf(r) ? SchattenOrder::infinity() : SchattenOrder(r);
}

embed::EmbeddingSpec spec_of(const std::string& family, int input_dim, int layers,
                             std::uint64_t unitary_seed, double depolarize_lambda) {
    embed::EmbeddingSpec spec;
    spec.family = embed::family_from_name(family);
    spec.input_dim = input_dim;
    spec.layers = layers;
    spec.fixed_unitary_seed = unitary_seed;
    spec.depolarize_lambda = depolarize_lambda;
    spec.validate();
    return spec;
}

std::vector<DensityMatrix> states_of(const std::vector<ComplexArray>& arrays) {
    std::vector<DensityMatrix> states;
    states.reserve(arrays.size());
    for (const auto& a : arrays)
        states.push_back(qmath::validate_density(matrix_from_numpy(a), 1e-8));
    return states;
}

// Thin owner of a classifier for the python surface.
struct PyModel {
    model::ClassifierModel m;

    PyModel(const std::string& family, int input_dim, int circuit_layers, std::uint64_t init_seed,
            const std::string& measurement, double alpha, int embed_layers,
            std::uint64_t unitary_seed, double depolarize_lambda, int num_classes, double gamma) {
        m.embedding = spec_of(family, input_dim, embed_layers, unitary_seed, depolarize_lambda);
        m.params = model::CircuitParams::random_init(circuit_layers, m.embedding.n_qubits(),
                                                     init_seed);
        m.measurement = model::measurement_from_name(measurement);
        m.alpha = alpha;
        m.num_classes = num_classes;
        m.gamma = gamma;
        m.validate();
    }

    double score_x(const std::vector<double>& x) const {
        return model::score(m, model::prepare(m, x));
    }
    double loss_xy(const std::vector<double>& x, int y) const { return model::loss(m, {x, y}); }
    std::vector<double> grad_input_xy(const std::vector<double>& x, int y) const {
        return model::grad_input(m, {x, y});
    }
    std::vector<double> grad_params_xy(const std::vector<double>& x, int y) const {
        return model::grad_params(m, model::prepare(m, x), y);
    }
    py::array observable(int class_k) const {
        return matrix_to_numpy(model::effective_observable(m, class_k).mat());
    }
    std::vector<double> fgsm(const std::vector<double>& x, int y, double epsilon, double p) const {
        attacks::AttackBudget budget;
        budget.space = attacks::AttackSpace::Classical;
        budget.p = order_of(p);
        budget.epsilon = epsilon;
        return attacks::fgsm_classical(m, {x, y}, budget);
    }
    py::array quantum_fgsm_x(const std::vector<double>& x, int y, double epsilon, double p,
                             int max_iter, double lr) const {
        attacks::AttackBudget budget;
        budget.space = attacks::AttackSpace::Quantum;
        budget.p = order_of(p);
        budget.epsilon = epsilon;
        const DensityMatrix rho = embed::embed(m.embedding, x);
        return matrix_to_numpy(
            attacks::quantum_fgsm(m, rho, y, budget, max_iter, lr > 0 ? lr : epsilon).mat());
    }
    std::string checkpoint() const { return model::to_checkpoint_json(m); }
};

} // namespace

PYBIND11_MODULE(_qadvlab, mod) {
    mod.doc() = "quantum classifier adversarial-robustness laboratory (C++ core)";

    py::register_exception<Error>(mod, "QadvlabError");

    // qmath
    mod.def(
        "eigh",
        [](const ComplexArray& arr) {
            const auto ed = qmath::eigh(HermitianMatrix(matrix_from_numpy(arr)));
            return py::make_tuple(ed.eigenvalues, matrix_to_numpy(ed.eigenvectors));
        },
        py::arg("matrix"), "Eigendecomposition of a complex Hermitian matrix");
    mod.def(
        "schatten_norm",
        [](const ComplexArray& arr, double r) {
            return qmath::schatten_norm(HermitianMatrix(matrix_from_numpy(arr)), order_of(r));
        },
        py::arg("matrix"), py::arg("r"));
    mod.def("dual_order", [](double r) {
        const SchattenOrder d = qmath::dual_order(order_of(r));
        return d.is_inf() ? std::numeric_limits<double>::infinity() : d.value();
    });
    mod.def(
        "holder_extremizer",
        [](const ComplexArray& arr, double r, double b) {
            return matrix_to_numpy(
                qmath::holder_extremizer(HermitianMatrix(matrix_from_numpy(arr)), order_of(r), b)
                    .mat());
        },
        py::arg("matrix"), py::arg("r"), py::arg("b"));
    mod.def(
        "validate_density",
        [](const ComplexArray& arr, double tol) {
            qmath::validate_density(matrix_from_numpy(arr), tol);
        },
        py::arg("matrix"), py::arg("tol") = 1e-10);

    // embeddings
    mod.def(
        "embed",
        [](const std::string& family, const std::vector<double>& x, int layers,
           std::uint64_t unitary_seed, double depolarize_lambda) {
            const auto spec = spec_of(family, static_cast<int>(x.size()), layers, unitary_seed,
                                      depolarize_lambda);
            return matrix_to_numpy(embed::embed(spec, x).mat());
        },
        py::arg("family"), py::arg("x"), py::arg("layers") = 1, py::arg("unitary_seed") = 0,
        py::arg("depolarize_lambda") = 0.0, "x -> rho(x) as a dense numpy matrix");
    mod.def(
        "depolarize",
        [](const ComplexArray& rho, double lam) {
            return matrix_to_numpy(
                embed::depolarize(qmath::validate_density(matrix_from_numpy(rho), 1e-8), lam)
                    .mat());
        },
        py::arg("rho"), py::arg("lambda_min"));
    mod.def(
        "pure_trace_distance",
        [](const ComplexArray& a, const ComplexArray& b) {
            return embed::pure_trace_distance(qmath::validate_density(matrix_from_numpy(a), 1e-8),
                                              qmath::validate_density(matrix_from_numpy(b), 1e-8));
        },
        py::arg("rho"), py::arg("rho_prime"));

    // model + attacks
    py::class_<PyModel>(mod, "Model")
        .def(py::init<const std::string&, int, int, std::uint64_t, const std::string&, double,
                      int, std::uint64_t, double, int, double>(),
             py::arg("family"), py::arg("input_dim"), py::arg("circuit_layers") = 4,
             py::arg("init_seed") = 0, py::arg("measurement") = "z_all", py::arg("alpha") = 10.0,
             py::arg("embed_layers") = 1, py::arg("unitary_seed") = 0,
             py::arg("depolarize_lambda") = 0.0, py::arg("num_classes") = 2,
             py::arg("gamma") = 1.0)
        .def("score", &PyModel::score_x, py::arg("x"))
        .def("loss", &PyModel::loss_xy, py::arg("x"), py::arg("y"))
        .def("grad_input", &PyModel::grad_input_xy, py::arg("x"), py::arg("y"))
        .def("grad_params", &PyModel::grad_params_xy, py::arg("x"), py::arg("y"))
        .def("effective_observable", &PyModel::observable, py::arg("class_k") = 0)
        .def("fgsm", &PyModel::fgsm, py::arg("x"), py::arg("y"), py::arg("epsilon"),
             py::arg("p") = std::numeric_limits<double>::infinity())
        .def("quantum_fgsm", &PyModel::quantum_fgsm_x, py::arg("x"), py::arg("y"),
             py::arg("epsilon"), py::arg("p") = std::numeric_limits<double>::infinity(),
             py::arg("max_iter") = 30, py::arg("lr") = 0.0)
        .def("checkpoint_json", &PyModel::checkpoint);

    // bounds
    py::class_<bounds::BoundConfig>(mod, "BoundConfig")
        .def(py::init([](double r, double b, double p, double epsilon, int m, int d,
                         std::size_t d_h, int l, int k, double gamma, double min_x_norm,
                         double delta_conf, double b_loss, double eta) {
                 bounds::BoundConfig cfg;
                 cfg.r = order_of(r);
                 cfg.b = b;
                 cfg.p = order_of(p);
                 cfg.epsilon = epsilon;
                 cfg.m = m;
                 cfg.d = d;
                 cfg.d_h = d_h;
                 cfg.l_layers = l;
                 cfg.k_classes = k;
                 cfg.gamma = gamma;
                 cfg.min_x_norm = min_x_norm;
                 cfg.delta_conf = delta_conf;
                 cfg.b_loss = b_loss;
                 cfg.eta = eta;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("r") = std::numeric_limits<double>::infinity(), py::arg("b") = 1.0,
             py::arg("p") = std::numeric_limits<double>::infinity(), py::arg("epsilon") = 0.0,
             py::arg("m") = 1, py::arg("d") = 1, py::arg("d_h") = 2, py::arg("l") = 1,
             py::arg("k") = 2, py::arg("gamma") = 1.0, py::arg("min_x_norm") = 1.0,
             py::arg("delta_conf") = 0.05, py::arg("b_loss") = 1.0, py::arg("eta") = 2.5);
    mod.def(
        "rc_bound_thm2",
        [](const std::vector<ComplexArray>& states, const bounds::BoundConfig& cfg) {
            return bounds::rc_bound_thm2(states_of(states), cfg);
        },
        py::arg("states"), py::arg("cfg"));
    mod.def(
        "mc_rc_estimate",
        [](const std::vector<ComplexArray>& states, const bounds::BoundConfig& cfg, int n_draws,
           std::uint64_t seed) {
            const auto est = bounds::mc_rc_estimate(states_of(states), {}, cfg, n_draws, seed);
            return py::make_tuple(est.mean, est.stderr);
        },
        py::arg("states"), py::arg("cfg"), py::arg("n_draws") = 500, py::arg("seed") = 0);
    mod.def(
        "excess_classical",
        [](const bounds::BoundConfig& cfg, const std::string& family, const std::string& variant) {
            return bounds::excess_classical_prop1(cfg, embed::family_from_name(family),
                                                  bounds::variant_from_name(variant));
        },
        py::arg("cfg"), py::arg("family"), py::arg("variant") = "prop1");
    mod.def("excess_quantum", &bounds::excess_quantum, py::arg("cfg"));
    mod.def("j_of_r", [](double r) { return bounds::j_of_r(order_of(r)); }, py::arg("r"));
    mod.def(
        "arc_bound_thm3",
        [](const std::vector<ComplexArray>& states, const bounds::BoundConfig& cfg,
           double excess) {
            const auto rep = bounds::arc_bound_thm3(states_of(states), cfg, excess);
            py::dict out;
            out["rc_bound"] = rep.rc_bound;
            out["excess_scaled"] = rep.excess_scaled;
            out["arc_bound"] = rep.arc_bound;
            out["pac_slack"] = rep.pac_slack;
            out["assembled_generalization_bound"] = rep.assembled_generalization_bound;
            return out;
        },
        py::arg("states"), py::arg("cfg"), py::arg("excess"));
    mod.def(
        "noisy_bounds_thm4",
        [](const std::vector<ComplexArray>& states, const bounds::BoundConfig& cfg) {
            return bounds::noisy_bounds_thm4(states_of(states), cfg);
        },
        py::arg("states"), py::arg("cfg"));
    mod.def("covering_log_lemma1", &bounds::covering_log_lemma1, py::arg("cfg"), py::arg("delta"));
    mod.def(
        "multiclass_bound_thm5",
        [](const std::vector<ComplexArray>& states, const bounds::BoundConfig& cfg,
           double excess) { return bounds::multiclass_bound_thm5(states_of(states), cfg, excess); },
        py::arg("states"), py::arg("cfg"), py::arg("excess"));
    mod.def("pac_assemble_thm1", &bounds::pac_assemble_thm1, py::arg("empirical_risk"),
            py::arg("complexity_term"), py::arg("cfg"));

    // experiments
    mod.def(
        "gen_dataset",
        [](int d, int train_m, int test_m, std::uint64_t seed) {
            experiments::GaussianTaskSpec spec;
            spec.d = d;
            spec.train_m = train_m;
            spec.test_m = test_m;
            spec.seed = seed;
            const auto data = experiments::gen_dataset(spec);
            auto pack = [](const std::vector<model::LabeledSample>& set) {
                py::list out;
                for (const auto& s : set) out.append(py::make_tuple(s.x, s.y));
                return out;
            };
            return py::make_tuple(pack(data.train), pack(data.test));
        },
        py::arg("d"), py::arg("train_m"), py::arg("test_m"), py::arg("seed") = 0);
}
