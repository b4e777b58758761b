#include "qadvlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qadvlab/rng.hpp"

namespace qadvlab::experiments {

using json = nlohmann::json;

namespace {

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
    double s_ = 0.0, c_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
    return splitmix64(splitmix64(splitmix64(splitmix64(base) ^ a) + b) ^ (c * 0x9e3779b97f4a7c15ull));
}

} // namespace

std::vector<double> GaussianTaskSpec::class_mean(int y) const {
    std::vector<double> mu(d, M_PI / 4.0);
    if (y == 1)
        for (int j = d / 2; j < d; ++j) mu[j] = -M_PI / 4.0;
    return mu;
}

namespace {

std::vector<model::LabeledSample> draw_samples(const GaussianTaskSpec& spec, int count, Rng rng) {
    std::vector<model::LabeledSample> out;
    out.reserve(count);
    const std::vector<double> mu0 = spec.class_mean(0);
    const std::vector<double> mu1 = spec.class_mean(1);
    for (int i = 0; i < count; ++i) {
        model::LabeledSample s;
        s.y = rng.uniform() < 0.5 ? 0 : 1;
        const std::vector<double>& mu = s.y == 0 ? mu0 : mu1;
        s.x.resize(spec.d);
        for (int j = 0; j < spec.d; ++j) s.x[j] = mu[j] + rng.gauss();
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

Dataset gen_dataset(const GaussianTaskSpec& spec) {
    require(spec.d >= 1 && spec.train_m >= 1 && spec.test_m >= 0, ErrorCode::ConfigError,
            "gen_dataset: bad task spec");
    Dataset ds;
    ds.train = draw_samples(spec, spec.train_m, Rng::substream(spec.seed, 1));
    ds.test = draw_samples(spec, spec.test_m, Rng::substream(spec.seed, 2));
    return ds;
}

namespace {

struct AttackedSample {
    model::PreparedState state;
    double loss = 0.0;
};

// Attack at the current parameters with the rejection rule: if the attacked
// point does not increase the loss, fall back to the clean input.
AttackedSample attack_sample(const model::ClassifierModel& m, const model::LabeledSample& s,
                             const attacks::AttackConfig& atk) {
    AttackedSample out;
    model::PreparedState clean = model::prepare(m, s.x);
    const double clean_loss = model::loss(m, clean, s.y);
    if (atk.budget.epsilon == 0.0) {
        out.state = std::move(clean);
        out.loss = clean_loss;
        return out;
    }
    if (atk.budget.space == attacks::AttackSpace::Classical) {
        const embed::FeatureVector x_adv = attacks::fgsm_classical(m, s, atk.budget);
        model::PreparedState adv = model::prepare(m, x_adv);
        const double adv_loss = model::loss(m, adv, s.y);
        if (!atk.reject_non_increasing || adv_loss >= clean_loss) {
            out.state = std::move(adv);
            out.loss = adv_loss;
        } else {
            out.state = std::move(clean);
            out.loss = clean_loss;
        }
        return out;
    }
    const DensityMatrix rho = embed::embed(m.embedding, s.x);
    const DensityMatrix rho_adv =
        attacks::quantum_fgsm(m, rho, s.y, atk.budget, atk.max_iter, atk.effective_lr());
    model::PreparedState adv = model::PreparedState::from_density(rho_adv);
    const double adv_loss = model::loss(m, adv, s.y);
    if (!atk.reject_non_increasing || adv_loss >= clean_loss) {
        out.state = std::move(adv);
        out.loss = adv_loss;
    } else {
        out.state = std::move(clean);
        out.loss = clean_loss;
    }
    return out;
}

} // namespace

TrainResult train_adversarial(const model::ClassifierModel& m0,
                              const std::vector<model::LabeledSample>& train_set,
                              const TrainConfig& cfg, const attacks::AttackConfig& attack) {
    require(cfg.epochs >= 0, ErrorCode::ConfigError, "train: epochs must be >= 0");
    require(cfg.learning_rate > 0.0, ErrorCode::ConfigError, "train: learning rate must be > 0");
    require(!train_set.empty(), ErrorCode::InvalidArgument, "train: empty training set");
    model::ClassifierModel m = m0;
    m.validate();

    TrainResult result;
    result.risk_trace.reserve(cfg.epochs);
    const std::size_t n_params = m.params.size();
    const double inv_m = 1.0 / static_cast<double>(train_set.size());

    // Adam state (used only when selected).
    std::vector<double> adam_m(n_params, 0.0), adam_v(n_params, 0.0);
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        KahanSum risk;
        std::vector<KahanSum> grad(n_params);
        for (const model::LabeledSample& s : train_set) {
            const AttackedSample att = attack_sample(m, s, attack);
            risk.add(att.loss);
            const std::vector<double> g = model::grad_params(m, att.state, s.y);
            for (std::size_t i = 0; i < n_params; ++i) grad[i].add(g[i]);
        }
        const double epoch_risk = risk.value() * inv_m;
        require(std::isfinite(epoch_risk), ErrorCode::NumericalFailure,
                "train: non-finite adversarial risk, aborting");
        result.risk_trace.push_back(epoch_risk);

        if (cfg.optimizer == Optimizer::GradientDescent) {
            for (std::size_t i = 0; i < n_params; ++i)
                m.params.angles[i] -= cfg.learning_rate * grad[i].value() * inv_m;
        } else {
            const double t = epoch + 1.0;
            for (std::size_t i = 0; i < n_params; ++i) {
                const double g = grad[i].value() * inv_m;
                adam_m[i] = beta1 * adam_m[i] + (1.0 - beta1) * g;
                adam_v[i] = beta2 * adam_v[i] + (1.0 - beta2) * g * g;
                const double mhat = adam_m[i] / (1.0 - std::pow(beta1, t));
                const double vhat = adam_v[i] / (1.0 - std::pow(beta2, t));
                m.params.angles[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + adam_eps);
            }
        }
        for (double a : m.params.angles)
            require(std::isfinite(a), ErrorCode::NumericalFailure, "train: parameters diverged");
    }
    result.trained = std::move(m);
    return result;
}

RiskTable estimate_risks(const model::ClassifierModel& m,
                         const std::vector<model::LabeledSample>& train_set,
                         const std::vector<model::LabeledSample>& test_set,
                         const attacks::AttackConfig& attack) {
    auto mean_clean = [&](const std::vector<model::LabeledSample>& set) {
        KahanSum sum;
        for (const auto& s : set) sum.add(model::loss(m, s));
        return set.empty() ? 0.0 : sum.value() / set.size();
    };
    auto mean_adv = [&](const std::vector<model::LabeledSample>& set) {
        KahanSum sum;
        for (const auto& s : set) sum.add(attacks::adversarial_loss(m, s, attack));
        return set.empty() ? 0.0 : sum.value() / set.size();
    };
    RiskTable t;
    t.clean_train = mean_clean(train_set);
    t.clean_test = mean_clean(test_set);
    if (attack.budget.epsilon == 0.0) {
        t.adv_train = t.clean_train;
        t.adv_test = t.clean_test;
    } else {
        t.adv_train = mean_adv(train_set);
        t.adv_test = mean_adv(test_set);
    }
    return t;
}

namespace {

SchattenOrder order_from_json(const json& j, const char* key, SchattenOrder fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return SchattenOrder::infinity();
        fail(ErrorCode::ConfigError, std::string("config: bad order string for ") + key);
    }
    return SchattenOrder(v.get<double>());
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("config parse error: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        if (j.contains("task")) {
            const json& t = j["task"];
            cfg.task.d = t.value("d", cfg.task.d);
            cfg.task.train_m = t.value("train_m", cfg.task.train_m);
            cfg.task.test_m = t.value("test_m", cfg.task.test_m);
            cfg.task.seed = t.value("seed", cfg.task.seed);
        }
        if (j.contains("embedding")) {
            const json& e = j["embedding"];
            cfg.embedding.family =
                embed::family_from_name(e.value("family", std::string("angle")));
            cfg.embedding.input_dim = e.value("input_dim", cfg.task.d);
            cfg.embedding.layers = e.value("layers", 1);
            cfg.embedding.fixed_unitary_seed = e.value("fixed_unitary_seed", 0ull);
            cfg.embedding.depolarize_lambda = e.value("depolarize_lambda", 0.0);
        } else {
            cfg.embedding.input_dim = cfg.task.d;
        }
        if (j.contains("model")) {
            const json& m = j["model"];
            cfg.circuit_layers = m.value("circuit_layers", cfg.circuit_layers);
            cfg.measurement =
                model::measurement_from_name(m.value("measurement", std::string("z_all")));
            cfg.num_classes = m.value("num_classes", cfg.num_classes);
            cfg.alpha = m.value("alpha", cfg.alpha);
            cfg.gamma = m.value("gamma", cfg.gamma);
        }
        if (j.contains("train")) {
            const json& t = j["train"];
            cfg.train.epochs = t.value("epochs", cfg.train.epochs);
            cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
            const std::string opt = t.value("optimizer", std::string("gd"));
            if (opt == "gd" || opt == "gradient_descent")
                cfg.train.optimizer = Optimizer::GradientDescent;
            else if (opt == "adam")
                cfg.train.optimizer = Optimizer::Adam;
            else
                fail(ErrorCode::ConfigError, "config: unknown optimizer " + opt);
            cfg.train.seed = t.value("seed", cfg.train.seed);
        }
        if (j.contains("attack")) {
            const json& a = j["attack"];
            cfg.attack.budget.space =
                attacks::space_from_name(a.value("space", std::string("classical")));
            cfg.attack.budget.p = order_from_json(a, "p", SchattenOrder::infinity());
            cfg.attack.budget.epsilon = a.value("epsilon", 0.0);
            cfg.attack.lr = a.value("lr", 0.0);
            cfg.attack.max_iter = a.value("max_iter", 30);
            cfg.attack.seed = a.value("seed", 0ull);
            cfg.attack.reject_non_increasing = a.value("reject_non_increasing", true);
        }
        if (j.contains("bounds")) {
            const json& b = j["bounds"];
            cfg.bound_cfg.r = order_from_json(b, "r", SchattenOrder::infinity());
            cfg.bound_cfg.p = order_from_json(b, "p", cfg.attack.budget.p);
            cfg.bound_cfg.b = b.value("b", 1.0);
            cfg.bound_cfg.epsilon = b.value("epsilon", cfg.attack.budget.epsilon);
            cfg.bound_cfg.m = b.value("m", cfg.task.train_m);
            cfg.bound_cfg.d = b.value("d", cfg.task.d);
            cfg.bound_cfg.d_h = b.value("d_h", std::size_t{0});
            cfg.bound_cfg.l_layers = b.value("l", cfg.embedding.layers);
            cfg.bound_cfg.k_classes = b.value("k", cfg.num_classes);
            cfg.bound_cfg.gamma = b.value("gamma", cfg.gamma);
            cfg.bound_cfg.min_x_norm = b.value("min_x_norm", 1.0);
            cfg.bound_cfg.delta_conf = b.value("delta_conf", 0.05);
            cfg.bound_cfg.b_loss = b.value("b_loss", 1.0);
            cfg.bound_cfg.eta = b.value("eta", cfg.alpha / 4.0);
        } else {
            cfg.bound_cfg.p = cfg.attack.budget.p;
            cfg.bound_cfg.epsilon = cfg.attack.budget.epsilon;
            cfg.bound_cfg.m = cfg.task.train_m;
            cfg.bound_cfg.d = cfg.task.d;
            cfg.bound_cfg.eta = cfg.alpha / 4.0;
        }
        if (j.contains("sweep")) {
            const json& s = j["sweep"];
            if (s.contains("dims")) cfg.sweep_dims = s["dims"].get<std::vector<int>>();
            if (s.contains("families"))
                cfg.sweep_families = s["families"].get<std::vector<std::string>>();
            if (s.contains("epsilons"))
                cfg.sweep_epsilons = s["epsilons"].get<std::vector<double>>();
            cfg.sweep_lambda_min = s.value("lambda_min", cfg.sweep_lambda_min);
            cfg.n_seeds = s.value("n_seeds", cfg.n_seeds);
            if (s.contains("sample_sizes"))
                cfg.sweep_sample_sizes = s["sample_sizes"].get<std::vector<int>>();
            if (s.contains("epoch_counts"))
                cfg.sweep_epoch_counts = s["epoch_counts"].get<std::vector<int>>();
        }
        return cfg;
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("config field error: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::IoError, "config file not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

model::ClassifierModel build_model(const ExperimentConfig& cfg, const embed::EmbeddingSpec& spec,
                                   std::uint64_t init_seed) {
    model::ClassifierModel m;
    m.embedding = spec;
    m.params = model::CircuitParams::random_init(cfg.circuit_layers, spec.n_qubits(), init_seed);
    m.measurement = cfg.measurement;
    m.num_classes = cfg.num_classes;
    m.alpha = cfg.alpha;
    m.gamma = cfg.gamma;
    m.validate();
    return m;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

void CsvTable::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary); // binary keeps LF endings everywhere
    require(out.good(), ErrorCode::IoError, "cannot open output file: " + path);
    out << to_string();
}

int worker_count() {
    const char* env = std::getenv("QADVLAB_THREADS");
    int n = 0;
    if (env && *env) n = std::atoi(env);
    if (n <= 0) n = std::min(8u, std::max(1u, std::thread::hardware_concurrency()));
    return std::max(1, n);
}

namespace {

// Runs jobs 0..n-1 on the worker pool; results must be written to
// preallocated slots so scheduling cannot change the output.
template <typename F>
void parallel_for(std::size_t n_jobs, F&& f) {
    const int workers = std::min<std::size_t>(worker_count(), n_jobs);
    if (workers <= 1) {
        for (std::size_t j = 0; j < n_jobs; ++j) f(j);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t j = next.fetch_add(1);
                if (j >= n_jobs) return;
                try {
                    f(j);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string sanitize_message(std::string msg) {
    for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
    return msg;
}

double empirical_min_norm(const std::vector<model::LabeledSample>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : set) {
        double n2 = 0.0;
        for (double v : s.x) n2 += v * v;
        best = std::min(best, std::sqrt(n2));
    }
    return best;
}

struct DimCell {
    bool ok = false;
    std::string error;
    RiskTable risks;
    double rc_bound = 0.0;
    double excess_prop1 = 0.0, arc_prop1 = 0.0;
    double excess_appendix = 0.0, arc_appendix = 0.0;
    double mc_mean = 0.0, mc_stderr = 0.0;
};

struct CellStats {
    // Mean and standard error per numeric column, over ok cells.
    std::vector<double> mean, stderr;
    int count = 0;
};

CellStats aggregate(const std::vector<std::vector<double>>& rows) {
    CellStats st;
    if (rows.empty()) return st;
    const std::size_t k = rows.front().size();
    st.mean.assign(k, 0.0);
    st.stderr.assign(k, 0.0);
    st.count = static_cast<int>(rows.size());
    for (std::size_t c = 0; c < k; ++c) {
        KahanSum sum;
        for (const auto& r : rows) sum.add(r[c]);
        st.mean[c] = sum.value() / st.count;
        if (st.count > 1) {
            KahanSum sq;
            for (const auto& r : rows) sq.add((r[c] - st.mean[c]) * (r[c] - st.mean[c]));
            st.stderr[c] = std::sqrt(std::max(0.0, sq.value() / (st.count - 1)) / st.count);
        }
    }
    return st;
}

} // namespace

CsvTable sweep_dimension(const ExperimentConfig& cfg, const std::vector<int>& dims,
                         const std::vector<std::string>& families, int n_seeds) {
    require(!dims.empty() && !families.empty() && n_seeds >= 1, ErrorCode::ConfigError,
            "sweep-dim: empty grid");

    struct Job {
        std::size_t fam_idx, dim_idx;
        int seed_idx;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < families.size(); ++f)
        for (std::size_t d = 0; d < dims.size(); ++d)
            for (int s = 0; s < n_seeds; ++s) jobs.push_back({f, d, s});
    std::vector<DimCell> cells(jobs.size());

    parallel_for(jobs.size(), [&](std::size_t j) {
        const Job& job = jobs[j];
        DimCell& cell = cells[j];
        try {
            const embed::Family family = embed::family_from_name(families[job.fam_idx]);
            const int d = dims[job.dim_idx];
            const std::uint64_t cell_seed =
                mix_seed(cfg.task.seed, job.fam_idx + 1, static_cast<std::uint64_t>(d),
                         static_cast<std::uint64_t>(job.seed_idx));

            GaussianTaskSpec task = cfg.task;
            task.d = d;
            task.seed = mix_seed(cell_seed, 1);
            const Dataset data = gen_dataset(task);

            embed::EmbeddingSpec spec = cfg.embedding;
            spec.family = family;
            spec.input_dim = d;
            spec.validate();

            model::ClassifierModel m0 = build_model(cfg, spec, mix_seed(cell_seed, 2));
            TrainConfig tc = cfg.train;
            tc.seed = mix_seed(cell_seed, 3);
            const TrainResult tr = train_adversarial(m0, data.train, tc, cfg.attack);
            cell.risks = estimate_risks(tr.trained, data.train, data.test, cfg.attack);

            bounds::BoundConfig bc = cfg.bound_cfg;
            bc.m = task.train_m;
            bc.d = d;
            bc.d_h = spec.hilbert_dim();
            bc.b = tr.trained.norm_budget();
            bc.p = cfg.attack.budget.p;
            bc.epsilon = cfg.attack.budget.epsilon;
            bc.l_layers = spec.layers;
            bc.min_x_norm = std::max(empirical_min_norm(data.train), 1e-9);

            std::vector<sv::State> train_states;
            train_states.reserve(data.train.size());
            for (const auto& s : data.train) train_states.push_back(embed::embed_state(spec, s.x));

            cell.rc_bound = bounds::rc_bound_thm2_pure(train_states, bc);
            cell.excess_prop1 =
                bounds::excess_classical_prop1(bc, family, bounds::ExcessVariant::Prop1);
            cell.excess_appendix =
                bounds::excess_classical_prop1(bc, family, bounds::ExcessVariant::Appendix);
            const double jr = bounds::j_of_r(bc.r);
            cell.arc_prop1 = cell.rc_bound + bc.b * cell.excess_prop1 * jr / std::sqrt(bc.m);
            cell.arc_appendix = cell.rc_bound + bc.b * cell.excess_appendix * jr / std::sqrt(bc.m);

            const bounds::McEstimate mc =
                bounds::mc_rc_estimate_pure(train_states, {}, bc, 200, mix_seed(cell_seed, 4));
            cell.mc_mean = mc.mean;
            cell.mc_stderr = mc.stderr;
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = sanitize_message(e.what());
        }
    });

    CsvTable out;
    out.header = {"kind",      "family",       "axis",      "axis_value",      "seed",
                  "clean_train", "clean_test", "adv_train", "adv_test",        "clean_gap",
                  "adv_gap",   "gap_excess",   "rc_bound",  "excess_prop1",    "arc_prop1",
                  "excess_appendix", "arc_appendix", "mc_rc_mean", "mc_rc_stderr", "status"};

    auto cell_numbers = [](const DimCell& c) -> std::vector<double> {
        return {c.risks.clean_train, c.risks.clean_test, c.risks.adv_train, c.risks.adv_test,
                c.risks.clean_gap(), c.risks.adv_gap(),  c.risks.adv_gap() - c.risks.clean_gap(),
                c.rc_bound,          c.excess_prop1,     c.arc_prop1,       c.excess_appendix,
                c.arc_appendix,      c.mc_mean,          c.mc_stderr};
    };

    for (std::size_t f = 0; f < families.size(); ++f)
        for (std::size_t d = 0; d < dims.size(); ++d) {
            std::vector<std::vector<double>> ok_rows;
            for (int s = 0; s < n_seeds; ++s) {
                const std::size_t idx = (f * dims.size() + d) * n_seeds + s;
                const DimCell& c = cells[idx];
                std::vector<std::string> row = {"cell", families[f], "d",
                                                std::to_string(dims[d]), std::to_string(s)};
                if (c.ok) {
                    for (double v : cell_numbers(c)) row.push_back(format_double(v));
                    row.push_back("ok");
                    ok_rows.push_back(cell_numbers(c));
                } else {
                    for (int k = 0; k < 14; ++k) row.push_back("nan");
                    row.push_back("error: " + c.error);
                }
                out.rows.push_back(std::move(row));
            }
            const CellStats st = aggregate(ok_rows);
            for (const char* kind : {"mean", "stderr"}) {
                std::vector<std::string> row = {kind, families[f], "d", std::to_string(dims[d]),
                                                "-1"};
                if (st.count > 0) {
                    const std::vector<double>& vals =
                        std::string(kind) == "mean" ? st.mean : st.stderr;
                    for (double v : vals) row.push_back(format_double(v));
                    row.push_back("ok:" + std::to_string(st.count));
                } else {
                    for (int k = 0; k < 14; ++k) row.push_back("nan");
                    row.push_back("error: no successful cells");
                }
                out.rows.push_back(std::move(row));
            }
        }
    return out;
}

namespace {

struct NoiseCell {
    bool ok = false;
    std::string error;
    // indexed [eps][arm] with arm 0 = noiseless, 1 = noisy
    std::vector<std::array<RiskTable, 2>> risks;
    std::vector<std::array<double, 2>> rc, excess_q, arc_q, thm4_upper;
    std::vector<std::array<double, 2>> mc_mean, mc_stderr;
};

} // namespace

CsvTable sweep_noise(const ExperimentConfig& cfg, const std::vector<double>& epsilons,
                     double lambda_min, int n_seeds) {
    require(!epsilons.empty() && n_seeds >= 1, ErrorCode::ConfigError, "sweep-noise: empty grid");
    double max_eps = 0.0;
    for (double e : epsilons) max_eps = std::max(max_eps, e);
    require(lambda_min >= max_eps, ErrorCode::AssumptionViolation,
            "sweep-noise: lambda_min must be >= max attack epsilon (Assumption 1)");

    std::vector<NoiseCell> cells(n_seeds);
    parallel_for(static_cast<std::size_t>(n_seeds), [&](std::size_t s) {
        NoiseCell& cell = cells[s];
        try {
            const std::uint64_t cell_seed = mix_seed(cfg.task.seed, 0x6e6f697365ull, s);
            GaussianTaskSpec task = cfg.task;
            task.seed = mix_seed(cell_seed, 1);
            const Dataset data = gen_dataset(task);

            embed::EmbeddingSpec clean_spec = cfg.embedding;
            clean_spec.input_dim = task.d;
            clean_spec.depolarize_lambda = 0.0;
            clean_spec.validate();
            embed::EmbeddingSpec noisy_spec = clean_spec;
            noisy_spec.depolarize_lambda = lambda_min;
            noisy_spec.validate();

            // Train once per seed on the noiseless embedding (quantum FGSM at
            // the configured training budget).
            model::ClassifierModel m0 = build_model(cfg, clean_spec, mix_seed(cell_seed, 2));
            TrainConfig tc = cfg.train;
            tc.seed = mix_seed(cell_seed, 3);
            attacks::AttackConfig train_attack = cfg.attack;
            train_attack.budget.space = attacks::AttackSpace::Quantum;
            const TrainResult tr = train_adversarial(m0, data.train, tc, train_attack);

            const std::size_t n_eps = epsilons.size();
            cell.risks.resize(n_eps);
            cell.rc.resize(n_eps);
            cell.excess_q.resize(n_eps);
            cell.arc_q.resize(n_eps);
            cell.thm4_upper.resize(n_eps);
            cell.mc_mean.resize(n_eps);
            cell.mc_stderr.resize(n_eps);

            for (int arm = 0; arm < 2; ++arm) {
                const embed::EmbeddingSpec& spec = arm == 0 ? clean_spec : noisy_spec;
                model::ClassifierModel m = tr.trained;
                m.embedding = spec;

                std::vector<DensityMatrix> states;
                states.reserve(data.train.size());
                for (const auto& smp : data.train) states.push_back(embed::embed(spec, smp.x));

                for (std::size_t e = 0; e < n_eps; ++e) {
                    attacks::AttackConfig atk = cfg.attack;
                    atk.budget.space = attacks::AttackSpace::Quantum;
                    atk.budget.epsilon = epsilons[e];
                    cell.risks[e][arm] = estimate_risks(m, data.train, data.test, atk);

                    bounds::BoundConfig bc = cfg.bound_cfg;
                    bc.m = task.train_m;
                    bc.d = task.d;
                    bc.d_h = spec.hilbert_dim();
                    bc.b = m.norm_budget();
                    bc.p = atk.budget.p;
                    bc.epsilon = epsilons[e];
                    cell.rc[e][arm] = bounds::rc_bound_thm2(states, bc);
                    cell.excess_q[e][arm] = bounds::excess_quantum(bc);
                    cell.arc_q[e][arm] = cell.rc[e][arm] + bc.b * cell.excess_q[e][arm] *
                                                               bounds::j_of_r(bc.r) /
                                                               std::sqrt(bc.m);
                    if (arm == 1) {
                        const auto lohi = bounds::noisy_bounds_thm4(states, bc);
                        cell.thm4_upper[e][arm] = lohi.second;
                    } else {
                        cell.thm4_upper[e][arm] = std::numeric_limits<double>::quiet_NaN();
                    }
                    const bounds::McEstimate mc =
                        bounds::mc_rc_estimate(states, {}, bc, 200, mix_seed(cell_seed, 5));
                    cell.mc_mean[e][arm] = mc.mean;
                    cell.mc_stderr[e][arm] = mc.stderr;
                }
            }
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = sanitize_message(e.what());
        }
    });

    CsvTable out;
    out.header = {"kind",      "arm",        "epsilon",  "seed",      "clean_train", "clean_test",
                  "adv_train", "adv_test",   "clean_gap", "adv_gap",  "rc_bound",    "excess_quantum",
                  "arc_quantum", "thm4_upper", "mc_rc_mean", "mc_rc_stderr", "status"};

    const char* arm_names[2] = {"noiseless", "noisy"};
    for (int arm = 0; arm < 2; ++arm)
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            std::vector<std::vector<double>> ok_rows;
            for (int s = 0; s < n_seeds; ++s) {
                const NoiseCell& c = cells[s];
                std::vector<std::string> row = {"cell", arm_names[arm], format_double(epsilons[e]),
                                                std::to_string(s)};
                if (c.ok) {
                    const RiskTable& r = c.risks[e][arm];
                    const std::vector<double> vals = {
                        r.clean_train,        r.clean_test,      r.adv_train,
                        r.adv_test,           r.clean_gap(),     r.adv_gap(),
                        c.rc[e][arm],         c.excess_q[e][arm], c.arc_q[e][arm],
                        c.thm4_upper[e][arm], c.mc_mean[e][arm], c.mc_stderr[e][arm]};
                    for (double v : vals) row.push_back(format_double(v));
                    row.push_back("ok");
                    ok_rows.push_back(vals);
                } else {
                    for (int k = 0; k < 12; ++k) row.push_back("nan");
                    row.push_back("error: " + c.error);
                }
                out.rows.push_back(std::move(row));
            }
            const CellStats st = aggregate(ok_rows);
            for (const char* kind : {"mean", "stderr"}) {
                std::vector<std::string> row = {kind, arm_names[arm], format_double(epsilons[e]),
                                                "-1"};
                if (st.count > 0) {
                    const std::vector<double>& vals =
                        std::string(kind) == "mean" ? st.mean : st.stderr;
                    for (double v : vals) row.push_back(format_double(v));
                    row.push_back("ok:" + std::to_string(st.count));
                } else {
                    for (int k = 0; k < 12; ++k) row.push_back("nan");
                    row.push_back("error: no successful cells");
                }
                out.rows.push_back(std::move(row));
            }
        }
    return out;
}

CsvTable sweep_generalization(const ExperimentConfig& cfg, const std::string& axis, int n_seeds) {
    require(axis == "samples" || axis == "epochs", ErrorCode::ConfigError,
            "sweep-gen: axis must be 'samples' or 'epochs'");
    const std::vector<int>& grid =
        axis == "samples" ? cfg.sweep_sample_sizes : cfg.sweep_epoch_counts;
    require(!grid.empty() && n_seeds >= 1, ErrorCode::ConfigError, "sweep-gen: empty grid");

    struct GenCell {
        bool ok = false;
        std::string error;
        RiskTable risks;
    };
    std::vector<GenCell> cells(grid.size() * n_seeds);
    parallel_for(cells.size(), [&](std::size_t j) {
        GenCell& cell = cells[j];
        try {
            const std::size_t g = j / n_seeds;
            const int s = static_cast<int>(j % n_seeds);
            const std::uint64_t cell_seed = mix_seed(cfg.task.seed, 0x67656eull + g, s);

            GaussianTaskSpec task = cfg.task;
            task.seed = mix_seed(cell_seed, 1);
            TrainConfig tc = cfg.train;
            tc.seed = mix_seed(cell_seed, 3);
            if (axis == "samples")
                task.train_m = grid[g];
            else
                tc.epochs = grid[g];

            const Dataset data = gen_dataset(task);
            embed::EmbeddingSpec spec = cfg.embedding;
            spec.input_dim = task.d;
            spec.validate();
            model::ClassifierModel m0 = build_model(cfg, spec, mix_seed(cell_seed, 2));
            const TrainResult tr = train_adversarial(m0, data.train, tc, cfg.attack);
            cell.risks = estimate_risks(tr.trained, data.train, data.test, cfg.attack);
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.error = sanitize_message(e.what());
        }
    });

    CsvTable out;
    out.header = {"kind",      "family",    "axis",     "axis_value", "seed",      "clean_train",
                  "clean_test", "adv_train", "adv_test", "clean_gap",  "adv_gap",  "gap_excess",
                  "status"};
    const std::string family = embed::family_name(cfg.embedding.family);
    const std::string axis_name = axis == "samples" ? "m" : "epochs";
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<std::vector<double>> ok_rows;
        for (int s = 0; s < n_seeds; ++s) {
            const GenCell& c = cells[g * n_seeds + s];
            std::vector<std::string> row = {"cell", family, axis_name, std::to_string(grid[g]),
                                            std::to_string(s)};
            if (c.ok) {
                const std::vector<double> vals = {
                    c.risks.clean_train, c.risks.clean_test, c.risks.adv_train,
                    c.risks.adv_test,    c.risks.clean_gap(), c.risks.adv_gap(),
                    c.risks.adv_gap() - c.risks.clean_gap()};
                for (double v : vals) row.push_back(format_double(v));
                row.push_back("ok");
                ok_rows.push_back(vals);
            } else {
                for (int k = 0; k < 7; ++k) row.push_back("nan");
                row.push_back("error: " + c.error);
            }
            out.rows.push_back(std::move(row));
        }
        const CellStats st = aggregate(ok_rows);
        for (const char* kind : {"mean", "stderr"}) {
            std::vector<std::string> row = {kind, family, axis_name, std::to_string(grid[g]), "-1"};
            if (st.count > 0) {
                const std::vector<double>& vals = std::string(kind) == "mean" ? st.mean : st.stderr;
                for (double v : vals) row.push_back(format_double(v));
                row.push_back("ok:" + std::to_string(st.count));
            } else {
                for (int k = 0; k < 7; ++k) row.push_back("nan");
                row.push_back("error: no successful cells");
            }
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

} // namespace qadvlab::experiments
