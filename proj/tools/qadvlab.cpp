#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qadvlab/experiments.hpp"
#include "qadvlab/qmath.hpp"
#include "qadvlab/rng.hpp"
#include "qadvlab/selftest.hpp"

namespace {

using namespace qadvlab;
using json = nlohmann::json;

json density_to_json(const DensityMatrix& rho) {
    json out;
    out["dim"] = rho.dim();
    json re = json::array(), im = json::array();
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        json row_re = json::array(), row_im = json::array();
        for (std::size_t j = 0; j < rho.dim(); ++j) {
            row_re.push_back(rho.mat()(i, j).real());
            row_im.push_back(rho.mat()(i, j).imag());
        }
        re.push_back(row_re);
        im.push_back(row_im);
    }
    out["real"] = re;
    out["imag"] = im;
    return out;
}

embed::FeatureVector parse_features(const std::string& text) {
    embed::FeatureVector x;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) x.push_back(std::stod(tok));
    require(!x.empty(), ErrorCode::ConfigError, "could not parse feature vector: " + text);
    return x;
}

void emit(const experiments::CsvTable& table, const std::string& out_path) {
    if (out_path.empty())
        std::cout << table.to_string();
    else
        table.write_file(out_path);
}

std::string order_str(const SchattenOrder& r) {
    if (r.is_inf()) return "inf";
    std::ostringstream os;
    os << r.value();
    return os.str();
}

int cmd_embed(const experiments::ExperimentConfig& cfg, const std::string& x_text) {
    embed::EmbeddingSpec spec = cfg.embedding;
    embed::FeatureVector x;
    if (!x_text.empty()) {
        x = parse_features(x_text);
        spec.input_dim = static_cast<int>(x.size());
    } else {
        x.assign(spec.input_dim, M_PI / 4.0);
    }
    const DensityMatrix rho = embed::embed(spec, x);
    qmath::validate_density(rho.mat(), 1e-10);
    json out;
    out["family"] = embed::family_name(spec.family);
    out["x"] = x;
    out["rho"] = density_to_json(rho);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_train(const experiments::ExperimentConfig& cfg, const std::string& out_path,
              std::uint64_t seed) {
    experiments::GaussianTaskSpec task = cfg.task;
    task.seed = seed;
    const experiments::Dataset data = experiments::gen_dataset(task);
    embed::EmbeddingSpec spec = cfg.embedding;
    spec.input_dim = task.d;
    model::ClassifierModel m0 = experiments::build_model(cfg, spec, splitmix64(seed + 1));
    const experiments::TrainResult tr =
        experiments::train_adversarial(m0, data.train, cfg.train, cfg.attack);
    const experiments::RiskTable risks =
        experiments::estimate_risks(tr.trained, data.train, data.test, cfg.attack);

    json out;
    out["risk_trace"] = tr.risk_trace;
    out["risks"] = {{"clean_train", risks.clean_train}, {"clean_test", risks.clean_test},
                    {"adv_train", risks.adv_train},     {"adv_test", risks.adv_test},
                    {"clean_gap", risks.clean_gap()},   {"adv_gap", risks.adv_gap()}};
    out["attack_lr"] = cfg.attack.effective_lr();
    std::cout << out.dump(2) << '\n';
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        require(f.good(), ErrorCode::IoError, "cannot open checkpoint path: " + out_path);
        f << model::to_checkpoint_json(tr.trained) << '\n';
    }
    return 0;
}

int cmd_attack(const experiments::ExperimentConfig& cfg, std::uint64_t seed) {
    experiments::GaussianTaskSpec task = cfg.task;
    task.seed = seed;
    task.train_m = 1;
    task.test_m = 0;
    const experiments::Dataset data = experiments::gen_dataset(task);
    const model::LabeledSample& s = data.train.front();
    embed::EmbeddingSpec spec = cfg.embedding;
    spec.input_dim = task.d;
    model::ClassifierModel m = experiments::build_model(cfg, spec, splitmix64(seed + 1));

    json out;
    out["x"] = s.x;
    out["y"] = s.y;
    out["clean_loss"] = model::loss(m, s);
    out["space"] = attacks::space_name(cfg.attack.budget.space);
    out["epsilon"] = cfg.attack.budget.epsilon;
    out["p"] = order_str(cfg.attack.budget.p);
    out["lr"] = cfg.attack.effective_lr();
    if (cfg.attack.budget.space == attacks::AttackSpace::Classical) {
        const embed::FeatureVector x_adv = attacks::fgsm_classical(m, s, cfg.attack.budget);
        out["x_adv"] = x_adv;
        out["adv_loss"] = model::loss(m, {x_adv, s.y});
    } else {
        const DensityMatrix rho = embed::embed(spec, s.x);
        const DensityMatrix adv = attacks::quantum_fgsm(m, rho, s.y, cfg.attack.budget,
                                                        cfg.attack.max_iter,
                                                        cfg.attack.effective_lr());
        out["rho_adv"] = density_to_json(adv);
        out["adv_loss"] = model::loss(m, model::PreparedState::from_density(adv), s.y);
    }
    out["rejected_loss"] = attacks::adversarial_loss(m, s, cfg.attack);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_bounds(const experiments::ExperimentConfig& cfg, const std::string& out_path,
               const std::string& variant_name, double lemma_delta) {
    const bounds::ExcessVariant variant = bounds::variant_from_name(variant_name);

    experiments::GaussianTaskSpec task = cfg.task;
    const experiments::Dataset data = experiments::gen_dataset(task);
    embed::EmbeddingSpec spec = cfg.embedding;
    spec.input_dim = task.d;

    bounds::BoundConfig bc = cfg.bound_cfg;
    bc.m = task.train_m;
    bc.d = task.d;
    bc.d_h = spec.hilbert_dim();
    bc.l_layers = spec.layers;

    std::vector<DensityMatrix> states;
    states.reserve(data.train.size());
    for (const auto& s : data.train) states.push_back(embed::embed(spec, s.x));

    const double excess = cfg.attack.budget.space == attacks::AttackSpace::Quantum
                              ? bounds::excess_quantum(bc)
                              : bounds::excess_classical_prop1(bc, spec.family, variant);
    const bounds::BoundReport rep = bounds::arc_bound_thm3(states, bc, excess);
    const auto mc = bounds::mc_rc_estimate(states, {}, bc, 200, task.seed);

    experiments::CsvTable table;
    table.header = {"theorem", "r", "p", "epsilon", "m", "d", "d_H", "family", "variant", "value"};
    auto push = [&](const std::string& theorem, double value) {
        table.rows.push_back({theorem, order_str(bc.r), order_str(bc.p),
                              experiments::format_double(bc.epsilon), std::to_string(bc.m),
                              std::to_string(bc.d), std::to_string(bc.d_h),
                              embed::family_name(spec.family), variant_name,
                              experiments::format_double(value)});
    };
    push("thm2_rc", rep.rc_bound);
    push("thm3_excess", rep.excess_scaled);
    push("thm3_arc", rep.arc_bound);
    push("thm1_pac_slack", rep.pac_slack);
    push("thm1_assembled", rep.assembled_generalization_bound);
    push("mc_rc_mean", mc.mean);
    push("mc_rc_stderr", mc.stderr);
    push("j_of_r", bounds::j_of_r(bc.r));
    if (cfg.num_classes >= 2)
        push("thm5_multiclass", bounds::multiclass_bound_thm5(states, bc, excess));
    if (lemma_delta > 0.0) push("lemma1_log_cover", bounds::covering_log_lemma1(bc, lemma_delta));
    if (cfg.attack.budget.space == attacks::AttackSpace::Quantum && bc.epsilon > 0.0) {
        const auto lohi = bounds::noisy_bounds_thm4(states, bc);
        push("thm4_lower_ref", lohi.first);
        push("thm4_upper", lohi.second);
    }
    emit(table, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qadvlab: adversarially trained quantum-classifier robustness laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_path, variant = "prop1", x_text, axis = "samples";
    std::uint64_t seed = 0;
    bool seed_set = false;
    double lemma_delta = 0.0;
    app.add_option("--config", config_path, "JSON experiment config");
    app.add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
    app.add_option("--out", out_path, "output path (CSV or checkpoint)");
    app.add_option("--variant", variant, "excess-constant variant")
        ->check(CLI::IsMember({"prop1", "appendix"}));

    auto* c_embed = app.add_subcommand("embed", "print rho(x) as JSON");
    c_embed->add_option("--x", x_text, "comma-separated feature vector");
    auto* c_train = app.add_subcommand("train", "adversarial training run");
    auto* c_attack = app.add_subcommand("attack", "single-sample attack demo");
    auto* c_bounds = app.add_subcommand("bounds", "evaluate the bound report as CSV");
    c_bounds->add_option("--delta", lemma_delta, "covering-number resolution for the Lemma 1 row");
    auto* c_sweep_dim = app.add_subcommand("sweep-dim", "dimension sweep CSV");
    auto* c_sweep_noise = app.add_subcommand("sweep-noise", "noise/attack-strength sweep CSV");
    auto* c_sweep_gen = app.add_subcommand("sweep-gen", "generalization-curve sweep CSV");
    c_sweep_gen->add_option("--axis", axis, "x axis")->check(CLI::IsMember({"samples", "epochs"}));
    auto* c_selftest = app.add_subcommand("selftest", "run the module invariant suites");

    // Global flags may follow the subcommand.
    for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage / validation errors exit 1
    }

    try {
        qadvlab::experiments::ExperimentConfig cfg;
        if (!config_path.empty())
            cfg = qadvlab::experiments::ExperimentConfig::from_json_file(config_path);
        else
            qadvlab::require(app.got_subcommand(c_selftest) || app.got_subcommand(c_embed) ||
                                 app.got_subcommand(c_attack) || app.got_subcommand(c_train),
                             qadvlab::ErrorCode::ConfigError,
                             "this subcommand requires --config <path>");
        if (seed_set) {
            cfg.task.seed = seed;
            cfg.train.seed = seed;
            cfg.attack.seed = seed;
        }

        if (app.got_subcommand(c_embed)) return cmd_embed(cfg, x_text);
        if (app.got_subcommand(c_train)) return cmd_train(cfg, out_path, cfg.task.seed);
        if (app.got_subcommand(c_attack)) return cmd_attack(cfg, cfg.task.seed);
        if (app.got_subcommand(c_bounds)) return cmd_bounds(cfg, out_path, variant, lemma_delta);
        if (app.got_subcommand(c_sweep_dim)) {
            emit(qadvlab::experiments::sweep_dimension(cfg, cfg.sweep_dims, cfg.sweep_families,
                                                       cfg.n_seeds),
                 out_path);
            return 0;
        }
        if (app.got_subcommand(c_sweep_noise)) {
            emit(qadvlab::experiments::sweep_noise(cfg, cfg.sweep_epsilons, cfg.sweep_lambda_min,
                                                   cfg.n_seeds),
                 out_path);
            return 0;
        }
        if (app.got_subcommand(c_sweep_gen)) {
            emit(qadvlab::experiments::sweep_generalization(cfg, axis, cfg.n_seeds), out_path);
            return 0;
        }
        if (app.got_subcommand(c_selftest))
            return qadvlab::selftest::run_all(std::cout) ? 0 : 2;
    } catch (const qadvlab::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
