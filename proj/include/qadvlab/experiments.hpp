#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qadvlab/attacks.hpp"
#include "qadvlab/bounds.hpp"
#include "qadvlab/model.hpp"

namespace qadvlab::experiments {

// Conditional Gaussian task: labels Bernoulli(1/2), x ~ N(mu_y, I_d) with
// mu_0 = (pi/4) 1_d and mu_1 = (pi/4)(1_{floor(d/2)} (+) -1_{d-floor(d/2)}).
struct GaussianTaskSpec {
    int d = 2;
    int train_m = 20;
    int test_m = 1000;
    std::uint64_t seed = 0;

    std::vector<double> class_mean(int y) const;
};

struct Dataset {
    std::vector<model::LabeledSample> train;
    std::vector<model::LabeledSample> test;
};

Dataset gen_dataset(const GaussianTaskSpec& spec);

enum class Optimizer { GradientDescent, Adam };

struct TrainConfig {
    int epochs = 40;
    double learning_rate = 0.1;
    Optimizer optimizer = Optimizer::GradientDescent;
    std::uint64_t seed = 0;
};

struct TrainResult {
    model::ClassifierModel trained;
    std::vector<double> risk_trace; // adversarial empirical risk per epoch
};

// Full-batch descent on the adversarial empirical risk; the attack is
// recomputed every epoch at the current parameters.
TrainResult train_adversarial(const model::ClassifierModel& m,
                              const std::vector<model::LabeledSample>& train_set,
                              const TrainConfig& cfg, const attacks::AttackConfig& attack);

struct RiskTable {
    double clean_train = 0.0;
    double clean_test = 0.0;
    double adv_train = 0.0;
    double adv_test = 0.0;

    double clean_gap() const { return clean_test - clean_train; }
    double adv_gap() const { return adv_test - adv_train; }
};

RiskTable estimate_risks(const model::ClassifierModel& m,
                         const std::vector<model::LabeledSample>& train_set,
                         const std::vector<model::LabeledSample>& test_set,
                         const attacks::AttackConfig& attack);

// Everything a sweep cell needs; parsed from the JSON config file.
struct ExperimentConfig {
    GaussianTaskSpec task;
    embed::EmbeddingSpec embedding;
    int circuit_layers = 4;
    model::Measurement measurement = model::Measurement::ZAll;
    int num_classes = 2;
    double alpha = 10.0;
    double gamma = 1.0;
    TrainConfig train;
    attacks::AttackConfig attack;
    bounds::BoundConfig bound_cfg;
    // sweep block
    std::vector<int> sweep_dims = {2, 4, 6, 8};
    std::vector<std::string> sweep_families = {"angle"};
    std::vector<double> sweep_epsilons = {0.001, 0.004, 0.007, 0.01};
    double sweep_lambda_min = 0.011;
    int n_seeds = 5;
    std::vector<int> sweep_sample_sizes = {5, 10, 20, 40};
    std::vector<int> sweep_epoch_counts = {10, 20, 40};

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
};

model::ClassifierModel build_model(const ExperimentConfig& cfg, const embed::EmbeddingSpec& spec,
                                   std::uint64_t init_seed);

// CSV cells: numbers at 17 significant digits, comma separated, LF endings.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const;
    void write_file(const std::string& path) const;
};

// One row per (family, d, seed) plus mean and stderr rows per (family, d);
// both excess-constant variants are emitted as separate columns.
CsvTable sweep_dimension(const ExperimentConfig& cfg, const std::vector<int>& dims,
                         const std::vector<std::string>& families, int n_seeds);

// Noiseless vs depolarized arms over the attack-strength grid, with the
// Theorem 3 (quantum excess) and Theorem 4 bound columns.
CsvTable sweep_noise(const ExperimentConfig& cfg, const std::vector<double>& epsilons,
                     double lambda_min, int n_seeds);

// Generalization-gap curve against training-set size or epoch count.
CsvTable sweep_generalization(const ExperimentConfig& cfg, const std::string& axis, int n_seeds);

// QADVLAB_THREADS (0 or unset = auto); sweeps are deterministic regardless.
int worker_count();

} // namespace qadvlab::experiments
