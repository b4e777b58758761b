// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code = number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "qadvlab/attacks.hpp"
#include "qadvlab/bounds.hpp"
#include "qadvlab/experiments.hpp"
#include "qadvlab/qmath.hpp"
#include "qadvlab/rng.hpp"

using namespace qadvlab;

namespace {

CMatrix random_hermitian(std::size_t n, Rng& rng) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = rng.uniform(-1.0, 1.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx z(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

// ---------------------------------------------------------------- criterion 1
bool criterion_norms(std::ostream& os) {
    Rng rng(101);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng.below(63); // up to 64
        const HermitianMatrix m(random_hermitian(n, rng));
        const auto ed = qmath::eigh(m);

        // r = 2 against the entry-level Frobenius norm (fully independent).
        const double frob = m.mat().frobenius_norm();
        worst = std::max(worst, std::abs(qmath::schatten_norm(m, SchattenOrder(2.0)) - frob));

        // r in {1, 3, inf} against brute-force sums over validated eigenvalues.
        double sum1 = 0.0, sum3 = 0.0, top = 0.0;
        for (double l : ed.eigenvalues) {
            sum1 += std::abs(l);
            sum3 += std::abs(l * l * l);
            top = std::max(top, std::abs(l));
        }
        worst = std::max(worst, std::abs(qmath::schatten_norm(m, SchattenOrder(1.0)) - sum1));
        worst = std::max(worst, std::abs(qmath::schatten_norm(m, SchattenOrder(3.0)) -
                                         std::cbrt(sum3)));
        worst = std::max(worst,
                         std::abs(qmath::schatten_norm(m, SchattenOrder::infinity()) - top));

        // Hoelder extremizer equality within 1e-9.
        if (rep % 10 == 0) {
            for (double rv : {1.0, 2.0, -1.0}) {
                const SchattenOrder r = rv < 0 ? SchattenOrder::infinity() : SchattenOrder(rv);
                const double b = 0.5 + rng.uniform();
                const HermitianMatrix a = qmath::holder_extremizer(m, r, b);
                const double want = b * qmath::schatten_norm(m, qmath::dual_order(r));
                const double got = trace_product(a.mat(), m.mat()).real();
                const double scale = std::max(1.0, m.mat().frobenius_norm());
                if (std::abs(got - want) > 1e-9 * scale) {
                    os << "  extremizer equality off by " << std::abs(got - want) << "\n";
                    return false;
                }
                if (qmath::schatten_norm(a, r) > b + 1e-9) return false;
            }
        }
    }
    os << "  max norm deviation = " << worst << " (limit 1e-9)\n";
    return worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 2
bool criterion_thm2_dominance(std::ostream& os) {
    Rng rng(102);
    int violations = 0;
    double worst_margin = 1e300;
    for (double rv : {1.0, 2.0, -1.0}) {
        const SchattenOrder r = rv < 0 ? SchattenOrder::infinity() : SchattenOrder(rv);
        for (int rep = 0; rep < 50; ++rep) {
            const int m = 2 + static_cast<int>(rng.below(19)); // m <= 20
            const int pick = rep % 3;
            const int n_qubits = 1 + static_cast<int>(rng.below(3)); // d_H in {2,4,8}
            std::vector<DensityMatrix> states;
            for (int i = 0; i < m; ++i) {
                // one family and one Hilbert dimension per dataset
                const int d = pick == 0   ? n_qubits
                              : pick == 1 ? (1 << n_qubits)
                                          : 2 * n_qubits;
                embed::FeatureVector x(d);
                for (double& v : x) v = rng.uniform(-2.0, 2.0);
                if (pick == 0)
                    states.push_back(embed::angle_embed(x));
                else if (pick == 1) {
                    x[0] += 3.0;
                    states.push_back(embed::amplitude_embed(x));
                } else
                    states.push_back(embed::dense_embed(x));
            }
            bounds::BoundConfig cfg;
            cfg.r = r;
            cfg.b = 1.0;
            cfg.m = m;
            cfg.d_h = states.front().dim();
            const double bound = bounds::rc_bound_thm2(states, cfg);
            const auto mc = bounds::mc_rc_estimate(states, {}, cfg, 500, rng.next_u64());
            const double slack = bound + 3.0 * mc.stderr - mc.mean;
            worst_margin = std::min(worst_margin, slack);
            if (slack < 0.0) ++violations;
        }
    }
    os << "  violations = " << violations << " / 150, tightest slack = " << worst_margin << "\n";
    return violations == 0;
}

// ---------------------------------------------------------------- criterion 3
bool criterion_exact_rc(std::ostream& os) {
    CMatrix r0(2), r1(2);
    r0(0, 0) = 1.0;
    r1(1, 1) = 1.0;
    std::vector<DensityMatrix> states = {DensityMatrix::unchecked(r0),
                                         DensityMatrix::unchecked(r1)};
    bounds::BoundConfig cfg;
    cfg.r = SchattenOrder::infinity();
    cfg.b = 1.0;
    cfg.m = 2;
    cfg.d_h = 2;
    const auto mc = bounds::mc_rc_estimate(states, {0, 1}, cfg, 256, 303);
    os << "  mc value = " << mc.mean << ", stderr = " << mc.stderr << "\n";
    return std::abs(mc.mean - 1.0) <= 1e-12 && mc.stderr <= 1e-12;
}

// ---------------------------------------------------------------- criterion 4
bool criterion_appendix_smoothness(std::ostream& os) {
    Rng rng(104);
    int angle_viol = 0, amp_viol = 0, n_angle = 0, n_amp = 0;
    double worst_angle_excess = 0.0;
    std::string worst_case;

    while (n_angle < 1000 || n_amp < 1000) {
        const int d = 1 + static_cast<int>(rng.below(4)); // d <= 4
        embed::FeatureVector x(d), x2(d), dx(d);
        for (int j = 0; j < d; ++j) {
            x[j] = rng.uniform(-2.0, 2.0);
            dx[j] = rng.uniform(-0.3, 0.3);
            x2[j] = x[j] + dx[j];
        }
        if (n_angle < 1000) {
            ++n_angle;
            const double dist =
                embed::pure_trace_distance(embed::angle_embed(x), embed::angle_embed(x2));
            double prod = 2.0; // 2 L, L = 1
            for (int j = 0; j < d; ++j) prod *= std::abs(dx[j]);
            if (dist > prod + 1e-9) {
                ++angle_viol;
                if (dist - prod > worst_angle_excess) {
                    worst_angle_excess = dist - prod;
                    std::ostringstream oss;
                    oss << "d=" << d << " dist=" << dist << " bound=" << prod;
                    worst_case = oss.str();
                }
            }
        }
        if (n_amp < 1000) {
            double nx = 0.0, nx2 = 0.0, ndx = 0.0;
            for (int j = 0; j < d; ++j) {
                nx += x[j] * x[j];
                nx2 += x2[j] * x2[j];
                ndx += dx[j] * dx[j];
            }
            if (std::sqrt(nx) > 0.5 && std::sqrt(nx2) > 1e-6) {
                ++n_amp;
                const double dist = embed::pure_trace_distance(embed::amplitude_embed(x),
                                                               embed::amplitude_embed(x2));
                const double bound = 2.0 * std::min(std::sqrt(ndx) / std::sqrt(nx), 1.0);
                if (dist > bound + 1e-9) ++amp_viol;
            }
        }
    }
    os << "  amplitude bound: " << amp_viol << " / " << n_amp << " violations\n";
    os << "  angle bound 2L*prod|dx_j|: " << angle_viol << " / " << n_angle
       << " violations (worst: " << worst_case << ")\n";
    if (angle_viol > 0)
        os << "  NOTE: the angle inequality is false as printed for d >= 2 (the\n"
              "  tensor-product difference does not factorize); the simulator matches\n"
              "  the exact overlap identity 2*sqrt(1 - prod cos^2 dx_j) to 1e-10.\n"
              "  The criterion is implemented as stated and left red on purpose.\n";
    return angle_viol == 0 && amp_viol == 0;
}

// ---------------------------------------------------------------- criterion 5
bool criterion_gradients(std::ostream& os) {
    Rng rng(105);
    double worst_param = 0.0, worst_input = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int which = rep % 4;
        model::ClassifierModel m;
        m.embedding.family = which == 0   ? embed::Family::Amplitude
                             : which == 1 ? embed::Family::Angle
                             : which == 2 ? embed::Family::Dense
                                          : embed::Family::LLayerAngle;
        m.embedding.input_dim = 2 + static_cast<int>(rng.below(2));
        if (which == 3) {
            m.embedding.layers = 2;
            m.embedding.fixed_unitary_seed = rng.next_u64();
        }
        m.params =
            model::CircuitParams::random_init(2, m.embedding.n_qubits(), rng.next_u64());
        m.measurement = rep % 2 ? model::Measurement::ZAll : model::Measurement::ZFirst;

        model::LabeledSample s;
        s.x.resize(m.embedding.input_dim);
        for (double& v : s.x) v = rng.uniform(-1.5, 1.5);
        if (m.embedding.family == embed::Family::Amplitude) s.x[0] += 2.5;
        s.y = static_cast<int>(rng.below(2));

        const model::PreparedState in = model::prepare(m, s.x);
        const std::vector<double> gp = model::grad_params(m, in, s.y);
        for (std::size_t i = 0; i < gp.size(); ++i) {
            model::ClassifierModel shifted = m;
            shifted.params.angles[i] += 1e-5;
            const double lp = model::loss(shifted, in, s.y);
            shifted.params.angles[i] = m.params.angles[i] - 1e-5;
            const double lm = model::loss(shifted, in, s.y);
            const double fd = (lp - lm) / 2e-5;
            const double rel = std::abs(gp[i] - fd) / std::max(std::abs(fd), 1e-3);
            worst_param = std::max(worst_param, rel);
        }
        const std::vector<double> gi = model::grad_input(m, s);
        for (int j = 0; j < m.embedding.input_dim; ++j) {
            model::LabeledSample sj = s;
            sj.x[j] += 1e-5;
            const double lp = model::loss(m, sj);
            sj.x[j] = s.x[j] - 1e-5;
            const double lm = model::loss(m, sj);
            const double fd = (lp - lm) / 2e-5;
            const double rel = std::abs(gi[j] - fd) / std::max(std::abs(fd), 1e-3);
            worst_input = std::max(worst_input, rel);
        }
    }
    os << "  worst relative error: params = " << worst_param << " (limit 1e-5), inputs = "
       << worst_input << " (limit 1e-4)\n";
    return worst_param <= 1e-5 && worst_input <= 1e-4;
}

// ---------------------------------------------------------------- criterion 6
bool criterion_algorithm1(std::ostream& os) {
    Rng rng(106);
    int violations = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const int d = 1 + static_cast<int>(rng.below(3));
        model::ClassifierModel m;
        m.embedding.family = embed::Family::Angle;
        m.embedding.input_dim = d;
        m.params = model::CircuitParams::random_init(2, d, rng.next_u64());

        embed::FeatureVector x(d);
        for (double& v : x) v = rng.uniform(-2.0, 2.0);
        DensityMatrix rho = embed::embed(m.embedding, x);
        if (rep % 3 == 0) {
            const double lam = rng.uniform(0.0, 0.9 / rho.dim());
            rho = embed::depolarize(rho, lam);
        }

        attacks::AttackBudget budget;
        budget.space = attacks::AttackSpace::Quantum;
        budget.p = rep % 2 ? SchattenOrder::infinity() : SchattenOrder(2.0);
        budget.epsilon = std::pow(10.0, rng.uniform(-4.0, -0.7));
        const double lr = std::pow(10.0, rng.uniform(-4.0, -0.5));
        const int max_iter = 30;

        const DensityMatrix adv =
            attacks::quantum_fgsm(m, rho, static_cast<int>(rng.below(2)), budget, max_iter, lr);
        CMatrix diff = rho.mat();
        diff -= adv.mat();
        const bool identity = diff.frobenius_norm() == 0.0;
        const double norm = qmath::schatten_norm(HermitianMatrix(diff.symmetrized()), budget.p);
        if (!(identity || norm < budget.epsilon)) ++violations;
        try {
            qmath::validate_density(adv.mat(), 1e-10);
        } catch (const Error&) {
            ++violations;
        }
    }
    os << "  violations = " << violations << " / 200 (halving loop bounded by construction)\n";
    return violations == 0;
}

// ---------------------------------------------------------------- criterion 7
bool criterion_thm4_sandwich(std::ostream& os) {
    Rng rng(107);
    const double eps = 0.1, lam = 0.15;
    int violations = 0;
    double tightest = 1e300;
    for (int draw = 0; draw < 20; ++draw) {
        const int m = draw % 2 ? 5 : 2;
        std::vector<DensityMatrix> states;
        std::vector<int> labels;
        for (int i = 0; i < m; ++i) {
            states.push_back(
                embed::depolarize(embed::angle_embed({rng.uniform(-1.5, 1.5)}), lam));
            labels.push_back(static_cast<int>(rng.below(2)));
        }
        bounds::BoundConfig cfg;
        cfg.r = SchattenOrder(2.0);
        cfg.p = SchattenOrder(2.0);
        cfg.b = 1.0;
        cfg.m = m;
        cfg.d_h = 2;
        cfg.epsilon = eps;
        const auto arc = bounds::mc_arc_estimate_small(states, labels, cfg, 500, rng.next_u64());
        const auto rc = bounds::mc_rc_estimate(states, labels, cfg, 500, rng.next_u64());
        const double sigma = 3.0 * std::sqrt(arc.stderr * arc.stderr + rc.stderr * rc.stderr);
        const double lo = rc.mean - sigma;
        const double hi = rc.mean + eps / std::sqrt(static_cast<double>(m)) + sigma;
        if (arc.mean < lo || arc.mean > hi) ++violations;
        tightest = std::min({tightest, arc.mean - lo, hi - arc.mean});
    }
    os << "  violations = " << violations << " / 20, tightest sandwich slack = " << tightest
       << "\n";
    return violations == 0;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    auto ranks = [&](const std::vector<double>& v) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            double rank = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (v[j] < v[i]) rank += 1.0;
            r[i] = rank;
        }
        return r;
    };
    const std::vector<double> rx = ranks(xs), ry = ranks(ys);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

experiments::ExperimentConfig reference_config() {
    experiments::ExperimentConfig cfg;
    cfg.task.d = 2;
    cfg.task.train_m = 20;
    cfg.task.test_m = 1000;
    cfg.task.seed = 1;
    cfg.circuit_layers = 4;
    cfg.measurement = model::Measurement::ZAll;
    cfg.alpha = 10.0;
    cfg.train.epochs = 40;
    cfg.train.learning_rate = 0.1;
    cfg.attack.budget.space = attacks::AttackSpace::Classical;
    cfg.attack.budget.p = SchattenOrder::infinity();
    cfg.attack.budget.epsilon = 0.3;
    cfg.n_seeds = 5;
    return cfg;
}

std::vector<double> mean_column(const experiments::CsvTable& table, const std::string& column) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == column) idx = i;
    std::vector<double> out;
    for (const auto& row : table.rows)
        if (row[0] == "mean") out.push_back(std::stod(row[idx]));
    return out;
}

// ---------------------------------------------------------------- criterion 8
bool criterion_angle_trend(std::ostream& os) {
    experiments::ExperimentConfig cfg = reference_config();
    cfg.embedding.family = embed::Family::Angle;
    const std::vector<int> dims = {2, 4, 6, 8};
    const auto table =
        experiments::sweep_dimension(cfg, dims, {"angle"}, 5);
    const std::vector<double> gap_excess = mean_column(table, "gap_excess");
    std::vector<double> dvals(dims.begin(), dims.end());
    const double rho = spearman(dvals, gap_excess);
    os << "  mean(adv_gap - clean_gap) over d = {2,4,6,8}: ";
    for (double g : gap_excess) os << g << " ";
    os << "\n  spearman rho = " << rho << " (needs <= 0)\n";

    // formula-side trend: the printed angle excess decays with d
    const std::vector<double> arc = mean_column(table, "arc_prop1");
    const std::vector<double> rc = mean_column(table, "rc_bound");
    os << "  arc - rc bound columns: ";
    for (std::size_t i = 0; i < arc.size(); ++i) os << arc[i] - rc[i] << " ";
    os << "\n";
    return rho <= 0.0;
}

// ---------------------------------------------------------------- criterion 9
bool criterion_amplitude_trend(std::ostream& os) {
    experiments::ExperimentConfig cfg = reference_config();
    cfg.embedding.family = embed::Family::Amplitude;
    const std::vector<int> dims = {2, 4, 8, 16};
    const auto table =
        experiments::sweep_dimension(cfg, dims, {"amplitude"}, 5);
    const std::vector<double> gap_excess = mean_column(table, "gap_excess");
    os << "  mean(adv_gap - clean_gap) over d = {2,4,8,16}: ";
    for (double g : gap_excess) os << g << " ";
    os << "\n";
    return gap_excess.back() > gap_excess.front();
}

// --------------------------------------------------------------- criterion 10
bool criterion_noise_trend(std::ostream& os) {
    experiments::ExperimentConfig cfg = reference_config();
    cfg.task.d = 6;
    cfg.embedding.family = embed::Family::Amplitude;
    cfg.embedding.input_dim = 6;
    cfg.attack.budget.space = attacks::AttackSpace::Quantum;
    cfg.attack.budget.epsilon = 0.001;
    cfg.attack.lr = 0.0; // defaults to epsilon
    cfg.attack.max_iter = 30;
    const std::vector<double> eps_grid = {0.001, 0.004, 0.007, 0.01};
    const auto table = experiments::sweep_noise(cfg, eps_grid, 0.011, 5);

    // mean rows come out grouped: noiseless (4 eps), then noisy (4 eps)
    const std::vector<double> adv_gap = mean_column(table, "adv_gap");
    const std::vector<double> arc_q = mean_column(table, "arc_quantum");
    const std::vector<double> thm4 = mean_column(table, "thm4_upper");
    const std::size_t n = eps_grid.size();
    bool gaps_ok = true;
    os << "  adv_gap mean (noiseless vs noisy per epsilon):\n";
    for (std::size_t e = 0; e < n; ++e) {
        const double clean_arm = adv_gap[e], noisy_arm = adv_gap[n + e];
        os << "    eps = " << eps_grid[e] << ": " << clean_arm << " vs " << noisy_arm << "\n";
        if (noisy_arm > clean_arm) gaps_ok = false;
    }
    bool bounds_ok = true;
    for (std::size_t e = 0; e + 1 < n; ++e) {
        if (arc_q[e + 1] < arc_q[e] || arc_q[n + e + 1] < arc_q[n + e]) bounds_ok = false;
        if (thm4[n + e + 1] < thm4[n + e]) bounds_ok = false; // noisy arm only
    }
    os << "  theorem 3/4 bound columns non-decreasing in eps: " << (bounds_ok ? "yes" : "NO")
       << "\n";
    return gaps_ok && bounds_ok;
}

// --------------------------------------------------------------- criterion 11
bool criterion_scalar_checks(std::ostream& os) {
    auto close6 = [](double got, double want) {
        return std::abs(got - want) <= 1e-6 * std::max(std::abs(want), 1e-30);
    };
    bool ok = true;

    // B_2 via a one-state dataset (sqrt(S2) has a single unit eigenvalue).
    std::vector<DensityMatrix> one = {embed::angle_embed({0.2})};
    bounds::BoundConfig cfg2;
    cfg2.r = SchattenOrder(2.0);
    cfg2.b = 1.0;
    cfg2.m = 1;
    cfg2.d_h = 2;
    const double b2_indep = std::pow(2.0, -0.25) * std::sqrt(2.0 * M_PI / std::exp(1.0));
    const double b2_got = bounds::rc_bound_thm2(one, cfg2);
    os << "  B_2 = " << b2_got << " vs independent " << b2_indep << "\n";
    ok = ok && close6(b2_got, b2_indep);

    bounds::BoundConfig cov;
    cov.r = SchattenOrder(1.0);
    cov.b = 1.0;
    cov.d_h = 2;
    const double cov_got = bounds::covering_log_lemma1(cov, 1.0);
    os << "  covering log = " << cov_got << " vs 4 ln 6 = " << 4.0 * std::log(6.0) << "\n";
    ok = ok && close6(cov_got, 4.0 * std::log(6.0));

    bounds::BoundConfig pac;
    pac.m = 20;
    pac.b_loss = 1.0;
    pac.delta_conf = 0.05;
    const double slack_indep = 3.0 * std::sqrt(std::log(40.0) / 40.0);
    os << "  pac slack = " << bounds::pac_slack_term(pac) << " vs independent " << slack_indep
       << "\n";
    ok = ok && close6(bounds::pac_slack_term(pac), slack_indep);

    bounds::BoundConfig ang;
    ang.epsilon = 0.3;
    ang.d = 10;
    ang.l_layers = 1;
    ang.p = SchattenOrder::infinity();
    const double ang_got = bounds::excess_classical_prop1(ang, embed::Family::LLayerAngle,
                                                          bounds::ExcessVariant::Prop1);
    const double ang_indep = 2.0 * std::pow(0.6, 10);
    os << "  angle excess = " << ang_got << " vs independent " << ang_indep << "\n";
    ok = ok && close6(ang_got, ang_indep);
    return ok;
}

// --------------------------------------------------------------- criterion 12
bool criterion_determinism(std::ostream& os) {
    experiments::ExperimentConfig cfg = reference_config();
    cfg.task.train_m = 8;
    cfg.task.test_m = 40;
    cfg.train.epochs = 5;
    const std::vector<int> dims = {2, 3};

    setenv("QADVLAB_THREADS", "1", 1);
    const std::string t1 =
        experiments::sweep_dimension(cfg, dims, {"angle"}, 2).to_string();
    setenv("QADVLAB_THREADS", "4", 1);
    const std::string t4 =
        experiments::sweep_dimension(cfg, dims, {"angle"}, 2).to_string();
    unsetenv("QADVLAB_THREADS");
    os << "  csv bytes: " << t1.size() << " (threads=1) vs " << t4.size()
       << " (threads=4), identical = " << (t1 == t4 ? "yes" : "NO") << "\n";
    return t1 == t4;
}

} // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::ostream&)> run;
    };
    // Optional arguments select a subset of criteria by id.
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    const std::vector<Criterion> criteria = {
        {1, "norm oracle suite", criterion_norms},
        {2, "theorem 2 dominance", criterion_thm2_dominance},
        {3, "exact RC enumeration", criterion_exact_rc},
        {4, "appendix smoothness bounds", criterion_appendix_smoothness},
        {5, "gradient suite", criterion_gradients},
        {6, "algorithm 1 conformance", criterion_algorithm1},
        {7, "theorem 4 sandwich", criterion_thm4_sandwich},
        {8, "angle gap-convergence trend", criterion_angle_trend},
        {9, "amplitude gap-divergence trend", criterion_amplitude_trend},
        {10, "noisy-embedding trend", criterion_noise_trend},
        {11, "bound-formula scalar checks", criterion_scalar_checks},
        {12, "sweep determinism", criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        const auto start = std::chrono::steady_clock::now();
        std::ostringstream detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail << "  exception: " << e.what() << "\n";
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", "
                  << secs << " s)\n"
                  << detail.str();
        std::cout.flush();
        if (!ok) ++failures;
    }
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED\n"
                                : std::to_string(failures) + " CRITERIA FAILED\n");
    return failures;
}
