#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qadvlab/embeddings.hpp"
#include "qadvlab/qmath.hpp"
#include "qadvlab/rng.hpp"

using namespace qadvlab;

namespace {

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    CMatrix diff = a.mat();
    diff -= b.mat();
    return qmath::schatten_norm(HermitianMatrix(diff.symmetrized()), SchattenOrder(1.0));
}

embed::EmbeddingSpec spec_of(embed::Family f, int d, int layers = 1, std::uint64_t seed = 0) {
    embed::EmbeddingSpec s;
    s.family = f;
    s.input_dim = d;
    s.layers = layers;
    s.fixed_unitary_seed = seed;
    return s;
}

} // namespace

TEST_CASE("amplitude embedding basics") {
    const DensityMatrix basis = embed::amplitude_embed({1.0, 0.0, 0.0, 0.0});
    CHECK(basis.dim() == 4);
    CHECK(basis.mat()(0, 0).real() == doctest::Approx(1.0));
    CHECK(basis.mat().frobenius_norm() == doctest::Approx(1.0));

    const DensityMatrix rho = embed::amplitude_embed({3.0, 4.0});
    CHECK(rho.mat()(0, 0).real() == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(rho.mat()(0, 1).real() == doctest::Approx(0.48).epsilon(1e-12));
    CHECK(rho.mat()(1, 1).real() == doctest::Approx(0.64).epsilon(1e-12));

    // 3-dimensional input lands in a 2-qubit state padded with one zero.
    const sv::State psi = embed::embed_state(spec_of(embed::Family::Amplitude, 3), {1.0, 1.0, 1.0});
    CHECK(psi.size() == 4);
    const double inv = 1.0 / std::sqrt(3.0);
    CHECK(psi[0].real() == doctest::Approx(inv));
    CHECK(psi[1].real() == doctest::Approx(inv));
    CHECK(psi[2].real() == doctest::Approx(inv));
    CHECK(std::abs(psi[3]) == 0.0);

    CHECK_THROWS_AS(embed::amplitude_embed({0.0, 0.0}), Error);
}

TEST_CASE("angle embedding basics") {
    const DensityMatrix zero = embed::angle_embed({0.0, 0.0, 0.0});
    CHECK(zero.mat()(0, 0).real() == doctest::Approx(1.0));

    const DensityMatrix one = embed::angle_embed({M_PI / 2.0});
    CHECK(one.mat()(1, 1).real() == doctest::Approx(1.0).epsilon(1e-12));

    const sv::State psi =
        embed::embed_state(spec_of(embed::Family::Angle, 2), {M_PI / 4.0, M_PI / 4.0});
    for (const cplx& a : psi) CHECK(a.real() == doctest::Approx(0.5).epsilon(1e-12));

    embed::EmbeddingSpec too_big = spec_of(embed::Family::Angle, 11);
    CHECK_THROWS_AS(too_big.validate(), Error);
}

TEST_CASE("dense embedding basics") {
    const DensityMatrix zero = embed::dense_embed({0.0, 0.0});
    CHECK(zero.mat()(0, 0).real() == doctest::Approx(1.0));

    // sigma_Z phase leaves populations alone: |<0|psi>|^2 = cos^2(pi/2) = 0.
    const DensityMatrix flipped = embed::dense_embed({M_PI / 2.0, 0.777});
    CHECK(std::abs(flipped.mat()(0, 0)) <= 1e-12);

    const sv::State psi =
        embed::embed_state(spec_of(embed::Family::Dense, 2), {M_PI / 4.0, M_PI / 4.0});
    const cplx expect0 = std::polar(std::sqrt(0.5), -M_PI / 4.0);
    const cplx expect1 = std::polar(std::sqrt(0.5), M_PI / 4.0);
    CHECK(std::abs(psi[0] - expect0) <= 1e-12);
    CHECK(std::abs(psi[1] - expect1) <= 1e-12);

    // Odd d pads with one zero feature: 3 features -> 2 qubits.
    CHECK(spec_of(embed::Family::Dense, 3).n_qubits() == 2);
}

TEST_CASE("llayer embedding reductions and determinism") {
    // L = 1 reproduces the plain families exactly (the fixed unitary is skipped).
    const embed::FeatureVector x = {0.31, -1.2};
    const DensityMatrix plain = embed::angle_embed(x);
    const DensityMatrix l1 = embed::llayer_embed(x, spec_of(embed::Family::LLayerAngle, 2, 1, 99));
    CHECK(trace_distance(plain, l1) <= 1e-12);

    // L = 2 at x = 0: |psi> = V2 V1 |0>, family-independent.
    const embed::EmbeddingSpec s2 = spec_of(embed::Family::LLayerAngle, 2, 2, 7);
    const sv::State got = embed::embed_state(s2, {0.0, 0.0});
    sv::State want = sv::basis_state(4, 0);
    sv::apply_dense(want, embed::seeded_unitary(4, 7, 1));
    sv::apply_dense(want, embed::seeded_unitary(4, 7, 2));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12);

    // seed 42, d = 2, L = 3: valid density matrix, bitwise identical runs.
    const embed::EmbeddingSpec s3 = spec_of(embed::Family::LLayerAngle, 2, 3, 42);
    const DensityMatrix a = embed::llayer_embed({0.4, 0.9}, s3);
    const DensityMatrix b = embed::llayer_embed({0.4, 0.9}, s3);
    CHECK_NOTHROW(qmath::validate_density(a.mat(), 1e-10));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(a.mat()(i, j) == b.mat()(i, j));
}

TEST_CASE("seeded unitaries are unitary and deterministic") {
    for (std::size_t dim : {2ul, 4ul, 8ul}) {
        const CMatrix u = embed::seeded_unitary(dim, 42, 1);
        CMatrix gram = u.adjoint() * u;
        gram -= CMatrix::identity(dim);
        CHECK(gram.frobenius_norm() <= 1e-10);
    }
    const CMatrix a = embed::seeded_unitary(4, 5, 2);
    const CMatrix b = embed::seeded_unitary(4, 5, 2);
    const CMatrix c = embed::seeded_unitary(4, 5, 3);
    CMatrix same = a;
    same -= b;
    CHECK(same.frobenius_norm() == 0.0);
    CMatrix different = a;
    different -= c;
    CHECK(different.frobenius_norm() > 1e-3);
}

TEST_CASE("depolarize") {
    const DensityMatrix pure = embed::amplitude_embed({1.0, 2.0, 0.5, -0.3, 0.0, 0.1, 0.2, 1.1});
    CHECK(pure.dim() == 8);

    const DensityMatrix same = embed::depolarize(pure, 0.0);
    CHECK(trace_distance(same, pure) <= 1e-14);

    const DensityMatrix noisy = embed::depolarize(pure, 0.011);
    const auto ed = qmath::eigh(noisy.hermitian());
    for (int i = 0; i < 7; ++i) CHECK(ed.eigenvalues[i] == doctest::Approx(0.011).epsilon(1e-10));
    CHECK(ed.eigenvalues[7] == doctest::Approx(1.0 - 7.0 * 0.011).epsilon(1e-10));
    CHECK_NOTHROW(qmath::validate_density(noisy.mat(), 1e-10));

    const DensityMatrix mixed = embed::depolarize(pure, 1.0 / 8.0);
    CMatrix eye = CMatrix::identity(8);
    eye *= cplx(1.0 / 8.0, 0.0);
    CMatrix diff = mixed.mat();
    diff -= eye;
    CHECK(diff.frobenius_norm() <= 1e-12);

    CHECK_THROWS_AS(embed::depolarize(pure, 0.2), Error); // > 1/d_H
    CHECK_THROWS_AS(embed::depolarize(pure, -0.1), Error);
}

TEST_CASE("pure trace distance via the overlap identity") {
    const DensityMatrix a = embed::angle_embed({0.0});
    CHECK(embed::pure_trace_distance(a, a) == doctest::Approx(0.0));

    const DensityMatrix b = embed::angle_embed({M_PI / 2.0});
    CHECK(embed::pure_trace_distance(a, b) == doctest::Approx(2.0).epsilon(1e-12));

    const DensityMatrix c = embed::angle_embed({M_PI / 4.0});
    CHECK(embed::pure_trace_distance(a, c) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12)); // 2 sin(pi/4)
    CHECK(embed::pure_trace_distance(a, c) == doctest::Approx(trace_distance(a, c)).epsilon(1e-8));

    const DensityMatrix mixed = embed::depolarize(embed::angle_embed({0.3, 0.4}), 0.05);
    CHECK_THROWS_AS(embed::pure_trace_distance(mixed, mixed), Error);
}

TEST_CASE("property: embeddings produce valid pure states") {
    Rng rng(31);
    for (int rep = 0; rep < 25; ++rep) {
        for (embed::Family fam :
             {embed::Family::Amplitude, embed::Family::Angle, embed::Family::Dense,
              embed::Family::LLayerAngle, embed::Family::LLayerDense}) {
            const int d = 2 + static_cast<int>(rng.below(3));
            embed::EmbeddingSpec s = spec_of(fam, d, 1, 0);
            if (fam == embed::Family::LLayerAngle || fam == embed::Family::LLayerDense) {
                s.layers = 2;
                s.fixed_unitary_seed = rng.next_u64();
            }
            embed::FeatureVector x(d);
            for (double& v : x) v = rng.uniform(-2.0, 2.0);
            if (fam == embed::Family::Amplitude) x[0] += 3.0;
            const DensityMatrix rho = embed::embed(s, x);
            CHECK_NOTHROW(qmath::validate_density(rho.mat(), 1e-10));
            const auto ed = qmath::eigh(rho.hermitian());
            CHECK(ed.eigenvalues.back() == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("property: the exact overlap identity for the angle family") {
    // || rho(x) - rho(x+dx) ||_1 = 2 sqrt(1 - prod_j cos^2 dx_j); pins the
    // simulator against the closed form.
    Rng rng(32);
    for (int rep = 0; rep < 200; ++rep) {
        const int d = 1 + static_cast<int>(rng.below(4));
        embed::FeatureVector x(d), x2(d);
        double prod = 1.0;
        for (int j = 0; j < d; ++j) {
            x[j] = rng.uniform(-2.0, 2.0);
            const double dx = rng.uniform(-0.5, 0.5);
            x2[j] = x[j] + dx;
            prod *= std::cos(dx) * std::cos(dx);
        }
        const double want = 2.0 * std::sqrt(std::max(0.0, 1.0 - prod));
        const double got = trace_distance(embed::angle_embed(x), embed::angle_embed(x2));
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("property: d = 1 angle smoothness bound (the valid case)") {
    Rng rng(33);
    for (int rep = 0; rep < 200; ++rep) {
        const double x = rng.uniform(-2.0, 2.0);
        const double dx = rng.uniform(-0.3, 0.3);
        const double dist = trace_distance(embed::angle_embed({x}), embed::angle_embed({x + dx}));
        CHECK(dist <= 2.0 * std::abs(dx) + 1e-9);
    }
}

TEST_CASE("property: amplitude smoothness bound") {
    Rng rng(34);
    int reps = 0;
    while (reps < 1000) {
        const int d = 2 + static_cast<int>(rng.below(3));
        embed::FeatureVector x(d), dx(d);
        double nx = 0.0;
        for (int j = 0; j < d; ++j) {
            x[j] = rng.uniform(-2.0, 2.0);
            nx += x[j] * x[j];
        }
        if (std::sqrt(nx) < 0.5) continue;
        double ndx = 0.0;
        for (int j = 0; j < d; ++j) {
            dx[j] = rng.uniform(-0.4, 0.4);
            ndx += dx[j] * dx[j];
        }
        embed::FeatureVector x2 = x;
        for (int j = 0; j < d; ++j) x2[j] += dx[j];
        double nx2 = 0.0;
        for (double v : x2) nx2 += v * v;
        if (std::sqrt(nx2) < 1e-6) continue;
        ++reps;
        const double dist = trace_distance(embed::amplitude_embed(x), embed::amplitude_embed(x2));
        const double bound = 2.0 * std::min(std::sqrt(ndx) / std::sqrt(nx), 1.0);
        CHECK(dist <= bound + 1e-9);
    }
}

TEST_CASE("property: depolarize floors the spectrum") {
    Rng rng(35);
    for (int rep = 0; rep < 30; ++rep) {
        const double lam = rng.uniform(0.0, 0.24);
        const DensityMatrix r1 = embed::angle_embed({rng.uniform(-2, 2), rng.uniform(-2, 2)});
        const DensityMatrix out = embed::depolarize(r1, lam);
        const auto ed = qmath::eigh(out.hermitian());
        CHECK(ed.eigenvalues.front() >= lam - 1e-12);
    }
}
