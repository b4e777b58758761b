#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qadvlab/embeddings.hpp"
#include "qadvlab/qmath.hpp"
#include "qadvlab/rng.hpp"

using namespace qadvlab;

namespace {

CMatrix diag2(double a, double b) {
    CMatrix m(2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

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

double reconstruction_error(const HermitianMatrix& m, const qmath::EighResult& ed) {
    const std::size_t n = m.dim();
    CMatrix recon(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += ed.eigenvectors(i, k) * ed.eigenvalues[k] * std::conj(ed.eigenvectors(j, k));
            recon(i, j) = s;
        }
    recon -= m.mat();
    return recon.frobenius_norm();
}

} // namespace

TEST_CASE("eigh on diagonal and textbook matrices") {
    const auto ed = qmath::eigh(HermitianMatrix(diag2(3.0, -4.0)));
    CHECK(ed.eigenvalues[0] == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(ed.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));

    CMatrix pauli_x(2);
    pauli_x(0, 1) = 1.0;
    pauli_x(1, 0) = 1.0;
    const auto ex = qmath::eigh(HermitianMatrix(pauli_x));
    CHECK(ex.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ex.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigh reconstruction and unitarity on random input (seed 7)") {
    Rng rng(7);
    const HermitianMatrix m(random_hermitian(8, rng));
    const auto ed = qmath::eigh(m);
    CHECK(reconstruction_error(m, ed) <= 1e-10 * std::max(1.0, m.mat().frobenius_norm()));
    // V^dag V = I
    const CMatrix vtv = ed.eigenvectors.adjoint() * ed.eigenvectors;
    CMatrix diff = vtv;
    diff -= CMatrix::identity(8);
    CHECK(diff.frobenius_norm() <= 1e-10);
    for (std::size_t i = 0; i + 1 < ed.eigenvalues.size(); ++i)
        CHECK(ed.eigenvalues[i] <= ed.eigenvalues[i + 1]);
}

TEST_CASE("eigh rejects non-Hermitian input") {
    CMatrix m(2);
    m(0, 1) = 1.0; // missing conjugate partner
    CHECK_THROWS_AS(HermitianMatrix{m}, Error);
}

TEST_CASE("schatten norms of diag(3,-4)") {
    const HermitianMatrix m(diag2(3.0, -4.0));
    CHECK(qmath::schatten_norm(m, SchattenOrder(1.0)) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(qmath::schatten_norm(m, SchattenOrder(2.0)) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(qmath::schatten_norm(m, SchattenOrder::infinity()) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("schatten trivia: density trace norm and identity") {
    const DensityMatrix rho = embed::angle_embed({0.3, -0.7});
    CHECK(qmath::schatten_norm(rho.hermitian(), SchattenOrder(1.0)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    const HermitianMatrix eye(CMatrix::identity(8));
    CHECK(qmath::schatten_norm(eye, SchattenOrder::infinity()) == doctest::Approx(1.0));
    CHECK_THROWS_AS(SchattenOrder{0.5}, Error);
}

TEST_CASE("dual order") {
    CHECK(qmath::dual_order(SchattenOrder(2.0)).value() == doctest::Approx(2.0));
    CHECK(qmath::dual_order(SchattenOrder(1.0)).is_inf());
    CHECK(qmath::dual_order(SchattenOrder::infinity()).value() == doctest::Approx(1.0));
    CHECK(qmath::dual_order(SchattenOrder(4.0)).value() == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("holder extremizer hand examples") {
    {
        const HermitianMatrix m(diag2(1.0, -2.0));
        const HermitianMatrix a = qmath::holder_extremizer(m, SchattenOrder::infinity(), 1.0);
        CHECK(trace_product(a.mat(), m.mat()).real() == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(a.mat()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(a.mat()(1, 1).real() == doctest::Approx(-1.0).epsilon(1e-9));
    }
    {
        const HermitianMatrix m(diag2(1.0, 0.0));
        const HermitianMatrix a = qmath::holder_extremizer(m, SchattenOrder(1.0), 2.0);
        CHECK(trace_product(a.mat(), m.mat()).real() == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(a.mat()(0, 0).real() == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(std::abs(a.mat()(1, 1)) <= 1e-9);
    }
    {
        Rng rng(3);
        const HermitianMatrix m(random_hermitian(4, rng));
        const HermitianMatrix a = qmath::holder_extremizer(m, SchattenOrder(2.0), 1.0);
        const double f2 = qmath::schatten_norm(m, SchattenOrder(2.0));
        CHECK(trace_product(a.mat(), m.mat()).real() == doctest::Approx(f2).epsilon(1e-9));
    }
    CHECK_THROWS_AS(qmath::holder_extremizer(HermitianMatrix(CMatrix(2)), SchattenOrder(2.0), 1.0),
                    Error);
}

TEST_CASE("validate_density") {
    CMatrix half = CMatrix::identity(2);
    half *= cplx(0.5, 0.0);
    CHECK_NOTHROW(qmath::validate_density(half, 1e-10));

    try {
        qmath::validate_density(diag2(1.5, -0.5), 1e-10);
        FAIL("expected PsdViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PsdViolation);
        CHECK(std::string(e.what()).find("0.5") != std::string::npos);
    }

    CMatrix tilted(2);
    tilted(0, 0) = 1.0;
    tilted(0, 1) = cplx(0.0, 1e-13); // asymmetric noise within tolerance
    CHECK_NOTHROW(qmath::validate_density(tilted, 1e-10));

    CMatrix bad_trace = CMatrix::identity(2);
    try {
        qmath::validate_density(bad_trace, 1e-10);
        FAIL("expected TraceViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TraceViolation);
    }
}

TEST_CASE("kron basics and the dimension cap") {
    const CMatrix i4 = qmath::kron(CMatrix::identity(2), CMatrix::identity(2));
    CHECK(i4.dim() == 4);
    CMatrix diff = i4;
    diff -= CMatrix::identity(4);
    CHECK(diff.frobenius_norm() == 0.0);

    CMatrix sy(2);
    sy(0, 1) = cplx(0.0, -1.0);
    sy(1, 0) = cplx(0.0, 1.0);
    const CMatrix big = qmath::kron(sy, CMatrix::identity(2));
    CHECK(big(0, 2) == cplx(0.0, -1.0));
    CHECK(big(2, 0) == cplx(0.0, 1.0));
    CHECK(big(0, 0) == cplx(0.0, 0.0));

    // 11 qubits with the default cap of 1024.
    CMatrix m1024 = CMatrix::identity(1024);
    CHECK_THROWS_AS(qmath::kron(m1024, CMatrix::identity(2)), Error);
}

TEST_CASE("property: norm monotonicity on 100 random matrices") {
    Rng rng(21);
    const std::vector<SchattenOrder> orders = {SchattenOrder(1.0), SchattenOrder(1.5),
                                               SchattenOrder(2.0), SchattenOrder(3.0),
                                               SchattenOrder(8.0), SchattenOrder::infinity()};
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rng.below(7);
        const HermitianMatrix m(random_hermitian(n, rng));
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& r : orders) {
            const double v = qmath::schatten_norm(m, r);
            CHECK(v <= prev + 1e-9);
            prev = v;
        }
    }
}

TEST_CASE("property: Hoelder inequality and extremizer equality") {
    Rng rng(22);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 2 + rng.below(5);
        const HermitianMatrix a(random_hermitian(n, rng));
        const HermitianMatrix b(random_hermitian(n, rng));
        for (double rv : {1.0, 1.5, 2.0, 4.0, -1.0}) {
            const SchattenOrder r = rv < 0 ? SchattenOrder::infinity() : SchattenOrder(rv);
            const double lhs = std::abs(trace_product(a.mat(), b.mat()).real());
            const double rhs =
                qmath::schatten_norm(a, r) * qmath::schatten_norm(b, qmath::dual_order(r));
            CHECK(lhs <= rhs + 1e-9 * std::max(1.0, rhs));

            const double bb = 0.25 + rng.uniform();
            const HermitianMatrix ext = qmath::holder_extremizer(b, r, bb);
            const double want = bb * qmath::schatten_norm(b, qmath::dual_order(r));
            CHECK(trace_product(ext.mat(), b.mat()).real() ==
                  doctest::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("property: eigh reconstruction up to d = 64") {
    Rng rng(23);
    for (std::size_t n : {2ul, 3ul, 8ul, 17ul, 33ul, 64ul}) {
        const HermitianMatrix m(random_hermitian(n, rng));
        const auto ed = qmath::eigh(m);
        CHECK(reconstruction_error(m, ed) <= 1e-10 * std::max(1.0, m.mat().frobenius_norm()));
    }
}

TEST_CASE("property: unitary invariance of schatten norms") {
    Rng rng(24);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 4;
        const HermitianMatrix m(random_hermitian(n, rng));
        const CMatrix u = embed::seeded_unitary(n, 1000 + rep, 0);
        const CMatrix rotated = u * m.mat() * u.adjoint();
        const HermitianMatrix mr(rotated.symmetrized());
        for (double rv : {1.0, 2.0, 3.5, -1.0}) {
            const SchattenOrder r = rv < 0 ? SchattenOrder::infinity() : SchattenOrder(rv);
            CHECK(qmath::schatten_norm(mr, r) ==
                  doctest::Approx(qmath::schatten_norm(m, r)).epsilon(1e-9));
        }
    }
}
