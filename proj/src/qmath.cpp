#include "qadvlab/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qadvlab::qmath {

namespace {

double offdiag_mass(const CMatrix& a) {
    double s = 0.0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

} // namespace

EighResult eigh(const HermitianMatrix& m) {
    const std::size_t n = m.dim();
    CMatrix a = m.mat();
    CMatrix v = CMatrix::identity(n);

    if (n == 0) return {{}, v};

    const double fro = a.frobenius_norm();
    const double target = tols().jacobi_rel * std::max(fro, 1e-300);

    // Cyclic Jacobi sweeps. Each pivot (p, q) first rotates the phase of
    // a_pq onto the real axis, then applies the classic symmetric rotation.
    const int max_sweeps = 100;
    int sweep = 0;
    // Rotations with |a_pq| below pivot_skip leave at most `target` of
    // off-diagonal mass in total, so skipping them preserves the contract.
    const double pivot_skip = n > 1 ? target / static_cast<double>(n) : 0.0;
    while (fro > 0.0 && offdiag_mass(a) > target) {
        require(sweep++ < max_sweeps, ErrorCode::NumericalFailure, "eigh: Jacobi did not converge");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double b = std::abs(apq);
                if (b <= std::max(1e-300, pivot_skip)) continue;
                const cplx phase = apq / b; // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();

                // Rotation zeroing the real pivot b between diagonal app, aqq.
                const double theta = (aqq - app) / (2.0 * b);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // J = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on (p, q).
                const cplx j00 = c;
                const cplx j01 = s;
                const cplx j10 = -s * std::conj(phase);
                const cplx j11 = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) { // A <- A J (columns p, q)
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * j00 + akq * j10;
                    a(k, q) = akp * j01 + akq * j11;
                }
                for (std::size_t k = 0; k < n; ++k) { // A <- J^dag A (rows p, q)
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(j00) * apk + std::conj(j10) * aqk;
                    a(q, k) = std::conj(j01) * apk + std::conj(j11) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) { // V <- V J
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * j00 + vkq * j10;
                    v(k, q) = vkp * j01 + vkq * j11;
                }
            }
        }
    }

    std::vector<double> eigs(n);
    for (std::size_t i = 0; i < n; ++i) eigs[i] = a(i, i).real();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return eigs[i] < eigs[j]; });

    EighResult out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n);
    for (std::size_t c = 0; c < n; ++c) {
        out.eigenvalues[c] = eigs[order[c]];
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = v(r, order[c]);
    }
    return out;
}

double schatten_norm_from_eigs(const std::vector<double>& eigs, const SchattenOrder& r) {
    if (r.is_inf()) {
        double m = 0.0;
        for (double l : eigs) m = std::max(m, std::abs(l));
        return m;
    }
    const double rv = r.value();
    if (rv == 1.0) {
        double s = 0.0;
        for (double l : eigs) s += std::abs(l);
        return s;
    }
    // Scale out the largest magnitude so pow never under/overflows.
    double top = 0.0;
    for (double l : eigs) top = std::max(top, std::abs(l));
    if (top == 0.0) return 0.0;
    double s = 0.0;
    for (double l : eigs) s += std::pow(std::abs(l) / top, rv);
    return top * std::pow(s, 1.0 / rv);
}

double schatten_norm(const HermitianMatrix& m, const SchattenOrder& r) {
    return schatten_norm_from_eigs(eigh(m).eigenvalues, r);
}

SchattenOrder dual_order(const SchattenOrder& r) {
    if (r.is_inf()) return SchattenOrder(1.0);
    if (r.value() == 1.0) return SchattenOrder::infinity();
    return SchattenOrder(r.value() / (r.value() - 1.0));
}

HermitianMatrix holder_extremizer(const HermitianMatrix& m, const SchattenOrder& r, double b) {
    require(b > 0.0, ErrorCode::InvalidArgument, "holder_extremizer: b must be positive");
    require(m.mat().frobenius_norm() >= tols().zero_matrix, ErrorCode::InvalidArgument,
            "holder_extremizer: M is numerically zero");

    const EighResult ed = eigh(m);
    const std::size_t n = m.dim();
    std::vector<double> mu(n, 0.0);

    auto sign = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };

    if (r.is_inf()) {
        for (std::size_t i = 0; i < n; ++i) mu[i] = b * sign(ed.eigenvalues[i]);
    } else if (r.value() == 1.0) {
        // Weight b spread uniformly over the top-|lambda| eigenspace, signed.
        double top = 0.0;
        for (double l : ed.eigenvalues) top = std::max(top, std::abs(l));
        const double tie = 1e-12 * std::max(1.0, top);
        std::size_t count = 0;
        for (double l : ed.eigenvalues)
            if (std::abs(l) >= top - tie) ++count;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(ed.eigenvalues[i]) >= top - tie) mu[i] = (b / count) * sign(ed.eigenvalues[i]);
    } else {
        const double expo = 1.0 / (r.value() - 1.0);
        double scale = 0.0;
        for (double l : ed.eigenvalues) scale = std::max(scale, std::abs(l));
        for (std::size_t i = 0; i < n; ++i)
            mu[i] = sign(ed.eigenvalues[i]) * std::pow(std::abs(ed.eigenvalues[i]) / scale, expo);
        const double norm = schatten_norm_from_eigs(mu, r);
        for (double& x : mu) x *= b / norm;
    }

    // A = V diag(mu) V^dag.
    CMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += ed.eigenvectors(i, k) * mu[k] * std::conj(ed.eigenvectors(j, k));
            out(i, j) = s;
        }
    return HermitianMatrix(out.symmetrized());
}

DensityMatrix validate_density(const CMatrix& m, double tol) {
    const double h = m.hermiticity_defect();
    require(h <= tol, ErrorCode::HermiticityViolation,
            "validate_density: hermiticity violated by " + std::to_string(h));

    const double tr_err = std::abs(m.trace() - cplx(1.0, 0.0));
    require(tr_err <= tol, ErrorCode::TraceViolation,
            "validate_density: trace deviates from 1 by " + std::to_string(tr_err));

    const EighResult ed = eigh(HermitianMatrix(m.symmetrized()));
    const double lam_min = ed.eigenvalues.empty() ? 0.0 : ed.eigenvalues.front();
    require(lam_min >= -tol, ErrorCode::PsdViolation,
            "validate_density: PSD violated by " + std::to_string(-lam_min));

    return DensityMatrix::unchecked(m);
}

CMatrix kron(const CMatrix& a, const CMatrix& b, std::size_t dim_cap) {
    const std::size_t na = a.dim(), nb = b.dim();
    require(na * nb <= dim_cap, ErrorCode::DimensionCap,
            "kron: output dimension " + std::to_string(na * nb) + " exceeds cap " +
                std::to_string(dim_cap));
    CMatrix out(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = aij * b(k, l);
        }
    return out;
}

} // namespace qadvlab::qmath
