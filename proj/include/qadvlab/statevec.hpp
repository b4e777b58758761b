#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "qadvlab/cmatrix.hpp"

// Statevector and density-matrix gate application. Qubit 0 is the leftmost
// tensor factor (most significant bit), matching the A (x) B order of kron.
namespace qadvlab::sv {

using State = std::vector<cplx>;
using Gate1Q = std::array<cplx, 4>; // row-major 2x2

inline State basis_state(std::size_t dim, std::size_t index) {
    State psi(dim, cplx(0.0, 0.0));
    psi[index] = 1.0;
    return psi;
}

inline std::size_t stride_of(int n_qubits, int qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

inline void apply_1q(State& psi, int n_qubits, int qubit, const Gate1Q& u) {
    const std::size_t stride = stride_of(n_qubits, qubit);
    const std::size_t dim = psi.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride)
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a = psi[i], b = psi[i + stride];
            psi[i] = u[0] * a + u[1] * b;
            psi[i + stride] = u[2] * a + u[3] * b;
        }
}

inline void apply_cnot(State& psi, int n_qubits, int control, int target) {
    const std::size_t cs = stride_of(n_qubits, control);
    const std::size_t ts = stride_of(n_qubits, target);
    const std::size_t dim = psi.size();
    for (std::size_t i = 0; i < dim; ++i)
        if ((i & cs) && !(i & ts)) std::swap(psi[i], psi[i | ts]);
}

inline void apply_dense(State& psi, const CMatrix& u) {
    const std::size_t n = u.dim();
    State out(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += u(i, j) * psi[j];
        out[i] = s;
    }
    psi = std::move(out);
}

inline cplx inner(const State& a, const State& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline CMatrix outer(const State& psi) {
    const std::size_t n = psi.size();
    CMatrix rho(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rho(i, j) = psi[i] * std::conj(psi[j]);
    return rho;
}

// rho <- (U rho U^dag) restricted to one qubit: left-multiply rows, then
// right-multiply columns by U^dag.
inline void apply_1q_density(CMatrix& rho, int n_qubits, int qubit, const Gate1Q& u) {
    const std::size_t stride = stride_of(n_qubits, qubit);
    const std::size_t dim = rho.dim();
    for (std::size_t col = 0; col < dim; ++col)
        for (std::size_t base = 0; base < dim; base += 2 * stride)
            for (std::size_t i = base; i < base + stride; ++i) {
                const cplx a = rho(i, col), b = rho(i + stride, col);
                rho(i, col) = u[0] * a + u[1] * b;
                rho(i + stride, col) = u[2] * a + u[3] * b;
            }
    for (std::size_t row = 0; row < dim; ++row)
        for (std::size_t base = 0; base < dim; base += 2 * stride)
            for (std::size_t j = base; j < base + stride; ++j) {
                const cplx a = rho(row, j), b = rho(row, j + stride);
                rho(row, j) = a * std::conj(u[0]) + b * std::conj(u[1]);
                rho(row, j + stride) = a * std::conj(u[2]) + b * std::conj(u[3]);
            }
}

// Rotation gates, R_P(theta) = exp(-i theta P / 2).
Gate1Q ry(double theta);
Gate1Q rz(double theta);
// Composed Rot(a, b, c) = RZ(a) RY(b) RZ(c), RZ(c) applied first.
Gate1Q rot(double a, double b, double c);
// Full-angle embedding rotations exp(-i x sigma_Y), exp(-i x sigma_Z).
Gate1Q exp_iy(double x);
Gate1Q exp_iz(double x);

} // namespace qadvlab::sv
