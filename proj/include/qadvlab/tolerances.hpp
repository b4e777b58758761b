#pragma once

#include <cstddef>

namespace qadvlab {

// All numeric tolerances in one place. The defaults below are referenced by
// every module; tests freeze against these values.
struct Tolerances {
    double hermiticity = 1e-12;  // max |a_ij - conj(a_ji)|
    double trace = 1e-10;        // |Tr(rho) - 1|
    double psd = 1e-10;          // min eigenvalue >= -psd
    double jacobi_rel = 1e-14;   // off-diagonal mass / ||M||_F convergence target
    double eigh_recon_rel = 1e-10;
    double holder = 1e-9;        // extremizer equality slack
    double pure_rank1 = 1e-8;    // top eigenvalue distance from 1
    double zero_matrix = 1e-14;  // ||M||_F below this counts as zero
    std::size_t dim_cap = 1024;  // kron / Hilbert-space ceiling
    int qubit_cap = 10;
};

inline const Tolerances& tols() {
    static const Tolerances t{};
    return t;
}

} // namespace qadvlab
