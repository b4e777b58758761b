#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qadvlab/error.hpp"
#include "qadvlab/tolerances.hpp"

namespace qadvlab {

using cplx = std::complex<double>;

// Dense row-major complex matrix of dimension d x d.
class CMatrix {
  public:
    CMatrix() = default;

    explicit CMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, cplx(0.0, 0.0)) {}

    CMatrix(std::size_t dim, std::vector<cplx> entries) : dim_(dim), a_(std::move(entries)) {
        require(a_.size() == dim_ * dim_, ErrorCode::InvalidArgument,
                "CMatrix: entries length must equal dim^2");
        for (const cplx& z : a_)
            require(std::isfinite(z.real()) && std::isfinite(z.imag()), ErrorCode::InvalidArgument,
                    "CMatrix: non-finite entry");
    }

    static CMatrix identity(std::size_t dim) {
        CMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return dim_; }
    bool empty() const { return dim_ == 0; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    CMatrix& operator+=(const CMatrix& o) {
        require(o.dim_ == dim_, ErrorCode::InvalidArgument, "matrix dim mismatch");
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        require(o.dim_ == dim_, ErrorCode::InvalidArgument, "matrix dim mismatch");
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    CMatrix& operator*=(cplx s) {
        for (cplx& z : a_) z *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix l, const CMatrix& r) { return l += r; }
    friend CMatrix operator-(CMatrix l, const CMatrix& r) { return l -= r; }
    friend CMatrix operator*(cplx s, CMatrix m) { return m *= s; }

    friend CMatrix operator*(const CMatrix& l, const CMatrix& r) {
        require(l.dim_ == r.dim_, ErrorCode::InvalidArgument, "matrix dim mismatch");
        const std::size_t n = l.dim_;
        CMatrix out(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const cplx lik = l(i, k);
                if (lik == cplx(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < n; ++j) out(i, j) += lik * r(k, j);
            }
        return out;
    }

    CMatrix adjoint() const {
        CMatrix out(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const cplx& z : a_) s += std::norm(z);
        return std::sqrt(s);
    }

    double hermiticity_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i; j < dim_; ++j)
                worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return worst;
    }

    // (M + M^dag) / 2 -- callers must symmetrize explicitly, eigh never does.
    CMatrix symmetrized() const {
        CMatrix out(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        return out;
    }

  private:
    std::size_t dim_ = 0;
    std::vector<cplx> a_;
};

inline cplx trace_product(const CMatrix& a, const CMatrix& b) {
    require(a.dim() == b.dim(), ErrorCode::InvalidArgument, "matrix dim mismatch");
    cplx t = 0.0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t += a(i, j) * b(j, i);
    return t;
}

// Hermitian matrix: construction enforces the symmetry invariant.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(CMatrix m) : m_(std::move(m)) {
        const double defect = m_.hermiticity_defect();
        require(defect <= tols().hermiticity, ErrorCode::HermiticityViolation,
                "HermitianMatrix: hermiticity defect " + std::to_string(defect));
    }

    const CMatrix& mat() const { return m_; }
    std::size_t dim() const { return m_.dim(); }

  private:
    CMatrix m_;
};

// Unit-trace PSD Hermitian matrix. Full (eigenvalue) validation is done by
// qmath::validate_density; the unchecked factory is for outputs that are
// valid by construction (pure-state outer products, unitary conjugations,
// convex mixtures of valid states).
class DensityMatrix {
  public:
    struct UncheckedTag {};

    DensityMatrix(CMatrix m, UncheckedTag) : m_(std::move(m)) {}

    static DensityMatrix unchecked(CMatrix m) { return DensityMatrix(std::move(m), UncheckedTag{}); }

    const CMatrix& mat() const { return m_; }
    std::size_t dim() const { return m_.dim(); }

    HermitianMatrix hermitian() const { return HermitianMatrix(m_.symmetrized()); }

  private:
    CMatrix m_;
};

// Schatten order r in [1, inf]; infinity is an explicit state.
class SchattenOrder {
  public:
    explicit SchattenOrder(double r) : r_(r) {
        require(std::isfinite(r) && r >= 1.0, ErrorCode::UnsupportedOrder,
                "SchattenOrder: r must be >= 1 (got " + std::to_string(r) + ")");
    }

    static SchattenOrder infinity() {
        SchattenOrder s(1.0);
        s.inf_ = true;
        return s;
    }

    bool is_inf() const { return inf_; }
    double value() const { return r_; } // only meaningful when finite

    bool operator==(const SchattenOrder& o) const {
        return inf_ == o.inf_ && (inf_ || r_ == o.r_);
    }

    // 1/r with the convention 1/inf = 0.
    double reciprocal() const { return inf_ ? 0.0 : 1.0 / r_; }

  private:
    double r_;
    bool inf_ = false;
};

} // namespace qadvlab
