#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace sturmflow {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Numerical thresholds shared by every pipeline.
///
/// `rank_rel_tol` decides when an eigenvalue or singular value counts as zero,
/// always relative to a scale chosen by the caller (usually max(1, spectral radius)).
/// `integ_rel_tol` is the relative tolerance handed to the ODE integrator.
struct TolerancePolicy {
    double rank_rel_tol = 1e-8;
    double integ_rel_tol = 1e-10;

    /// Throws DomainError unless both tolerances lie in (0, 1).
    void validate() const;

    /// Threshold used to decide that a shooting matrix is singular:
    /// max(rank_rel_tol, 100 integ_rel_tol), relative to the endpoint jets.
    double shooting_tol() const;
};

/// Square complex matrix that is Hermitian to within 1e-12 relative to its largest entry.
class HermMatrix {
public:
    HermMatrix() = default;
    /// Throws SymmetryError when `m` is not square or not Hermitian.
    explicit HermMatrix(CMatrix m);

    /// (m + m*)/2 without any symmetry check. For matrices that are Hermitian
    /// by construction up to rounding or discretization error.
    static HermMatrix hermitian_part(const CMatrix& m);

    /// max |m - m*| relative to max(|m_jk|); zero for the empty matrix.
    static double symmetry_defect(const CMatrix& m);

    Eigen::Index dim() const { return m_.rows(); }
    const CMatrix& matrix() const { return m_; }
    Complex operator()(Eigen::Index j, Eigen::Index k) const { return m_(j, k); }

    HermMatrix operator-() const;

private:
    CMatrix m_;
};

/// Counts of positive, negative and numerically zero eigenvalues.
struct Inertia {
    int n_plus = 0;
    int n_minus = 0;
    int n_zero = 0;

    int signature() const { return n_plus - n_minus; }
    bool nondegenerate() const { return n_zero == 0; }
    int dim() const { return n_plus + n_minus + n_zero; }

    friend bool operator==(const Inertia&, const Inertia&) = default;
};

struct EigenDecomposition {
    RVector values;  // ascending
    CMatrix vectors;  // orthonormal columns
};

EigenDecomposition eigen_decompose(const HermMatrix& h);

/// Eigenvalues with |mu| < rank_rel_tol * max(1, spectral radius) are treated as zero.
double zero_threshold(const RVector& eigenvalues, const TolerancePolicy& tol);

Inertia inertia(const HermMatrix& h, const TolerancePolicy& tol = {});

/// Orthonormal columns spanning the numerical kernel; zero columns if nondegenerate.
CMatrix kernel_basis(const HermMatrix& h, const TolerancePolicy& tol = {});

/// Sesquilinear form, antilinear in the first argument.
using SesquilinearForm = std::function<Complex(const CVector&, const CVector&)>;

/// Gram matrix out(j,k) = form(basis.col(j), basis.col(k)).
/// Throws DegenerateBasisError for dependent columns and SymmetryError when the
/// form is visibly non-Hermitian.
HermMatrix restrict_form(const SesquilinearForm& form, const CMatrix& basis,
                         const TolerancePolicy& tol = {});

/// Same, for the form (u, v) -> <u, H v>.
HermMatrix restrict_form(const HermMatrix& form, const CMatrix& basis,
                         const TolerancePolicy& tol = {});

}  // namespace sturmflow
