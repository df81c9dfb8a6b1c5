#include "sturmflow/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sturmflow/errors.hpp"

namespace sturmflow {

void TolerancePolicy::validate() const
{
    auto check = [](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0)) {
            throw DomainError(std::string("tolerance ") + name + " must lie in (0, 1), got " +
                              std::to_string(v));
        }
    };
    check(rank_rel_tol, "rank_rel_tol");
    check(integ_rel_tol, "integ_rel_tol");
}

double TolerancePolicy::shooting_tol() const
{
    return std::max(rank_rel_tol, 1e2 * integ_rel_tol);
}

double HermMatrix::symmetry_defect(const CMatrix& m)
{
    if (m.size() == 0) return 0.0;
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

HermMatrix::HermMatrix(CMatrix m)
{
    if (m.rows() != m.cols()) {
        throw SymmetryError("Hermitian matrix must be square, got " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()));
    }
    const double defect = symmetry_defect(m);
    if (defect > 1e-12) {
        throw SymmetryError("matrix is not Hermitian: relative defect " + std::to_string(defect));
    }
    m_ = 0.5 * (m + m.adjoint());
}

HermMatrix HermMatrix::hermitian_part(const CMatrix& m)
{
    HermMatrix h;
    if (m.rows() != m.cols()) {
        throw SymmetryError("Hermitian part requires a square matrix");
    }
    h.m_ = 0.5 * (m + m.adjoint());
    return h;
}

HermMatrix HermMatrix::operator-() const
{
    HermMatrix h;
    h.m_ = -m_;
    return h;
}

EigenDecomposition eigen_decompose(const HermMatrix& h)
{
    if (h.dim() == 0) return {RVector(0), CMatrix(0, 0)};
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double zero_threshold(const RVector& eigenvalues, const TolerancePolicy& tol)
{
    const double radius = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    return tol.rank_rel_tol * std::max(1.0, radius);
}

Inertia inertia(const HermMatrix& h, const TolerancePolicy& tol)
{
    const RVector mu = eigen_decompose(h).values;
    const double thr = zero_threshold(mu, tol);
    Inertia in;
    for (double v : mu) {
        if (std::abs(v) < thr)
            ++in.n_zero;
        else if (v > 0)
            ++in.n_plus;
        else
            ++in.n_minus;
    }
    return in;
}

CMatrix kernel_basis(const HermMatrix& h, const TolerancePolicy& tol)
{
    const EigenDecomposition eig = eigen_decompose(h);
    const double thr = zero_threshold(eig.values, tol);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k)
        if (std::abs(eig.values[k]) < thr) idx.push_back(k);
    CMatrix out(h.dim(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) out.col(c) = eig.vectors.col(idx[c]);
    return out;
}

namespace {

void check_basis(const CMatrix& basis, const TolerancePolicy& tol)
{
    if (basis.cols() == 0) return;
    const CMatrix gram = basis.adjoint() * basis;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
    const RVector mu = solver.eigenvalues();
    if (mu.minCoeff() <= tol.rank_rel_tol * std::max(mu.maxCoeff(), 1e-300)) {
        throw DegenerateBasisError("basis vectors are linearly dependent (Gram eigenvalue " +
                                   std::to_string(mu.minCoeff()) + ")");
    }
}

}  // namespace

HermMatrix restrict_form(const SesquilinearForm& form, const CMatrix& basis,
                         const TolerancePolicy& tol)
{
    check_basis(basis, tol);
    const Eigen::Index d = basis.cols();
    CMatrix out(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k) out(j, k) = form(basis.col(j), basis.col(k));
    if (HermMatrix::symmetry_defect(out) > 1e-8) {
        throw SymmetryError("restricted form is not Hermitian");
    }
    return HermMatrix::hermitian_part(out);
}

HermMatrix restrict_form(const HermMatrix& form, const CMatrix& basis, const TolerancePolicy& tol)
{
    check_basis(basis, tol);
    return HermMatrix::hermitian_part(basis.adjoint() * form.matrix() * basis);
}

}  // namespace sturmflow
