#include "sturmflow/matrix_polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sturmflow/errors.hpp"

namespace sturmflow {

MatrixPolynomial MatrixPolynomial::constant(const CMatrix& c)
{
    MatrixPolynomial p(c.rows(), c.cols());
    p.add_term(0, c);
    return p;
}

void MatrixPolynomial::add_term(int power, const CMatrix& coeff)
{
    if (power < 0) throw DomainError("polynomial power must be nonnegative");
    if (coeff.rows() != rows_ || coeff.cols() != cols_) {
        throw DomainError("coefficient shape " + std::to_string(coeff.rows()) + "x" +
                          std::to_string(coeff.cols()) + " does not match polynomial shape " +
                          std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (static_cast<int>(coeffs_.size()) <= power)
        coeffs_.resize(power + 1, CMatrix::Zero(rows_, cols_));
    coeffs_[power] += coeff;
    trim();
}

CMatrix MatrixPolynomial::coefficient(int power) const
{
    if (power < 0 || power >= static_cast<int>(coeffs_.size())) return CMatrix::Zero(rows_, cols_);
    return coeffs_[power];
}

CMatrix MatrixPolynomial::operator()(double x) const
{
    CMatrix acc = CMatrix::Zero(rows_, cols_);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

MatrixPolynomial MatrixPolynomial::derivative(int order) const
{
    MatrixPolynomial d(rows_, cols_);
    for (int p = order; p < static_cast<int>(coeffs_.size()); ++p) {
        double factor = 1.0;
        for (int k = 0; k < order; ++k) factor *= static_cast<double>(p - k);
        d.add_term(p - order, factor * coeffs_[p]);
    }
    return d;
}

MatrixPolynomial MatrixPolynomial::scaled_argument(double c) const
{
    MatrixPolynomial s(rows_, cols_);
    double cp = 1.0;
    for (int p = 0; p < static_cast<int>(coeffs_.size()); ++p) {
        s.add_term(p, cp * coeffs_[p]);
        cp *= c;
    }
    return s;
}

MatrixPolynomial& MatrixPolynomial::operator+=(const MatrixPolynomial& other)
{
    if (other.is_zero()) return *this;
    if (rows_ == 0 && cols_ == 0 && coeffs_.empty()) {
        rows_ = other.rows_;
        cols_ = other.cols_;
    }
    for (int p = 0; p <= other.degree(); ++p) add_term(p, other.coeffs_[p]);
    return *this;
}

MatrixPolynomial& MatrixPolynomial::operator*=(Complex s)
{
    for (auto& c : coeffs_) c *= s;
    trim();
    return *this;
}

MatrixPolynomial MatrixPolynomial::times(const CMatrix& right) const
{
    MatrixPolynomial out(rows_, right.cols());
    for (int p = 0; p <= degree(); ++p) out.add_term(p, coeffs_[p] * right);
    return out;
}

MatrixPolynomial MatrixPolynomial::left_times(const CMatrix& left) const
{
    MatrixPolynomial out(left.rows(), cols_);
    for (int p = 0; p <= degree(); ++p) out.add_term(p, left * coeffs_[p]);
    return out;
}

double MatrixPolynomial::max_abs() const
{
    double m = 0.0;
    for (const auto& c : coeffs_)
        if (c.size()) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
}

void MatrixPolynomial::trim()
{
    while (!coeffs_.empty() && (coeffs_.back().size() == 0 || coeffs_.back().isZero(0.0)))
        coeffs_.pop_back();
}

}  // namespace sturmflow
