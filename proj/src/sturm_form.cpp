#include "sturmflow/sturm_form.hpp"

#include <cmath>
#include <cstdio>

#include "sturmflow/errors.hpp"

namespace sturmflow {

namespace {

double binomial(int n, int k)
{
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

std::string format_complex(Complex z)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

void check_lambda(double lambda)
{
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "lambda must lie in [0, 1], got %.17g", lambda);
        throw DomainError(buf);
    }
}

}  // namespace

FormCoefficients::FormCoefficients(int m, int n)
    : m_(m), n_(n), entries_((m + 1) * (m + 1), MatrixPolynomial::zero(n))
{
}

std::size_t FormCoefficients::index(int i, int j) const
{
    if (i < 0 || j < 0 || i > m_ || j > m_) {
        throw DomainError("form index (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") outside 0.." + std::to_string(m_));
    }
    return static_cast<std::size_t>(i * (m_ + 1) + j);
}

int FormCoefficients::max_degree() const
{
    int d = 0;
    for (const auto& e : entries_) d = std::max(d, e.degree());
    return d;
}

Complex FormCoefficients::density(double x, const CVector& jet_v, const CVector& jet_u) const
{
    Complex acc = 0.0;
    for (int i = 0; i <= m_; ++i)
        for (int j = 0; j <= m_; ++j) {
            const auto& w = at(i, j);
            if (w.is_zero()) continue;
            acc += jet_v.segment(i * n_, n_).dot(w(x) * jet_u.segment(j * n_, n_));
        }
    return acc;
}

CMatrix leading_symmetry(int n, int nu)
{
    CMatrix s = CMatrix::Identity(n, n);
    for (int k = n - nu; k < n; ++k) s(k, k) = -1.0;
    return s;
}

std::vector<std::string> diagnose(const SturmProblem& problem)
{
    std::vector<std::string> out;
    const int m = problem.m, n = problem.n, nu = problem.nu;
    if (m < 1) out.push_back("half-order m must be >= 1, got " + std::to_string(m));
    if (n < 1) out.push_back("system dimension n must be >= 1, got " + std::to_string(n));
    if (nu < 0 || nu > n)
        out.push_back("signature index nu must satisfy 0 <= nu <= n, got " + std::to_string(nu));
    if (!out.empty()) return out;
    if (problem.omega.m() != m || problem.omega.n() != n) {
        out.push_back("coefficient table has shape (m=" + std::to_string(problem.omega.m()) +
                      ", n=" + std::to_string(problem.omega.n()) + "), expected (m=" +
                      std::to_string(m) + ", n=" + std::to_string(n) + ")");
        return out;
    }

    const auto where = [](int i, int j) {
        return "omega(" + std::to_string(i) + "," + std::to_string(j) + ")";
    };
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            const auto& w = problem.omega.at(i, j);
            if (!w.is_zero() && (w.rows() != n || w.cols() != n)) {
                out.push_back(where(i, j) + " has shape " + std::to_string(w.rows()) + "x" +
                              std::to_string(w.cols()) + ", expected " + std::to_string(n) + "x" +
                              std::to_string(n));
                continue;
            }
            for (int p = 0; p <= w.degree(); ++p) {
                const CMatrix c = w.coefficient(p);
                for (int r = 0; r < n; ++r)
                    for (int s = 0; s < n; ++s) {
                        if (!std::isfinite(c(r, s).real()) || !std::isfinite(c(r, s).imag()))
                            out.push_back(where(i, j) + " x^" + std::to_string(p) + " entry [" +
                                          std::to_string(r) + "][" + std::to_string(s) +
                                          "] is not finite");
                    }
                if (HermMatrix::symmetry_defect(c) > 1e-12) {
                    out.push_back(where(i, j) + " x^" + std::to_string(p) +
                                  " coefficient is not Hermitian");
                }
            }
        }

    for (int i = 0; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j) {
            const auto& a = problem.omega.at(i, j);
            const auto& b = problem.omega.at(j, i);
            const int deg = std::max(a.degree(), b.degree());
            for (int p = 0; p <= deg; ++p) {
                const CMatrix ca = a.is_zero() ? CMatrix::Zero(n, n) : a.coefficient(p);
                const CMatrix cb = b.is_zero() ? CMatrix::Zero(n, n) : b.coefficient(p);
                if (ca.rows() != n || cb.rows() != n) continue;
                const double scale = std::max(1.0, std::max(ca.cwiseAbs().maxCoeff(), cb.cwiseAbs().maxCoeff()));
                for (int r = 0; r < n; ++r)
                    for (int s = 0; s < n; ++s)
                        if (std::abs(ca(r, s) - cb(r, s)) > 1e-12 * scale) {
                            out.push_back("index-symmetry violation: " + where(i, j) + " x^" +
                                          std::to_string(p) + " entry [" + std::to_string(r) +
                                          "][" + std::to_string(s) + "] = " +
                                          format_complex(ca(r, s)) + " but " + where(j, i) +
                                          " has " + format_complex(cb(r, s)));
                        }
            }
        }

    const auto& lead = problem.omega.at(m, m);
    if (lead.degree() > 0) {
        out.push_back("leading symmetry mismatch: " + where(m, m) + " must be constant, has degree " +
                      std::to_string(lead.degree()));
    }
    const CMatrix expect = leading_symmetry(n, nu);
    const CMatrix got = lead.is_zero() ? CMatrix::Zero(n, n) : lead.coefficient(0);
    if (got.rows() == n && got.cols() == n) {
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
                if (got(r, s) != expect(r, s)) {
                    out.push_back("leading symmetry mismatch: " + where(m, m) + " entry [" +
                                  std::to_string(r) + "][" + std::to_string(s) + "] = " +
                                  format_complex(got(r, s)) + ", expected " +
                                  format_complex(expect(r, s)) + " for nu=" + std::to_string(nu));
                }
    }
    return out;
}

const SturmProblem& validate(const SturmProblem& problem)
{
    auto diags = diagnose(problem);
    if (!diags.empty()) throw ValidationError(std::move(diags));
    return problem;
}

ValidationError::ValidationError(std::vector<std::string> diagnostics)
    : Error([&] {
          std::string msg = "invalid problem:";
          for (const auto& d : diagnostics) msg += "\n  " + d;
          return msg;
      }()),
      diagnostics_(std::move(diagnostics))
{
}

OperatorCoefficients OperatorCoefficients::rescaled(double lambda) const
{
    OperatorCoefficients out = *this;
    for (int k = 0; k <= 2 * m; ++k) {
        out.p[k] = std::pow(lambda, 2 * m - k) * p[k].scaled_argument(lambda);
    }
    return out;
}

CVector OperatorCoefficients::apply(double x, const CVector& jet) const
{
    CVector acc = CVector::Zero(n);
    for (int k = 0; k <= 2 * m; ++k) {
        if (p[k].is_zero()) continue;
        acc += p[k](x) * jet.segment(k * n, n);
    }
    return acc;
}

OperatorCoefficients assemble_operator(const SturmProblem& problem)
{
    const int m = problem.m, n = problem.n;
    OperatorCoefficients op;
    op.m = m;
    op.n = n;
    op.leading_sign = (m % 2 == 0) ? 1 : -1;
    op.symmetry = problem.symmetry();
    op.p.assign(2 * m + 1, MatrixPolynomial::zero(n));
    // (-1)^i D^i (w D^j u) = (-1)^i sum_s C(i,s) w^{(i-s)} D^{j+s} u
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            const auto& w = problem.omega.at(i, j);
            if (w.is_zero()) continue;
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            for (int s = 0; s <= i; ++s)
                op.p[j + s] += Complex(sign * binomial(i, s)) * w.derivative(i - s);
        }
    return op;
}

CMatrix BoundaryMap::operator()(double x) const
{
    CMatrix a = CMatrix::Zero(m * n, 2 * m * n);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < 2 * m; ++k) {
            const auto& b = at(j, k);
            if (!b.is_zero()) a.block(j * n, k * n, n, n) = b(x);
        }
    return a;
}

BoundaryMap assemble_boundary_map(const SturmProblem& problem)
{
    const int m = problem.m, n = problem.n;
    BoundaryMap a;
    a.m = m;
    a.n = n;
    a.blocks.assign(2 * m * m, MatrixPolynomial::zero(n));
    // int_0^1 <D^i v, g> = sum_{r<i} (-1)^r [<D^{i-1-r} v, D^r g>]_0^1 + (-1)^i int <v, D^i g>
    // with g = w D^j u and D^r g = sum_s C(r,s) w^{(r-s)} D^{j+s} u.
    for (int i = 1; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            const auto& w = problem.omega.at(i, j);
            if (w.is_zero()) continue;
            for (int r = 0; r < i; ++r) {
                const double sign = (r % 2 == 0) ? 1.0 : -1.0;
                for (int s = 0; s <= r; ++s)
                    a.at(i - 1 - r, j + s) += Complex(sign * binomial(r, s)) * w.derivative(r - s);
            }
        }
    return a;
}

SturmProblem rescale(const SturmProblem& problem, double lambda)
{
    check_lambda(lambda);
    SturmProblem out(problem.m, problem.n, problem.nu);
    const int m = problem.m;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            const auto& w = problem.omega.at(i, j);
            if (w.is_zero()) continue;
            out.omega.at(i, j) = std::pow(lambda, 2 * m - i - j) * w.scaled_argument(lambda);
        }
    return out;
}

FormCoefficients rescale_derivative(const SturmProblem& problem, double lambda)
{
    check_lambda(lambda);
    const int m = problem.m, n = problem.n;
    FormCoefficients out(m, n);
    // omega^lambda = sum_p c_p lambda^{e+p} x^p, e = 2m - i - j
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            const auto& w = problem.omega.at(i, j);
            MatrixPolynomial d = MatrixPolynomial::zero(n);
            const int e = 2 * m - i - j;
            for (int p = 0; p <= w.degree(); ++p) {
                const int power = e + p;
                if (power == 0) continue;
                d.add_term(p, (power * std::pow(lambda, power - 1)) * w.coefficient(p));
            }
            out.at(i, j) = d;
        }
    return out;
}

}  // namespace sturmflow
