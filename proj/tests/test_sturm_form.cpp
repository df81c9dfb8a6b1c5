#include <random>

#include "doctest.h"
#include "sturmflow/errors.hpp"
#include "sturmflow/quadrature.hpp"
#include "sturmflow/sturm_form.hpp"
#include "test_support.hpp"

using namespace sturmflow;
using namespace sturmflow::testing;

namespace {

double coeff(const MatrixPolynomial& p, int power, int r = 0, int c = 0)
{
    if (p.is_zero() || power > p.degree()) return 0.0;
    return p.coefficient(power)(r, c).real();
}

bool mentions(const std::vector<std::string>& diags, const std::string& needle)
{
    for (const auto& d : diags)
        if (d.find(needle) != std::string::npos) return true;
    return false;
}

// Random vector polynomial in x, as an n x 1 matrix polynomial.
MatrixPolynomial random_vector_poly(std::mt19937_64& rng, int n, int degree)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatrixPolynomial p(n, 1);
    for (int k = 0; k <= degree; ++k) {
        CMatrix c(n, 1);
        for (int r = 0; r < n; ++r) c(r, 0) = Complex(u(rng), u(rng));
        p.add_term(k, c);
    }
    return p;
}

// Stacked jet (f, f', ..., f^{(order-1)}) at x.
CVector jet_of(const MatrixPolynomial& f, int order, double x)
{
    const auto n = f.rows();
    CVector out(order * n);
    for (int k = 0; k < order; ++k) {
        const MatrixPolynomial d = f.derivative(k);
        out.segment(k * n, n) = d.is_zero() ? CVector::Zero(n) : CVector(d(x).col(0));
    }
    return out;
}

}  // namespace

TEST_CASE("validate examples")
{
    CHECK(diagnose(prob_a()).empty());
    CHECK_NOTHROW(validate(prob_a()));

    SturmProblem bad(1, 2, 1);
    bad.omega.at(1, 1) = MatrixPolynomial::constant(CMatrix::Identity(2, 2));
    const auto d1 = diagnose(bad);
    REQUIRE_FALSE(d1.empty());
    CHECK(mentions(d1, "leading symmetry mismatch"));
    CHECK(mentions(d1, "omega(1,1)"));
    CHECK(mentions(d1, "[1][1]"));

    SturmProblem asym = prob_a();
    asym.omega.at(0, 1) = MatrixPolynomial::constant(scalar(0.5));
    const auto d2 = diagnose(asym);
    REQUIRE(d2.size() == 1);
    CHECK(mentions(d2, "index-symmetry violation"));
    CHECK(mentions(d2, "omega(0,1)"));
    try {
        validate(asym);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.diagnostics() == d2);
    }
}

TEST_CASE("validate reports every violation separately")
{
    SturmProblem p(1, 2, 0);
    CMatrix lead = CMatrix::Identity(2, 2);
    lead(1, 1) = -1.0;  // inconsistent with nu = 0
    p.omega.at(1, 1) = MatrixPolynomial::constant(lead);
    CMatrix nonherm = CMatrix::Zero(2, 2);
    nonherm(0, 1) = 1.0;
    p.omega.at(0, 0) = MatrixPolynomial::constant(nonherm);
    const auto d = diagnose(p);
    CHECK(mentions(d, "leading symmetry mismatch"));
    CHECK(mentions(d, "omega(0,0) x^0 coefficient is not Hermitian"));

    SturmProblem range(0, 1, 0);
    CHECK(mentions(diagnose(range), "half-order"));
    SturmProblem nu(1, 1, 2);
    CHECK(mentions(diagnose(nu), "signature index"));

    SturmProblem varying = prob_0();
    varying.omega.at(1, 1).add_term(1, scalar(0.1));
    CHECK(mentions(diagnose(varying), "must be constant"));
}

TEST_CASE("assemble_operator examples")
{
    const double c = std::pow(2.5 * pi, 2);
    const OperatorCoefficients a = assemble_operator(prob_a());
    CHECK(a.leading_sign == -1);
    CHECK(coeff(a.p[2], 0) == doctest::Approx(-1.0));
    CHECK(a.p[1].is_zero());
    CHECK(coeff(a.p[0], 0) == doctest::Approx(-c));

    const OperatorCoefficients z = assemble_operator(prob_0());
    CHECK(coeff(z.p[2], 0) == doctest::Approx(-1.0));
    CHECK(z.p[0].is_zero());

    const OperatorCoefficients b = assemble_operator(prob_c(7.0));
    CHECK(b.leading_sign == 1);
    CHECK(coeff(b.p[4], 0) == doctest::Approx(1.0));
    for (int k = 1; k < 4; ++k) CHECK(b.p[k].is_zero());
    CHECK(coeff(b.p[0], 0) == doctest::Approx(-7.0));
}

TEST_CASE("assemble_operator expands the Leibniz rule for variable coefficients")
{
    // omega11 = 1, omega01 = omega10 = x, omega00 = x^2: l u = -u'' - (x u)' + x u' + x^2 u = -u'' + (x^2 - 1) u
    SturmProblem p = prob_0();
    MatrixPolynomial w(1, 1);
    w.add_term(1, scalar(1.0));
    p.omega.at(0, 1) = w;
    p.omega.at(1, 0) = w;
    MatrixPolynomial w0(1, 1);
    w0.add_term(2, scalar(1.0));
    p.omega.at(0, 0) = w0;
    const OperatorCoefficients op = assemble_operator(p);
    CHECK(coeff(op.p[2], 0) == doctest::Approx(-1.0));
    CHECK(op.p[1].is_zero());
    CHECK(coeff(op.p[0], 0) == doctest::Approx(-1.0));
    CHECK(coeff(op.p[0], 2) == doctest::Approx(1.0));
}

TEST_CASE("assemble_boundary_map examples")
{
    const BoundaryMap a = assemble_boundary_map(prob_a());
    const CMatrix a0 = a(0.0);
    REQUIRE(a0.rows() == 1);
    REQUIRE(a0.cols() == 2);
    CHECK(std::abs(a0(0, 0)) == doctest::Approx(0.0));
    CHECK(a0(0, 1).real() == doctest::Approx(1.0));

    const BoundaryMap c = assemble_boundary_map(prob_c(3.0));
    const CMatrix c0 = c(0.37);
    REQUIRE(c0.rows() == 2);
    REQUIRE(c0.cols() == 4);
    CMatrix expect = CMatrix::Zero(2, 4);
    expect(0, 3) = -1.0;
    expect(1, 2) = 1.0;
    CHECK((c0 - expect).norm() == doctest::Approx(0.0));
}

TEST_CASE("antidiagonal law and vanishing below it on random problems")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 1 + trial % 3, n = 1 + (trial / 3) % 3;
        const int nu = std::uniform_int_distribution<int>(0, n)(rng);
        const SturmProblem p = random_problem(rng, m, n, nu, 3, 2.0);
        REQUIRE(diagnose(p).empty());
        const BoundaryMap a = assemble_boundary_map(p);
        for (int j = 0; j < m; ++j) {
            const int k = 2 * m - 1 - j;
            const MatrixPolynomial& b = a.at(j, k);
            REQUIRE(b.degree() == 0);
            const double sign = ((m - 1 - j) % 2 == 0) ? 1.0 : -1.0;
            CHECK((b.coefficient(0) - sign * p.symmetry()).norm() == 0.0);
            for (int kk = 2 * m - j; kk < 2 * m; ++kk) CHECK(a.at(j, kk).is_zero());
        }
    }
}

TEST_CASE("reconstruction identity q(v,u) = int <v, l u> + boundary terms")
{
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 60; ++trial) {
        const int m = 1 + trial % 2, n = 1 + (trial / 2) % 3;
        const int nu = std::uniform_int_distribution<int>(0, n)(rng);
        const SturmProblem p = random_problem(rng, m, n, nu, 3, 3.0);
        const OperatorCoefficients op = assemble_operator(p);
        const BoundaryMap a = assemble_boundary_map(p);
        const int dv = 2 + trial % 4, du = 2 * m + 1 + trial % 3;
        const MatrixPolynomial v = random_vector_poly(rng, n, dv);
        const MatrixPolynomial u = random_vector_poly(rng, n, du);
        const QuadratureRule q = gauss_legendre_for_degree(dv + du + p.omega.max_degree() + 2);

        Complex lhs = 0.0, bulk = 0.0;
        double mag = 0.0;
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            const double x = q.nodes[k];
            const CVector jv = jet_of(v, 2 * m + 1, x), ju = jet_of(u, 2 * m + 1, x);
            const Complex dens = p.omega.density(x, jv, ju);
            lhs += q.weights[k] * dens;
            bulk += q.weights[k] * jv.head(n).dot(op.apply(x, ju));
            mag += q.weights[k] * std::abs(dens);
        }
        const auto boundary = [&](double x) {
            return jet_of(v, m, x).dot(a(x) * jet_of(u, 2 * m, x));
        };
        const Complex rhs = bulk + boundary(1.0) - boundary(0.0);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, mag));
    }
}

TEST_CASE("rescale examples")
{
    const SturmProblem a = prob_a();
    const SturmProblem one = rescale(a, 1.0);
    CHECK(coeff(one.omega.at(0, 0), 0) == doctest::Approx(coeff(a.omega.at(0, 0), 0)));
    CHECK(coeff(one.omega.at(1, 1), 0) == 1.0);

    std::mt19937_64 rng(23);
    const SturmProblem r = random_problem(rng, 2, 2, 1, 3, 1.0);
    const SturmProblem zero = rescale(r, 0.0);
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j) {
            if (i == 2 && j == 2)
                CHECK((zero.omega.at(i, j)(0.3) - r.symmetry()).norm() == 0.0);
            else
                CHECK(zero.omega.at(i, j).is_zero());
        }

    const double c = std::pow(2.5 * pi, 2);
    const SturmProblem half = rescale(a, 0.5);
    CHECK(coeff(half.omega.at(0, 0), 0) == doctest::Approx(-0.25 * c));
    CHECK(coeff(half.omega.at(1, 1), 0) == 1.0);

    CHECK_THROWS_AS(rescale(a, 1.5), DomainError);
    CHECK_THROWS_AS(rescale(a, -0.1), DomainError);
}

TEST_CASE("rescale matches the substitution formula at 50 random pairs")
{
    std::mt19937_64 rng(24);
    const SturmProblem p = random_problem(rng, 2, 2, 1, 4, 2.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double lambda = u(rng), x = u(rng);
        const SturmProblem r = rescale(p, lambda);
        for (int i = 0; i <= 2; ++i)
            for (int j = 0; j <= 2; ++j) {
                const auto& w = p.omega.at(i, j);
                if (w.is_zero()) continue;
                const CMatrix expect = std::pow(lambda, 4 - i - j) * w(lambda * x);
                const CMatrix got = r.omega.at(i, j).is_zero() ? CMatrix::Zero(2, 2)
                                                               : r.omega.at(i, j)(x);
                CHECK((got - expect).norm() <= 1e-13 * std::max(1.0, expect.norm()));
            }
    }
}

TEST_CASE("operator of the rescaled form equals the rescaled operator")
{
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial % 2, n = 1 + trial % 3;
        const SturmProblem p = random_problem(rng, m, n, trial % (n + 1), 3, 2.0);
        const double lambda = 0.1 + 0.045 * trial;
        const OperatorCoefficients a = assemble_operator(rescale(p, lambda));
        const OperatorCoefficients b = assemble_operator(p).rescaled(lambda);
        for (int k = 0; k <= 2 * m; ++k)
            for (double x : {0.0, 0.3, 0.8, 1.0}) {
                const CMatrix pa = a.p[k].is_zero() ? CMatrix::Zero(n, n) : a.p[k](x);
                const CMatrix pb = b.p[k].is_zero() ? CMatrix::Zero(n, n) : b.p[k](x);
                CHECK((pa - pb).norm() <= 1e-12 * std::max(1.0, pa.norm()));
            }
    }
}

TEST_CASE("rescale_derivative examples")
{
    const double c = std::pow(2.5 * pi, 2);
    const FormCoefficients d = rescale_derivative(prob_a(), 0.4);
    CHECK(coeff(d.at(0, 0), 0) == doctest::Approx(-2 * 0.4 * c));
    CHECK(d.at(1, 1).is_zero());
    CHECK(d.at(0, 1).is_zero());

    const double c1 = std::pow(1.5 * pi, 2), c2 = std::pow(2.5 * pi, 2);
    const FormCoefficients b = rescale_derivative(prob_b(), 0.5);
    CHECK(coeff(b.at(0, 0), 0, 0, 0) == doctest::Approx(-c1));
    CHECK(coeff(b.at(0, 0), 0, 1, 1) == doctest::Approx(c2));
    CHECK(b.at(1, 1).is_zero());

    // i + j = 2m - 1 term at lambda = 0 stays finite
    SturmProblem p = prob_0();
    p.omega.at(0, 1) = MatrixPolynomial::constant(scalar(2.0));
    p.omega.at(1, 0) = p.omega.at(0, 1);
    const FormCoefficients z = rescale_derivative(p, 0.0);
    CHECK(coeff(z.at(0, 1), 0) == doctest::Approx(2.0));
}

TEST_CASE("rescale_derivative agrees with central differences")
{
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 20; ++trial) {
        const SturmProblem p = random_problem(rng, 1 + trial % 2, 2, 1, 4, 2.0);
        const int m = p.m;
        const double lambda = 0.2 + 0.035 * trial, h = 1e-5;
        const FormCoefficients d = rescale_derivative(p, lambda);
        const SturmProblem lo = rescale(p, lambda - h), hi = rescale(p, lambda + h);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j)
                for (double x : {0.1, 0.5, 0.9}) {
                    const auto ev = [&](const MatrixPolynomial& w) {
                        return w.is_zero() ? CMatrix(CMatrix::Zero(2, 2)) : w(x);
                    };
                    const CMatrix fd = (ev(hi.omega.at(i, j)) - ev(lo.omega.at(i, j))) / (2 * h);
                    const CMatrix ex = ev(d.at(i, j));
                    CHECK((fd - ex).norm() <= 1e-6 * std::max(1.0, ex.norm()));
                }
    }
}
