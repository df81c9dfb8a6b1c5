#include <random>

#include "doctest.h"
#include "sturmflow/errors.hpp"
#include "sturmflow/superlag.hpp"
#include "test_support.hpp"

using namespace sturmflow;
using sturmflow::testing::random_hermitian;

namespace {

CMatrix diag(std::initializer_list<double> d)
{
    CMatrix m = CMatrix::Zero(d.size(), d.size());
    int k = 0;
    for (double v : d) {
        m(k, k) = v;
        ++k;
    }
    return m;
}

CMatrix random_unitary(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> g;
    CMatrix a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<CMatrix> qr(a);
    return qr.householderQ() * CMatrix::Identity(n, n);
}

CVector vec(std::initializer_list<Complex> v)
{
    CVector x(v.size());
    int k = 0;
    for (Complex z : v) x(k++) = z;
    return x;
}

}  // namespace

TEST_CASE("standard_space examples")
{
    const SuperhermitianSpace s1 = standard_space(1);
    CHECK(s1.h(vec({1.0, 0.0})) == doctest::Approx(0.0));
    CHECK(s1.h(vec({1.0, Complex(0, 1)})) == doctest::Approx(1.0));
    const Inertia in = inertia(HermMatrix(standard_space(2).structure()));
    CHECK(in == Inertia{2, 2, 0});
    const RVector ev = eigen_decompose(HermMatrix(standard_space(2).structure())).values;
    CHECK(ev(0) == doctest::Approx(-0.5));
    CHECK(ev(3) == doctest::Approx(0.5));
}

TEST_CASE("h is Im<xi, eta> in the standard space")
{
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    const SuperhermitianSpace s = standard_space(3);
    for (int k = 0; k < 20; ++k) {
        CVector z(6);
        for (int r = 0; r < 6; ++r) z(r) = Complex(g(rng), g(rng));
        CHECK(s.h(z) == doctest::Approx(z.head(3).dot(z.tail(3)).imag()));
    }
}

TEST_CASE("structure matrices must have zero signature")
{
    CHECK_THROWS_AS(SuperhermitianSpace(CMatrix::Identity(2, 2)), GeometryError);
    CHECK_THROWS_AS(SuperhermitianSpace(diag({1, -1, 0, 1})), GeometryError);
}

TEST_CASE("doubled_space examples")
{
    const SuperhermitianSpace base = standard_space(1);
    const SuperhermitianSpace d = doubled_space(base);
    CHECK(d.dim() == 4);
    CHECK(inertia(HermMatrix(d.structure())) == Inertia{2, 2, 0});

    // the diagonal {(v, v)}
    CMatrix diagonal(4, 2);
    diagonal << CMatrix::Identity(2, 2), CMatrix::Identity(2, 2);
    CHECK(is_superlagrangian(diagonal, d).isotropic);

    // {(v, 0)} with h[v] != 0
    CMatrix left = CMatrix::Zero(4, 2);
    left(0, 0) = 1.0;
    left(1, 0) = Complex(0, 1);
    left(1, 1) = 1.0;
    CHECK_FALSE(is_superlagrangian(left, d).isotropic);
}

TEST_CASE("is_superlagrangian examples")
{
    std::mt19937_64 rng(42);
    const CMatrix t = random_hermitian(rng, 3, 2.0);
    CMatrix g(6, 3);
    g << CMatrix::Identity(3, 3), t;
    const IsotropyReport r = is_superlagrangian(g, standard_space(3));
    CHECK(r.isotropic);
    CHECK(r.residual < 1e-14);

    CMatrix skew(2, 1);
    skew << 1.0, Complex(0, 1);
    const IsotropyReport s = is_superlagrangian(skew, standard_space(1));
    CHECK_FALSE(s.isotropic);
    CHECK_THROWS_AS(SuperlagFrame(standard_space(1), skew), GeometryError);

    CMatrix p0 = CMatrix::Zero(4, 2);
    p0.topRows(2).setIdentity();
    CHECK(is_superlagrangian(p0, standard_space(2)).isotropic);

    CMatrix deficient = CMatrix::Zero(4, 2);
    deficient(0, 0) = deficient(0, 1) = 1.0;
    CHECK_THROWS_AS(is_superlagrangian(deficient, standard_space(2)), GeometryError);
    CHECK_THROWS_AS(is_superlagrangian(CMatrix::Zero(4, 1), standard_space(2)), GeometryError);
}

TEST_CASE("intersection examples")
{
    const SuperlagFrame p0 = base_plane(2);
    const Intersection same = intersection(p0, p0);
    CHECK(same.dimension == 2);

    std::mt19937_64 rng(43);
    CMatrix t = random_hermitian(rng, 2, 1.0) + 3.0 * CMatrix::Identity(2, 2);
    CHECK(intersection(graph_frame(t), p0).dimension == 0);

    const Intersection one = intersection(graph_frame(diag({0, 1})), p0);
    REQUIRE(one.dimension == 1);
    CHECK(std::abs(one.basis(0, 0)) == doctest::Approx(1.0));
    CHECK(one.basis.bottomRows(2).norm() < 1e-14);
}

TEST_CASE("chart examples")
{
    const SuperlagFrame p0 = base_plane(1), p1 = fiber_plane(1);
    CHECK(chart(p0, p0, p1).matrix().norm() < 1e-15);
    for (double t : {-2.0, 0.3, 5.0}) {
        CMatrix tt(1, 1);
        tt(0, 0) = t;
        CHECK(chart(graph_frame(tt), p0, p1)(0, 0).real() == doctest::Approx(t));
    }
    CHECK_THROWS_AS(chart(p1, p0, p1), GeometryError);
    CHECK_THROWS_AS(chart(p0, p0, p0), GeometryError);
}

TEST_CASE("chart is Hermitian for 50 random superlagrangians")
{
    std::mt19937_64 rng(44);
    const SuperlagFrame p0 = base_plane(3);
    for (int k = 0; k < 50; ++k) {
        // random superlagrangian: graph over a random complement of a random plane
        const SuperlagFrame q0 = graph_frame(random_hermitian(rng, 3, 2.0));
        const SuperlagFrame p = random_complement(q0, {}, rng);
        const SuperlagFrame p1 = random_complement(p0, {p}, rng);
        CMatrix raw;
        {
            const CMatrix& e0 = p0.basis();
            const CMatrix& e1 = p1.basis();
            CMatrix split(6, 6);
            split << e0, e1;
            const CMatrix z = split.partialPivLu().solve(p.basis());
            const CMatrix t = z.bottomRows(3) * z.topRows(3).inverse();
            raw = Complex(0, 2) * (e0.adjoint() * p.space().structure() * e1) * t;
        }
        CHECK(HermMatrix::symmetry_defect(raw) < 1e-9);
        CHECK(HermMatrix::symmetry_defect(chart(p, p0, p1).matrix()) < 1e-15);
        CHECK(is_superlagrangian(p.basis(), p.space()).isotropic);
        CHECK(is_superlagrangian(p1.basis(), p1.space()).isotropic);
    }
}

TEST_CASE("chart value on P0 equals -2 Im h")
{
    std::mt19937_64 rng(45);
    const SuperlagFrame p0 = base_plane(2);
    const SuperlagFrame p = graph_frame(random_hermitian(rng, 2, 1.0));
    const SuperlagFrame p1 = random_complement(p0, {p}, rng);
    const HermMatrix m = chart(p, p0, p1);
    // v in P with v - E0 c in P1
    std::normal_distribution<double> g;
    CVector c(2);
    c << Complex(g(rng), g(rng)), Complex(g(rng), g(rng));
    CMatrix split(4, 4);
    split << p.basis(), -p1.basis();
    const CVector coef = split.partialPivLu().solve(p0.basis() * c);
    const CVector v = p.basis() * coef.head(2);
    const double lhs = c.dot(m.matrix() * c).real();
    CHECK(lhs == doctest::Approx(-2.0 * p.space().h(p0.basis() * c, v).imag()));
}

TEST_CASE("random complements are isotropic and transverse")
{
    std::mt19937_64 rng(46);
    const SuperhermitianSpace d = doubled_space(standard_space(2));
    CMatrix f = CMatrix::Zero(8, 4);
    f.block(2, 0, 2, 2).setIdentity();
    f.block(6, 2, 2, 2).setIdentity();
    const SuperlagFrame p0(d, f);
    for (int k = 0; k < 10; ++k) {
        const SuperlagFrame p1 = random_complement(p0, {}, rng);
        CHECK(intersection_indicator(p0, p1) > 1e-3);
        CHECK(p1.report().residual < 1e-12);
    }
}

TEST_CASE("crossing_form_numeric examples")
{
    const SuperlagFrame p0 = base_plane(1);
    const auto lin = [](double s) { return [s](double t) { return CMatrix::Constant(1, 1, Complex(s * t)); }; };
    const NumericCrossingForm up = crossing_form_numeric(graph_path(lin(1.0), 1, -1, 1), p0, 0.0, 1e-4);
    CHECK(up.form(0, 0).real() == doctest::Approx(1.0).epsilon(1e-8));
    const NumericCrossingForm down = crossing_form_numeric(graph_path(lin(-1.0), 1, -1, 1), p0, 0.0, 1e-4);
    CHECK(down.form(0, 0).real() == doctest::Approx(-1.0).epsilon(1e-8));

    const SuperlagPath two = graph_path([](double t) { return diag({t, 1.0}); }, 2, -1, 1);
    const NumericCrossingForm k = crossing_form_numeric(two, base_plane(2), 0.0, 1e-4);
    REQUIRE(k.form.dim() == 1);
    CHECK(k.form(0, 0).real() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(k.richardson_gap < 1e-6);

    CHECK_THROWS_AS(crossing_form_numeric(two, base_plane(2), 0.5, 1e-4), GeometryError);
}

TEST_CASE("crossing form does not depend on the complement")
{
    std::mt19937_64 rng(47);
    const CMatrix u = random_unitary(rng, 3);
    const CMatrix k = random_hermitian(rng, 3, 0.5);
    // curved path with a two-dimensional crossing at t = 0.2
    const SuperlagPath path = graph_path(
        [&](double t) {
            const double s = t - 0.2;
            return (u * diag({s + s * s, -2 * s, 1.0 + t}) * u.adjoint() + s * s * k).eval();
        },
        3, -1, 1);
    const SuperlagFrame p0 = base_plane(3);
    const NumericCrossingForm a = crossing_form_numeric(path, p0, 0.2, 2e-4, 1);
    const NumericCrossingForm b = crossing_form_numeric(path, p0, 0.2, 2e-4, 99);
    REQUIRE(a.form.dim() == 2);
    // same basis, so forms agree entrywise
    CHECK((a.basis - b.basis).norm() < 1e-12);
    CHECK((a.form.matrix() - b.form.matrix()).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(inertia(a.form) == Inertia{1, 1, 0});
}

TEST_CASE("winding orientation matches the crossing form sign")
{
    const SuperlagFrame p0 = base_plane(1);
    for (double s : {1.0, -1.0, 3.0}) {
        const SuperlagPath path = graph_path(
            [s](double t) { return CMatrix::Constant(1, 1, Complex(s * t)); }, 1, -1, 1);
        const int w = winding_count([&](double t) { return relative_unitary(path(t), p0); }, -1, 1);
        CHECK(w == (s > 0 ? 1 : -1));
    }
    const SuperlagPath none = graph_path([](double t) { return diag({2.0 + t, -1.0}); }, 2, -1, 1);
    CHECK(winding_count([&](double t) { return relative_unitary(none(t), base_plane(2)); }, -1, 1) == 0);
}

TEST_CASE("relative unitary eigenvalue 1 marks the intersection")
{
    const SuperlagFrame p0 = base_plane(2);
    const CMatrix v = relative_unitary(graph_frame(diag({0.0, 2.0})), p0);
    CHECK((v.adjoint() * v - CMatrix::Identity(2, 2)).norm() < 1e-12);
    const RVector ph = unitary_phases(v);
    CHECK(phase_gap(v) < 1e-12);
    CHECK(ph(1) > 1.0);
}

TEST_CASE("em_index examples")
{
    const SuperlagFrame p0 = base_plane(1);
    const SuperlagPath loc = graph_path([](double t) { return CMatrix::Constant(1, 1, Complex(t)); }, 1, -1, 1);
    const EmIndexResult r = em_index(loc, p0);
    CHECK(r.index == 1);
    REQUIRE(r.crossings.size() == 1);
    CHECK(std::abs(r.crossings[0].lambda) < 1e-9);
    CHECK(r.crossings[0].regular);

    const SuperlagPath constant = graph_path([](double) { return CMatrix::Constant(1, 1, Complex(2.0)); }, 1, -1, 1);
    CHECK(em_index(constant, p0).index == 0);

    const auto sub = [](double a, double b) {
        return graph_path([](double t) { return CMatrix::Constant(1, 1, Complex(t)); }, 1, a, b);
    };
    CHECK(em_index(sub(-1, 0.5), p0).index + em_index(sub(0.5, 1), p0).index == r.index);
    CHECK_THROWS_AS(em_index(sub(0.0, 1.0), p0), AdmissibilityError);
}

TEST_CASE("em_index of a path with several and nearby crossings")
{
    const SuperlagFrame p0 = base_plane(3);
    // crossings at -0.5 (sign -1), 0, 0.6 and a pair 2e-6 apart near 0.3
    const SuperlagPath path = graph_path(
        [](double t) { return diag({t * (t - 0.6), -(t + 0.5), (t - 0.3) * (t - 0.300002)}); }, 3, -1, 1);
    const EmIndexResult r = em_index(path, p0, {}, {});
    // half signature difference between the ends: (1 - 3) / 2
    CHECK(r.index == -1);
    CHECK(r.crossings.size() == 5);
}

TEST_CASE("degenerate crossing form is reported")
{
    const SuperlagPath path = graph_path([](double t) { return CMatrix::Constant(1, 1, Complex(t * t * t)); }, 1, -1, 1);
    CHECK_THROWS_AS(em_index(path, base_plane(1)), NonRegularCrossingError);
}

TEST_CASE("sign bug is caught by the winding check")
{
    const SuperlagPath loc = graph_path([](double t) { return CMatrix::Constant(1, 1, Complex(t)); }, 1, -1, 1);
    EmIndexOptions o;
    o.negate_crossing_forms = true;
    CHECK_THROWS_AS(em_index(loc, base_plane(1), {}, o), InconsistencyError);
}

TEST_CASE("continuity of frames along a path")
{
    const SuperlagPath loc = graph_path([](double t) { return CMatrix::Constant(1, 1, Complex(t)); }, 1, -1, 1);
    CHECK(loc.max_step_angle(64) < 0.05);
}
