#include <algorithm>

#include "doctest.h"
#include "sturmflow/errors.hpp"
#include "sturmflow/morse_pipeline.hpp"
#include "test_support.hpp"

using namespace sturmflow;
using namespace sturmflow::testing;

namespace {

std::vector<int> signs(const SpectralFlowCrossings& s)
{
    std::vector<int> out;
    for (const auto& r : s.crossings) out.push_back(r.signature());
    return out;
}

}  // namespace

TEST_CASE("Galerkin basis vanishes to order m at both ends")
{
    for (int m : {1, 2, 3}) {
        const GalerkinBasis b(m, 2, 10);
        CHECK(b.size() == 20);
        for (double x : {0.0, 1.0}) {
            const Eigen::MatrixXd d = b.derivatives(x, m);
            CHECK(d.topRows(m).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    CHECK_THROWS_AS(GalerkinBasis(2, 1, 2), DomainError);
}

TEST_CASE("Galerkin basis derivatives match finite differences")
{
    const GalerkinBasis b(2, 1, 12);
    const double h = 1e-5;
    for (double x : {0.13, 0.5, 0.77}) {
        const Eigen::MatrixXd d = b.derivatives(x, 2);
        const Eigen::MatrixXd dp = b.derivatives(x + h, 2), dm = b.derivatives(x - h, 2);
        for (int k = 0; k < 2; ++k) {
            const Eigen::VectorXd fd = (dp.row(k) - dm.row(k)) / (2 * h);
            CHECK((fd - d.row(k + 1).transpose()).cwiseAbs().maxCoeff() < 1e-6 * std::max(1.0, d.row(k + 1).cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("gram examples")
{
    const HermMatrix g0 = gram(prob_0(), 0.6, 4);
    const Inertia in0 = inertia(g0);
    CHECK(in0.n_plus == 4);
    CHECK(in0.n_minus == 0);
    CHECK(in0.n_zero == 0);
    // normalized so that the top-order diagonal is one
    for (int k = 0; k < 4; ++k) CHECK(std::abs(g0.matrix()(k, k) - 1.0) < 1e-12);

    // phi_0 = x(1-x): |phi'|^2 = 1/3, |phi|^2 = 1/30
    const double c = 17.0;
    const HermMatrix ga = gram(prob_a(c), 1.0, 5);
    CHECK(std::abs(ga.matrix()(0, 0) - (1.0 - c / 10.0)) < 1e-12);
    // rescaled at lambda = 0.5: c -> c/4
    CHECK(std::abs(gram(prob_a(c), 0.5, 5).matrix()(0, 0) - (1.0 - c / 40.0)) < 1e-12);

    const Inertia a0 = inertia(gram(prob_a(), 0.0, 16));
    CHECK(a0.n_plus == 16);

    const Inertia b0 = inertia(gram(prob_b(), 0.0, 6));
    CHECK(b0.n_plus == 6);
    CHECK(b0.n_minus == 6);
    CHECK(b0.n_zero == 0);

    const CMatrix gb = gram(prob_b(), 0.7, 8).matrix();
    CHECK(HermMatrix::symmetry_defect(gb) == 0.0);
}

TEST_CASE("gram derivative matches finite differences")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 6; ++trial) {
        const int m = 1 + trial % 2, n = 1 + trial % 3;
        const SturmProblem p = random_problem(rng, m, n, trial % (n + 1), 2, 5.0);
        const double l = 0.3 + 0.1 * trial, h = 1e-5;
        const CMatrix fd = (gram(p, l + h, 8).matrix() - gram(p, l - h, 8).matrix()) / (2 * h);
        const CMatrix an = gram_derivative(p, l, 8).matrix();
        CHECK((fd - an).cwiseAbs().maxCoeff() < 1e-6 * std::max(1.0, an.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("G_N(0) is nondegenerate for N up to 32")
{
    const std::vector<SturmProblem> problems{prob_0(), prob_a(), prob_b(),
                                             prob_c(std::pow(1.2 * beam_root(), 4))};
    for (const auto& p : problems)
        for (int count = p.m + 1; count <= 32; count += 3) {
            const Inertia in = inertia(gram(p, 0.0, count));
            CHECK(in.n_zero == 0);
            CHECK(in.n_minus == p.nu * count);
        }
}

TEST_CASE("weak perturbation: top-order block is lambda independent")
{
    // only omega(m, m) present: G_N does not depend on lambda at all
    SturmProblem p(2, 2, 1);
    p.omega.at(2, 2) = MatrixPolynomial::constant(p.symmetry());
    const CMatrix g0 = gram(p, 0.0, 10).matrix();
    for (double l : {0.25, 0.5, 1.0}) CHECK((gram(p, l, 10).matrix() - g0).cwiseAbs().maxCoeff() < 1e-12);

    // with lower-order terms the difference vanishes as lambda -> 0
    std::mt19937_64 rng(3);
    const SturmProblem r = random_problem(rng, 2, 2, 1, 2, 5.0);
    const CMatrix r0 = gram(r, 0.0, 10).matrix();
    CHECK((gram(r, 1e-6, 10).matrix() - r0).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("spectral_flow_inertia examples")
{
    CHECK(spectral_flow_inertia(prob_a(), 16) == -2);
    CHECK(spectral_flow_inertia(prob_0(), 16) == 0);
    CHECK(spectral_flow_inertia(prob_b(), 16) == 1);
    CHECK_THROWS_AS(spectral_flow_inertia(prob_a(std::pow(2 * pi, 2)), 16), EndpointDegeneracyError);
}

TEST_CASE("spectral_flow_crossings examples")
{
    const SpectralFlowCrossings a = spectral_flow_crossings(prob_a(), 16);
    REQUIRE(a.crossings.size() == 2);
    CHECK(a.crossings[0].lambda == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(a.crossings[1].lambda == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(signs(a) == std::vector<int>{-1, -1});
    CHECK(a.index == -2);

    const SpectralFlowCrossings z = spectral_flow_crossings(prob_0(), 16);
    CHECK(z.crossings.empty());
    CHECK(z.index == 0);

    const SpectralFlowCrossings b = spectral_flow_crossings(prob_b(), 16);
    CHECK(signs(b) == std::vector<int>{1, -1, 1});  // at 0.4, 2/3, 0.8
    CHECK(b.index == 1);
    REQUIRE(b.crossings.size() == 3);
    CHECK(b.crossings[1].lambda == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("morse_index examples")
{
    const MorseResult a = morse_index(prob_a());
    CHECK(a.index == -2);
    CHECK(a.indices == std::vector<int>{-2, -2, -2});
    REQUIRE(a.classical_morse_index.has_value());
    CHECK(*a.classical_morse_index == 2);

    PipelineParams small;
    small.galerkin_N = 8;
    CHECK(morse_index(prob_a(), small).galerkin_N == 8);

    const MorseResult c = morse_index(prob_c(std::pow(1.2 * beam_root(), 4)));
    CHECK(c.index == -1);
    CHECK(c.crossings.crossings.size() == 1);
    CHECK(c.crossings.crossings[0].lambda == doctest::Approx(1.0 / 1.2).epsilon(1e-6));

    const MorseResult b = morse_index(prob_b());
    CHECK(b.index == 1);
    CHECK_FALSE(b.classical_morse_index.has_value());
}

TEST_CASE("method agreement on random problems")
{
    std::mt19937_64 rng(11);
    int done = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const int m = 1 + trial % 2, n = 1 + trial % 3;
        const SturmProblem p = random_problem(rng, m, n, trial % (n + 1), 2, 5.0);
        try {
            const int by_inertia = spectral_flow_inertia(p, 16);
            CHECK(spectral_flow_crossings(p, 16).index == by_inertia);
            ++done;
        } catch (const EndpointDegeneracyError&) {
        }
    }
    CHECK(done >= 10);
}

TEST_CASE("delta_regularize")
{
    const SturmProblem z = delta_regularize(prob_0(), 1e-3);
    CHECK(std::abs(z.omega.at(0, 0)(0.3)(0, 0) - 1.5e-3) < 1e-15);
    CHECK(morse_index(z).index == 0);

    const SturmProblem same = delta_regularize(prob_b(), 0.0);
    CHECK(same.omega.at(0, 0)(0.5) == prob_b().omega.at(0, 0)(0.5));
    CHECK_THROWS_AS(delta_regularize(prob_0(), -1.0), DomainError);

    // c1 = c2: the two blocks cross simultaneously with opposite signs
    const double c = std::pow(2.5 * pi, 2);
    const SturmProblem deg = prob_b(c, c);
    const SpectralFlowCrossings joint = spectral_flow_crossings(deg, 16);
    CHECK(joint.index == 0);
    REQUIRE(joint.crossings.size() == 2);
    CHECK(joint.crossings[0].kernel_dim == 2);
    const SpectralFlowCrossings split = spectral_flow_crossings(delta_regularize(deg, 5e-4), 16);
    CHECK(split.index == 0);
    CHECK(split.crossings.size() == 4);
    for (const auto& r : split.crossings) CHECK(r.kernel_dim == 1);
}
