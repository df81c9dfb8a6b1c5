#include "sturmflow/axioms.hpp"

#include <cstdio>
#include <random>

#include "sturmflow/errors.hpp"
#include "sturmflow/superlag.hpp"

namespace sturmflow {

namespace {

using MatrixPath = std::function<CMatrix(double)>;

CMatrix diag(const std::vector<double>& d)
{
    CMatrix m = CMatrix::Zero(d.size(), d.size());
    for (std::size_t k = 0; k < d.size(); ++k) m(k, k) = d[k];
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

CMatrix random_hermitian(std::mt19937_64& rng, int n, double norm)
{
    std::normal_distribution<double> g;
    CMatrix a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = Complex(g(rng), g(rng));
    CMatrix h = 0.5 * (a + a.adjoint());
    const double s = Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .cwiseAbs()
                         .maxCoeff();
    return h * (norm / std::max(s, 1e-300));
}

class Battery {
public:
    explicit Battery(const AxiomOptions& o) : opt_(o) {}

    int index(const MatrixPath& h, int n, double a, double b)
    {
        EmIndexOptions eo;
        eo.seed = opt_.seed;
        eo.negate_crossing_forms = opt_.negate_crossing_forms;
        eo.grid = 256;
        return em_index(graph_path(h, n, a, b), base_plane(n), {}, eo).index;
    }

    void check(const std::string& name, const std::function<std::pair<int, int>()>& run)
    {
        AxiomCheck c;
        c.name = name;
        try {
            const auto [got, expected] = run();
            c.passed = got == expected;
            c.detail = "index " + std::to_string(got) + ", expected " + std::to_string(expected);
        } catch (const std::exception& e) {
            c.passed = false;
            c.detail = std::string("error: ") + e.what();
        }
        out_.push_back(std::move(c));
    }

    // Half the signature jump across [t0 - eps, t0 + eps].
    static int half_jump(const MatrixPath& h, double t0, double eps)
    {
        const int hi = inertia(HermMatrix::hermitian_part(h(t0 + eps))).signature();
        const int lo = inertia(HermMatrix::hermitian_part(h(t0 - eps))).signature();
        return (hi - lo) / 2;
    }

    std::vector<AxiomCheck> run()
    {
        std::mt19937_64 rng(opt_.seed);

        const std::vector<std::pair<std::string, MatrixPath>> simple = {
            {"t", [](double t) { return diag({t}); }},
            {"-t", [](double t) { return diag({-t}); }},
            {"diag(t, 1)", [](double t) { return diag({t, 1.0}); }},
            {"diag(t, -t, 2)", [](double t) { return diag({t, -t, 2.0}); }},
            {"diag(2t, t, -1)", [](double t) { return diag({2 * t, t, -1.0}); }},
        };
        for (const auto& [label, h] : simple) {
            const int n = static_cast<int>(h(0.0).rows());
            check("localization " + label, [&, n] {
                return std::pair{index(h, n, -1.0, 1.0), half_jump(h, 0.0, 1.0)};
            });
        }
        for (int k = 0; k < 6; ++k) {
            const int n = 1 + k % 3;
            const CMatrix u = random_unitary(rng, n);
            std::uniform_real_distribution<double> slope(0.5, 2.0), sign(-1.0, 1.0);
            std::vector<double> d(n);
            for (int j = 0; j < n; ++j) d[j] = (sign(rng) < 0 ? -1.0 : 1.0) * slope(rng);
            const int kernel = 1 + k % n;
            const MatrixPath h = [u, d, kernel](double t) {
                std::vector<double> e(d.size());
                for (std::size_t j = 0; j < d.size(); ++j)
                    e[j] = static_cast<int>(j) < kernel ? d[j] * t : d[j];
                return (u * diag(e) * u.adjoint()).eval();
            };
            check("localization random #" + std::to_string(k) + " (seed " +
                      std::to_string(opt_.seed) + ")",
                  [&, n] { return std::pair{index(h, n, -1.0, 1.0), half_jump(h, 0.0, 1.0)}; });
        }

        const MatrixPath several = [](double t) {
            return diag({t * (t - 0.6), -(t + 0.5), t - 0.1});
        };
        for (double s : {0.25, 0.5, 0.75}) {
            char name[64];
            std::snprintf(name, sizeof name, "catenation at %.2f", s);
            check(name, [&, s] {
                return std::pair{index(several, 3, -1.0, s) + index(several, 3, s, 1.0),
                                 index(several, 3, -1.0, 1.0)};
            });
        }

        for (int k = 0; k < 4; ++k) {
            const int n = 1 + k % 3;
            const CMatrix kk = random_hermitian(rng, n, 1.0);
            const MatrixPath base = [n](double t) { return (t * CMatrix::Identity(n, n)).eval(); };
            const MatrixPath bent = [n, kk](double t) {
                return (t * CMatrix::Identity(n, n) + 0.1 * t * (1 - t * t) * kk).eval();
            };
            check("homotopy #" + std::to_string(k) + " (seed " + std::to_string(opt_.seed) + ")",
                  [&, n] { return std::pair{index(bent, n, -1.0, 1.0), index(base, n, -1.0, 1.0)}; });
        }
        return std::move(out_);
    }

private:
    AxiomOptions opt_;
    std::vector<AxiomCheck> out_;
};

}  // namespace

std::vector<AxiomCheck> run_axiom_battery(const AxiomOptions& options)
{
    return Battery(options).run();
}

}  // namespace sturmflow
