#include "sturmflow/morse_pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "sturmflow/errors.hpp"
#include "sturmflow/locator.hpp"
#include "sturmflow/quadrature.hpp"

namespace sturmflow {

namespace {

double binomial(int n, int k)
{
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Basis derivatives at the quadrature nodes, reused for every lambda.
class Assembler {
public:
    Assembler(const SturmProblem& problem, int count)
        : basis_(problem.m, problem.n, count),
          rule_(gauss_legendre_for_degree(2 * basis_.degree() + problem.omega.max_degree()))
    {
        const int m = problem.m;
        const auto q = static_cast<Eigen::Index>(rule_.nodes.size());
        d_.assign(m + 1, Eigen::MatrixXd(q, count));
        for (Eigen::Index k = 0; k < q; ++k) {
            const Eigen::MatrixXd d = basis_.derivatives(rule_.nodes[k], m);
            for (int i = 0; i <= m; ++i) d_[i].row(k) = d.row(i);
        }
    }

    HermMatrix operator()(const FormCoefficients& w) const
    {
        const int m = basis_.m(), n = basis_.n(), count = basis_.count();
        const auto q = static_cast<Eigen::Index>(rule_.nodes.size());
        CMatrix g = CMatrix::Zero(basis_.size(), basis_.size());
        std::vector<CMatrix> values(q);
        Eigen::VectorXcd weight(q);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) {
                const auto& wij = w.at(i, j);
                if (wij.is_zero()) continue;
                for (Eigen::Index k = 0; k < q; ++k) values[k] = rule_.weights[k] * wij(rule_.nodes[k]);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        for (Eigen::Index k = 0; k < q; ++k) weight(k) = values[k](a, b);
                        if (weight.cwiseAbs().maxCoeff() == 0.0) continue;
                        const CMatrix block = d_[i].transpose().cast<Complex>() * weight.asDiagonal() *
                                              d_[j].cast<Complex>();
                        for (int k = 0; k < count; ++k)
                            for (int l = 0; l < count; ++l) g(k * n + a, l * n + b) += block(k, l);
                    }
            }
        return HermMatrix::hermitian_part(g);
    }

private:
    GalerkinBasis basis_;
    QuadratureRule rule_;
    std::vector<Eigen::MatrixXd> d_;  // d_[i](node, k) = D^i phi_k
};

std::string fmt_lambda(const char* pattern, double v)
{
    char buf[200];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

GalerkinBasis::GalerkinBasis(int m, int n, int count) : m_(m), n_(n), count_(count)
{
    if (m < 1 || n < 1) throw DomainError("Galerkin basis needs m, n >= 1");
    if (count < m + 1) {
        throw DomainError("Galerkin basis needs N >= m + 1, got " + std::to_string(count));
    }
    scale_ = Eigen::VectorXd::Ones(count);
    const QuadratureRule q = gauss_legendre_for_degree(2 * degree());
    Eigen::VectorXd norm2 = Eigen::VectorXd::Zero(count);
    for (std::size_t k = 0; k < q.nodes.size(); ++k)
        norm2 += q.weights[k] * raw(q.nodes[k], m).row(m).transpose().cwiseAbs2();
    scale_ = norm2.cwiseSqrt().cwiseInverse();
}

Eigen::MatrixXd GalerkinBasis::raw(double x, int order) const
{
    const double t = 2.0 * x - 1.0;
    // p(e, k) = e-th derivative of L_k at t
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(order + 1, count_);
    for (int k = 0; k < count_; ++k) {
        if (k == 0)
            p(0, 0) = 1.0;
        else if (k == 1)
            p(0, 1) = t;
        else
            p(0, k) = ((2 * k - 1) * t * p(0, k - 1) - (k - 1) * p(0, k - 2)) / k;
    }
    for (int e = 1; e <= order; ++e) {
        if (count_ > 1 && e == 1) p(1, 1) = 1.0;
        for (int k = 1; k + 1 < count_; ++k) p(e, k + 1) = p(e, k - 1) + (2 * k + 1) * p(e - 1, k);
    }
    // derivatives of the bubble x^m (1-x)^m
    Eigen::VectorXd bubble = Eigen::VectorXd::Zero(2 * m_ + 1);
    for (int j = 0; j <= m_; ++j) bubble(m_ + j) = binomial(m_, j) * ((j % 2) ? -1.0 : 1.0);
    Eigen::VectorXd w(order + 1);
    for (int d = 0; d <= order; ++d) {
        double v = 0.0;
        for (int pw = d; pw <= 2 * m_; ++pw) {
            double fall = 1.0;
            for (int r = 0; r < d; ++r) fall *= pw - r;
            v += fall * bubble(pw) * std::pow(x, pw - d);
        }
        w(d) = v;
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(order + 1, count_);
    for (int d = 0; d <= order; ++d)
        for (int j = 0; j <= d; ++j)
            out.row(d) += binomial(d, j) * w(j) * std::pow(2.0, d - j) * p.row(d - j);
    return out;
}

Eigen::MatrixXd GalerkinBasis::derivatives(double x, int order) const
{
    return raw(x, order) * scale_.asDiagonal();
}

HermMatrix gram(const SturmProblem& problem, double lambda, int count)
{
    return Assembler(problem, count)(rescale(problem, lambda).omega);
}

HermMatrix gram_derivative(const SturmProblem& problem, double lambda, int count)
{
    return Assembler(problem, count)(rescale_derivative(problem, lambda));
}

int spectral_flow_inertia(const SturmProblem& problem, int count, const TolerancePolicy& tol)
{
    const Assembler assemble(problem, count);
    const Inertia start = inertia(assemble(rescale(problem, 0.0).omega), tol);
    const Inertia end = inertia(assemble(rescale(problem, 1.0).omega), tol);
    if (!start.nondegenerate()) throw EndpointDegeneracyError("discrete form is degenerate at lambda = 0");
    if (!end.nondegenerate()) throw EndpointDegeneracyError("discrete form is degenerate at lambda = 1");
    return start.n_minus - end.n_minus;
}

SpectralFlowCrossings spectral_flow_crossings(const SturmProblem& problem, int count,
                                              const PipelineParams& params)
{
    const TolerancePolicy& tol = params.tol;
    const Assembler assemble(problem, count);
    std::map<double, RVector> spectra;
    const auto spectrum = [&](double t) -> const RVector& {
        auto it = spectra.find(t);
        if (it == spectra.end()) {
            const HermMatrix g = assemble(rescale(problem, t).omega);
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(g.matrix(), Eigen::EigenvaluesOnly);
            it = spectra.emplace(t, solver.eigenvalues()).first;
        }
        return it->second;
    };
    const auto n_minus = [&](double t) {
        const RVector& mu = spectrum(t);
        const double thr = zero_threshold(mu, tol);
        return static_cast<int>((mu.array() <= -thr).count());
    };
    const auto relative_gap = [&](double t) {
        const RVector& mu = spectrum(t);
        return mu.cwiseAbs().minCoeff() / std::max(1.0, mu.cwiseAbs().maxCoeff());
    };
    // fails early on degenerate endpoints
    spectral_flow_inertia(problem, count, tol);

    std::map<double, CrossingRecord> records;
    std::vector<double> irregular;
    LocatorHooks hooks;
    hooks.indicator = relative_gap;
    hooks.net_count = [&](double lo, double hi) { return n_minus(lo) - n_minus(hi); };
    hooks.ambiguous = [&](double t) { return relative_gap(t) < 1e3 * tol.rank_rel_tol; };
    hooks.signature = [&](double t) {
        const CMatrix k = kernel_basis(assemble(rescale(problem, t).omega), tol);
        CrossingRecord r;
        r.lambda = t;
        r.kernel_dim = static_cast<int>(k.cols());
        r.form = restrict_form(assemble(rescale_derivative(problem, t)), k, tol);
        r.inertia = inertia(r.form, tol);
        r.regular = r.kernel_dim > 0 && r.inertia.nondegenerate();
        if (!r.regular) irregular.push_back(t);
        records[t] = r;
        return r.signature();
    };
    LocatorOptions lo;
    lo.grid = params.grid;
    lo.threshold = tol.rank_rel_tol;
    std::vector<double> zeros;
    try {
        zeros = locate_crossings(hooks, 0.0, 1.0, lo);
    } catch (const InconsistencyError&) {
        if (irregular.empty()) throw;
    }
    if (!irregular.empty()) {
        std::string msg = "non-regular discrete crossing at lambda =";
        for (double t : irregular) msg += fmt_lambda(" %.17g", t);
        throw NonRegularCrossingError(msg, irregular);
    }
    SpectralFlowCrossings out;
    for (double t : zeros) {
        out.crossings.push_back(records.at(t));
        out.index += records.at(t).signature();
    }
    return out;
}

MorseResult morse_index(const SturmProblem& problem, const PipelineParams& params)
{
    validate(problem);
    params.tol.validate();
    const int first = std::max(params.galerkin_N, problem.m + 1);
    const int last = std::max(32, first + 8);
    std::map<int, int> sf;
    const auto at = [&](int count) {
        auto it = sf.find(count);
        if (it == sf.end()) it = sf.emplace(count, spectral_flow_inertia(problem, count, params.tol)).first;
        return it->second;
    };
    for (int n0 = first; n0 + 8 <= last; n0 += 4) {
        const int a = at(n0), b = at(n0 + 4), c = at(n0 + 8);
        if (a != b || b != c) continue;
        MorseResult out;
        out.index = a;
        out.galerkin_N = n0;
        out.indices = {a, b, c};
        out.crossings = spectral_flow_crossings(problem, n0 + 8, params);
        if (out.crossings.index != a) {
            throw InconsistencyError("discrete crossing sum " + std::to_string(out.crossings.index) +
                                     " differs from the inertia index " + std::to_string(a) +
                                     " at N = " + std::to_string(n0 + 8));
        }
        if (problem.nu == 0) out.classical_morse_index = inertia(gram(problem, 1.0, n0), params.tol).n_minus;
        return out;
    }
    std::string msg = "Galerkin index did not stabilize:";
    for (const auto& [count, v] : sf) msg += " N=" + std::to_string(count) + ":" + std::to_string(v);
    throw ConvergenceError(msg);
}

SturmProblem delta_regularize(const SturmProblem& problem, double delta)
{
    if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
    SturmProblem out = problem;
    if (delta == 0.0) return out;
    MatrixPolynomial shift = MatrixPolynomial::constant(1.5 * delta * CMatrix::Identity(problem.n, problem.n));
    out.omega.at(0, 0) += shift;
    return out;
}

}  // namespace sturmflow
