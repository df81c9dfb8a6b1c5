#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sturmflow/axioms.hpp"
#include "sturmflow/commands.hpp"
#include "sturmflow/errors.hpp"
#include "sturmflow/oracle.hpp"
#include "sturmflow/problem_io.hpp"

using namespace sturmflow;

namespace {

enum Exit { kAgree = 0, kDisagree = 1, kInput = 2, kPipeline = 3 };

struct Flags {
    std::string config;
    std::optional<int> galerkin;
    std::optional<double> epsilon, delta, tol, integ_tol;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string param;
    double from = 0.0, to = 0.0;
    int steps = 0;
};

void add_common(CLI::App* cmd, Flags& f, bool config = true)
{
    if (config) cmd->add_option("config", f.config, "problem description (JSON)")->required();
    cmd->add_option("--galerkin", f.galerkin, "starting Galerkin size N");
    cmd->add_option("--epsilon", f.epsilon, "fixed start of the EM path");
    cmd->add_option("--delta", f.delta, "zero-order regularization shift");
    cmd->add_option("--seed", f.seed, "seed for every random choice (default $STURMFLOW_SEED or 0)");
    cmd->add_option("--tol", f.tol, "relative rank tolerance");
    cmd->add_option("--integ-tol", f.integ_tol, "relative integration tolerance");
    cmd->add_option("--out", f.out, "write the report here instead of standard output");
}

std::uint64_t default_seed()
{
    const char* env = std::getenv("STURMFLOW_SEED");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw ParseError(std::string("STURMFLOW_SEED is not an unsigned integer: ") + env);
    return v;
}

PipelineParams params_from(const Flags& f)
{
    PipelineParams p;
    if (f.tol) p.tol.rank_rel_tol = *f.tol;
    if (f.integ_tol) p.tol.integ_rel_tol = *f.integ_tol;
    p.tol.validate();
    if (f.galerkin) {
        if (*f.galerkin < 2 || *f.galerkin > 256) throw DomainError("--galerkin must lie in 2..256");
        p.galerkin_N = *f.galerkin;
    }
    if (f.epsilon) {
        if (!(*f.epsilon > 0.0 && *f.epsilon < 1.0)) throw DomainError("--epsilon must lie in (0, 1)");
        p.epsilon = f.epsilon;
    }
    if (f.delta) {
        if (!(*f.delta >= 0.0)) throw DomainError("--delta must be >= 0");
        p.delta = f.delta;
    }
    p.seed = f.seed ? *f.seed : default_seed();
    return p;
}

void emit(const Flags& f, const std::string& text)
{
    if (f.out.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(f.out, std::ios::binary);
    if (!out) throw ParseError("cannot write " + f.out);
    out << text;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Index computations for generalized Sturm forms"};
    app.require_subcommand(1);
    Flags f;
    auto* verify = app.add_subcommand("verify", "run both pipelines and compare the indices");
    auto* points = app.add_subcommand("conjugate-points", "conjugate instants as CSV");
    auto* em = app.add_subcommand("em-index", "index of the solution-space path");
    auto* morse = app.add_subcommand("morse-index", "Galerkin spectral flow");
    auto* axioms = app.add_subcommand("axioms", "run the index axiom battery");
    auto* oracle = app.add_subcommand("oracle", "zero count of the classical scalar problem");
    auto* sweep = app.add_subcommand("sweep", "verify over a range of one coefficient entry");
    for (auto* c : {verify, points, em, morse, oracle, sweep}) add_common(c, f);
    add_common(axioms, f, false);
    sweep->add_option("--param", f.param, "dotted path to a number, e.g. omega.0.terms.0.re.0.0")->required();
    sweep->add_option("--from", f.from, "first value")->required();
    sweep->add_option("--to", f.to, "last value")->required();
    sweep->add_option("--steps", f.steps, "number of samples")->required()->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInput;
    }

    try {
        const PipelineParams params = params_from(f);
        if (axioms->parsed()) {
            AxiomOptions opt;
            opt.seed = params.seed;
            std::string text;
            int failed = 0;
            for (const auto& c : run_axiom_battery(opt)) {
                text += (c.passed ? "PASS " : "FAIL ") + c.name + "  " + c.detail + "\n";
                failed += !c.passed;
            }
            text += failed ? std::to_string(failed) + " check(s) failed\n" : "all checks passed\n";
            emit(f, text);
            return failed ? kDisagree : kAgree;
        }
        if (sweep->parsed()) {
            const auto rows = run_sweep(read_text_file(f.config), f.param, f.from, f.to, f.steps, params);
            emit(f, format_sweep_csv(rows));
            int code = kAgree;
            for (const auto& r : rows) {
                if (r.status == "disagree") code = std::max<int>(code, kDisagree);
                if (r.status.rfind("error", 0) == 0) code = kPipeline;
            }
            return code;
        }
        const SturmProblem problem = load_problem(f.config);
        if (oracle->parsed()) {
            if (problem.m != 1 || problem.n != 1 || problem.nu != 0)
                throw DomainError("oracle needs a classical scalar problem (m = 1, n = 1, nu = 0)");
            emit(f, std::to_string(oracle_zero_count(problem, params.tol)) + "\n");
            return kAgree;
        }
        if (points->parsed()) {
            emit(f, format_conjugate_points_csv(run_em(problem, params).em.points));
            return kAgree;
        }
        if (em->parsed()) {
            emit(f, format_em_json(run_em(problem, params)));
            return kAgree;
        }
        if (morse->parsed()) {
            emit(f, format_morse_json(run_morse(problem, params)));
            return kAgree;
        }
        const VerifyReport r = run_verify(problem, params);
        emit(f, format_verify_json(r));
        return r.agree() ? kAgree : kDisagree;
    } catch (const ValidationError& e) {
        std::cerr << "sturmflow: " << e.what() << "\n";
        return kInput;
    } catch (const ParseError& e) {
        std::cerr << "sturmflow: " << e.what() << "\n";
        return kInput;
    } catch (const DomainError& e) {
        std::cerr << "sturmflow: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "sturmflow: " << e.what() << "\n";
        return kPipeline;
    }
}
