#include "sturmflow/commands.hpp"

#include <algorithm>
#include <future>
#include <random>
#include <thread>

#include "sturmflow/errors.hpp"
#include "sturmflow/problem_io.hpp"

namespace sturmflow {

namespace {

template <typename Result, typename Run>
std::pair<Result, std::optional<double>> regularized(const SturmProblem& problem, const PipelineParams& params,
                                                     Run&& run)
{
    validate(problem);
    if (params.delta) {
        const double d = *params.delta;
        return {run(delta_regularize(problem, d)), d > 0.0 ? std::optional<double>(d) : std::nullopt};
    }
    std::string last;
    try {
        return {run(problem), std::nullopt};
    } catch (const EndpointDegeneracyError& e) {
        last = e.what();
    } catch (const NonRegularCrossingError& e) {
        last = e.what();
    }
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> draw(1e-4, 1e-3);
    for (int attempt = 0; attempt < 5; ++attempt) {
        const double d = draw(rng);
        try {
            return {run(delta_regularize(problem, d)), d};
        } catch (const EndpointDegeneracyError& e) {
            last = e.what();
        } catch (const NonRegularCrossingError& e) {
            last = e.what();
        }
    }
    throw RegularizationError("regularization failed after 5 shifts (seed " + std::to_string(params.seed) +
                              "): " + last);
}

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : "null"; }
std::string optional_int(const std::optional<int>& v) { return v ? std::to_string(*v) : "null"; }

std::string conjugate_points_json(const ConjugatePoints& points)
{
    std::string s = "[";
    for (std::size_t k = 0; k < points.crossings.size(); ++k) {
        const auto& r = points.crossings[k];
        s += k ? ",\n    " : "\n    ";
        s += "{\"lambda\": " + format_real(r.lambda) + ", \"kernel_dim\": " + std::to_string(r.kernel_dim) +
             ", \"signature\": " + std::to_string(r.signature()) + "}";
    }
    s += points.crossings.empty() ? "]" : "\n  ]";
    return s;
}

std::string csv_field(std::string s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

VerifyReport run_verify(const SturmProblem& problem, const PipelineParams& params)
{
    auto [pair, delta] = regularized<std::pair<EmResult, MorseResult>>(problem, params, [&](const SturmProblem& p) {
        EmResult em = em_index_of_form(p, params);
        MorseResult morse = morse_index(p, params);
        return std::pair{std::move(em), std::move(morse)};
    });
    VerifyReport r;
    r.em = std::move(pair.first);
    r.morse = std::move(pair.second);
    r.delta = delta;
    r.seed = params.seed;
    return r;
}

EmReport run_em(const SturmProblem& problem, const PipelineParams& params)
{
    auto [em, delta] = regularized<EmResult>(problem, params,
                                             [&](const SturmProblem& p) { return em_index_of_form(p, params); });
    return {std::move(em), delta, params.seed};
}

MorseReport run_morse(const SturmProblem& problem, const PipelineParams& params)
{
    auto [morse, delta] = regularized<MorseResult>(problem, params,
                                                   [&](const SturmProblem& p) { return morse_index(p, params); });
    return {std::move(morse), delta, params.seed};
}

std::string format_verify_json(const VerifyReport& r)
{
    std::string s = "{\n";
    s += "  \"em_index\": " + std::to_string(r.em.index) + ",\n";
    s += "  \"morse_index\": " + std::to_string(r.morse.index) + ",\n";
    s += std::string("  \"agree\": ") + (r.agree() ? "true" : "false") + ",\n";
    s += "  \"convention\": \"crossing-sum\",\n";
    s += "  \"epsilon\": " + format_real(r.em.points.epsilon) + ",\n";
    s += "  \"galerkin_N\": " + std::to_string(r.morse.galerkin_N) + ",\n";
    s += "  \"delta\": " + optional_real(r.delta) + ",\n";
    s += "  \"seed\": " + std::to_string(r.seed) + ",\n";
    s += "  \"conjugate_points\": " + conjugate_points_json(r.em.points) + ",\n";
    s += "  \"classical_morse_index\": " + optional_int(r.morse.classical_morse_index) + "\n";
    s += "}\n";
    return s;
}

std::string format_em_json(const EmReport& r)
{
    std::string s = "{\n";
    s += "  \"em_index\": " + std::to_string(r.em.index) + ",\n";
    s += "  \"convention\": \"crossing-sum\",\n";
    s += "  \"epsilon\": " + format_real(r.em.points.epsilon) + ",\n";
    s += "  \"delta\": " + optional_real(r.delta) + ",\n";
    s += "  \"seed\": " + std::to_string(r.seed) + ",\n";
    s += "  \"conjugate_points\": " + conjugate_points_json(r.em.points) + "\n";
    s += "}\n";
    return s;
}

std::string format_morse_json(const MorseReport& r)
{
    std::string s = "{\n";
    s += "  \"morse_index\": " + std::to_string(r.morse.index) + ",\n";
    s += "  \"convention\": \"crossing-sum\",\n";
    s += "  \"galerkin_N\": " + std::to_string(r.morse.galerkin_N) + ",\n";
    s += "  \"indices\": [";
    for (std::size_t k = 0; k < r.morse.indices.size(); ++k)
        s += (k ? ", " : "") + std::to_string(r.morse.indices[k]);
    s += "],\n";
    s += "  \"delta\": " + optional_real(r.delta) + ",\n";
    s += "  \"seed\": " + std::to_string(r.seed) + ",\n";
    s += "  \"classical_morse_index\": " + optional_int(r.morse.classical_morse_index) + "\n";
    s += "}\n";
    return s;
}

std::string format_conjugate_points_csv(const ConjugatePoints& points)
{
    std::string s = "lambda,kernel_dim,signature\n";
    for (const auto& r : points.crossings)
        s += format_real(r.lambda) + "," + std::to_string(r.kernel_dim) + "," + std::to_string(r.signature()) + "\n";
    return s;
}

std::vector<SweepRow> run_sweep(const std::string& config_text, const std::string& path, double from,
                                double to, int steps, const PipelineParams& params)
{
    if (steps < 0) throw DomainError("steps must be >= 0");
    std::vector<double> values;
    for (int k = 0; k < steps; ++k)
        values.push_back(steps == 1 ? from : from + (to - from) * k / (steps - 1));
    // malformed paths are reported once, before any work
    std::vector<std::string> configs;
    for (double v : values) configs.push_back(set_config_number(config_text, path, v));
    std::vector<SturmProblem> problems;
    for (const auto& c : configs) problems.push_back(parse_problem(c));

    const auto sample = [&](std::size_t k) {
        SweepRow row;
        row.param = values[k];
        try {
            const VerifyReport r = run_verify(problems[k], params);
            row.em_index = r.em.index;
            row.morse_index = r.morse.index;
            row.delta = r.delta;
            row.status = r.agree() ? "agree" : "disagree";
        } catch (const Error& e) {
            row.status = std::string("error: ") + e.what();
        }
        return row;
    };
    std::vector<SweepRow> rows;
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < values.size(); start += width) {
        std::vector<std::future<SweepRow>> batch;
        for (std::size_t k = start; k < std::min(values.size(), start + width); ++k)
            batch.push_back(std::async(std::launch::async, sample, k));
        for (auto& f : batch) rows.push_back(f.get());
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });
    return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows)
{
    std::string s = "param,em_index,morse_index,delta,status\n";
    for (const auto& r : rows) {
        s += format_real(r.param) + ",";
        s += (r.em_index ? std::to_string(*r.em_index) : "") + ",";
        s += (r.morse_index ? std::to_string(*r.morse_index) : "") + ",";
        s += (r.delta ? format_real(*r.delta) : "") + ",";
        s += csv_field(r.status) + "\n";
    }
    return s;
}

}  // namespace sturmflow
