#include "sturmflow/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sturmflow/errors.hpp"

namespace sturmflow {

namespace {

using nlohmann::json;

const json& member(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object()) throw ParseError(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + " is missing \"" + key + "\"");
    return *it;
}

int integer(const json& v, const std::string& where)
{
    if (!v.is_number_integer()) throw ParseError(where + " must be an integer");
    return v.get<int>();
}

Eigen::MatrixXd real_matrix(const json& v, int n, const std::string& where)
{
    if (!v.is_array() || static_cast<int>(v.size()) != n)
        throw ParseError(where + " must be an array of " + std::to_string(n) + " rows");
    Eigen::MatrixXd out(n, n);
    for (int r = 0; r < n; ++r) {
        const json& row = v[r];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ParseError(where + " row " + std::to_string(r) + " must have " + std::to_string(n) +
                             " entries");
        for (int c = 0; c < n; ++c) {
            if (!row[c].is_number())
                throw ParseError(where + "[" + std::to_string(r) + "][" + std::to_string(c) +
                                 "] is not a number");
            out(r, c) = row[c].get<double>();
            if (!std::isfinite(out(r, c)))
                throw ParseError(where + "[" + std::to_string(r) + "][" + std::to_string(c) +
                                 "] is not finite");
        }
    }
    return out;
}

void write_matrix(std::string& s, const Eigen::MatrixXd& m)
{
    s += "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        s += r ? ", [" : "[";
        for (Eigen::Index c = 0; c < m.cols(); ++c) s += (c ? ", " : "") + format_real(m(r, c));
        s += "]";
    }
    s += "]";
}

}  // namespace

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SturmProblem parse_problem(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    const int m = integer(member(doc, "m", "config"), "m");
    const int n = integer(member(doc, "n", "config"), "n");
    const int nu = integer(member(doc, "nu", "config"), "nu");
    if (m < 1 || n < 1 || nu < 0 || nu > n) {
        SturmProblem shape;
        shape.m = m;
        shape.n = n;
        shape.nu = nu;
        throw ValidationError(diagnose(shape));
    }
    SturmProblem p(m, n, nu);
    const json& omega = member(doc, "omega", "config");
    if (!omega.is_array()) throw ParseError("omega must be an array");
    std::set<std::pair<int, int>> seen;
    for (std::size_t e = 0; e < omega.size(); ++e) {
        const std::string where = "omega[" + std::to_string(e) + "]";
        const json& entry = omega[e];
        const int i = integer(member(entry, "i", where), where + ".i");
        const int j = integer(member(entry, "j", where), where + ".j");
        if (i < 0 || j < 0 || i > m || j > m)
            throw ParseError(where + " index (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") outside 0.." + std::to_string(m));
        if (i > j)
            throw ParseError(where + " lists (" + std::to_string(i) + ", " + std::to_string(j) +
                             "); only pairs with i <= j are allowed");
        if (!seen.insert({i, j}).second)
            throw ParseError(where + " repeats the pair (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
        const json& terms = member(entry, "terms", where);
        if (!terms.is_array()) throw ParseError(where + ".terms must be an array");
        MatrixPolynomial w = MatrixPolynomial::zero(n);
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const std::string tw = where + ".terms[" + std::to_string(t) + "]";
            const int power = integer(member(terms[t], "power", tw), tw + ".power");
            if (power < 0) throw ParseError(tw + ".power must be >= 0");
            CMatrix c = real_matrix(member(terms[t], "re", tw), n, tw + ".re").cast<Complex>();
            if (terms[t].contains("im"))
                c += Complex(0.0, 1.0) * real_matrix(terms[t]["im"], n, tw + ".im").cast<Complex>();
            w.add_term(power, c);
        }
        p.omega.at(i, j) = w;
        if (i != j) p.omega.at(j, i) = w;
    }
    validate(p);
    return p;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SturmProblem load_problem(const std::string& path) { return parse_problem(read_text_file(path)); }

std::string problem_to_json(const SturmProblem& problem)
{
    std::string s = "{\"m\": " + std::to_string(problem.m) + ", \"n\": " + std::to_string(problem.n) +
                    ", \"nu\": " + std::to_string(problem.nu) + ", \"omega\": [";
    bool first = true;
    for (int i = 0; i <= problem.m; ++i)
        for (int j = i; j <= problem.m; ++j) {
            const auto& w = problem.omega.at(i, j);
            if (w.is_zero()) continue;
            s += first ? "" : ", ";
            first = false;
            s += "{\"i\": " + std::to_string(i) + ", \"j\": " + std::to_string(j) + ", \"terms\": [";
            for (int p = 0; p <= w.degree(); ++p) {
                const CMatrix c = w.coefficient(p);
                s += p ? ", " : "";
                s += "{\"power\": " + std::to_string(p) + ", \"re\": ";
                write_matrix(s, c.real());
                s += ", \"im\": ";
                write_matrix(s, c.imag());
                s += "}";
            }
            s += "]}";
        }
    s += "]}\n";
    return s;
}

std::string set_config_number(const std::string& text, const std::string& path, double value)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    json* node = &doc;
    std::stringstream ss(path);
    std::string key;
    while (std::getline(ss, key, '.')) {
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoul(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ParseError("parameter path " + path + ": \"" + key + "\" is not an index");
            }
            if (idx >= node->size()) throw ParseError("parameter path " + path + ": index " + key + " out of range");
            node = &(*node)[idx];
        } else if (node->is_object()) {
            if (!node->contains(key)) throw ParseError("parameter path " + path + ": no member \"" + key + "\"");
            node = &(*node)[key];
        } else {
            throw ParseError("parameter path " + path + " descends into a scalar");
        }
    }
    if (!node->is_number()) throw ParseError("parameter path " + path + " does not address a number");
    *node = value;
    return doc.dump();
}

}  // namespace sturmflow
