#pragma once

#include <string>

#include "sturmflow/sturm_form.hpp"

namespace sturmflow {

/// Parses a problem document
///   {"m": 1, "n": 1, "nu": 0,
///    "omega": [{"i": 0, "j": 0, "terms": [{"power": 0, "re": [[-1]], "im": [[0]]}]}]}
/// Only pairs with i <= j are listed; (j, i) mirrors (i, j). "im" may be omitted.
/// Throws ParseError on malformed documents and ValidationError on invalid problems.
SturmProblem parse_problem(const std::string& text);

/// Reads and parses a file; unreadable files raise ParseError.
SturmProblem load_problem(const std::string& path);
std::string read_text_file(const std::string& path);

/// Serializes a problem in the same format (reals with 17 significant digits).
std::string problem_to_json(const SturmProblem& problem);

/// Replaces the number at a dotted path such as "omega.0.terms.0.re.0.0".
/// Throws ParseError when the path does not address a number.
std::string set_config_number(const std::string& text, const std::string& path, double value);

/// %.17g
std::string format_real(double v);

}  // namespace sturmflow
