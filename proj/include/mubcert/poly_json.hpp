#pragma once

#include <json.hpp>

#include "mubcert/polynomial.hpp"

namespace mubcert {

using json = nlohmann::json;

/// {"nvars": n, "terms": [{"num": "...", "den": "...", "exps": [...]}, ...]}
/// with terms in descending degree-lex order and integers as decimal strings.
json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const json& j);

}  // namespace mubcert
