#include "mubcert/poly_json.hpp"

#include "mubcert/errors.hpp"

namespace mubcert {

json to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& t : p.terms()) {
    terms.push_back({{"num", t.coeff.get_num().get_str()},
                     {"den", t.coeff.get_den().get_str()},
                     {"exps", t.mono.exponents()}});
  }
  return {{"nvars", p.nvars()}, {"terms", std::move(terms)}};
}

Polynomial polynomial_from_json(const json& j) {
  try {
    const auto nvars = j.at("nvars").get<std::size_t>();
    std::vector<Term> terms;
    for (const auto& t : j.at("terms")) {
      auto exps = t.at("exps").get<std::vector<Exponent>>();
      if (exps.size() != nvars) throw ParseError("term exponent vector has wrong length");
      const auto& num = t.at("num");
      const auto& den = t.contains("den") ? t.at("den") : json("1");
      auto as_str = [](const json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
      };
      terms.push_back({Monomial(std::move(exps)), make_rational(as_str(num), as_str(den))});
    }
    return Polynomial(nvars, std::move(terms));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed polynomial JSON: ") + e.what());
  }
}

}  // namespace mubcert
