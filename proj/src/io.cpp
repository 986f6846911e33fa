#include "mubcert/io.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "mubcert/errors.hpp"

namespace mubcert {

json to_json(const PolySystem& sys) {
  json cons = json::array();
  for (const auto& p : sys.constraints) cons.push_back(to_json(p));
  return {{"spec", sys.spec},
          {"nvars", sys.nvars},
          {"vars", sys.vars},
          {"constraints", std::move(cons)},
          {"objective", sys.objective ? to_json(*sys.objective) : json(nullptr)},
          {"provenance", sys.provenance}};
}

PolySystem system_from_json(const json& j) {
  try {
    PolySystem sys;
    sys.nvars = j.at("nvars").get<std::size_t>();
    if (j.contains("vars")) {
      sys.vars = j.at("vars").get<std::vector<std::string>>();
    } else {
      for (std::size_t i = 0; i < sys.nvars; ++i) sys.vars.push_back("x" + std::to_string(i + 1));
    }
    if (j.contains("spec") && j.at("spec").is_string()) sys.spec = j.at("spec").get<std::string>();
    if (j.contains("provenance") && j.at("provenance").is_string())
      sys.provenance = j.at("provenance").get<std::string>();
    for (const auto& p : j.at("constraints")) sys.constraints.push_back(polynomial_from_json(p));
    if (j.contains("objective") && !j.at("objective").is_null())
      sys.objective = polynomial_from_json(j.at("objective"));
    sys.validate();
    return sys;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed system JSON: ") + e.what());
  }
}

json to_json(const Certificate& cert, const PolySystem& sys) {
  json cof = json::array();
  for (const auto& r : cert.cofactors) cof.push_back(to_json(r));
  return {{"spec", sys.spec}, {"nvars", sys.nvars}, {"vars", sys.vars}, {"cofactors", std::move(cof)},
          {"degree", cert.degree}};
}

Certificate certificate_from_json(const json& j) {
  try {
    Certificate c;
    const auto nvars = j.at("nvars").get<std::size_t>();
    for (const auto& r : j.at("cofactors")) {
      c.cofactors.push_back(polynomial_from_json(r));
      if (c.cofactors.back().nvars() != nvars) throw ParseError("cofactor nvars mismatch");
    }
    c.degree = j.value("degree", 0u);
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed certificate JSON: ") + e.what());
  }
}

json to_json(const PermutationGroup& g) { return {{"degree", g.degree}, {"generators", g.generators}}; }

PermutationGroup group_from_json(const json& j) {
  try {
    PermutationGroup g;
    g.degree = j.at("degree").get<std::size_t>();
    g.generators = j.at("generators").get<std::vector<std::vector<std::uint32_t>>>();
    g.validate();
    return g;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed group JSON: ") + e.what());
  }
}

json bases_to_json(const std::vector<Basis>& bases) {
  json out = json::array();
  for (const auto& b : bases) {
    json jb = json::array();
    for (const auto& ket : b) {
      json jk = json::array();
      for (Eigen::Index i = 0; i < ket.size(); ++i) jk.push_back({ket(i).real(), ket(i).imag()});
      jb.push_back(std::move(jk));
    }
    out.push_back(std::move(jb));
  }
  return {{"bases", std::move(out)}};
}

std::vector<Basis> bases_from_json(const json& j) {
  try {
    const json& list = j.is_array() ? j : j.at("bases");
    std::vector<Basis> out;
    for (const auto& jb : list) {
      Basis b;
      for (const auto& jk : jb) {
        Ket ket(static_cast<Eigen::Index>(jk.size()));
        for (std::size_t i = 0; i < jk.size(); ++i) {
          const auto& z = jk.at(i);
          if (z.is_number()) {
            ket(static_cast<Eigen::Index>(i)) = z.get<double>();
          } else {
            if (z.size() != 2) throw ParseError("complex entries must be [re, im] pairs");
            ket(static_cast<Eigen::Index>(i)) = {z.at(0).get<double>(), z.at(1).get<double>()};
          }
        }
        b.push_back(std::move(ket));
      }
      out.push_back(std::move(b));
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed bases JSON: ") + e.what());
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(f), {});
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path + "' failed");
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return ss.str();
}

}  // namespace mubcert
