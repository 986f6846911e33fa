#pragma once

#include <string>
#include <vector>

#include "mubcert/consys.hpp"
#include "mubcert/nulla.hpp"
#include "mubcert/poly_json.hpp"

namespace mubcert {

/// {"spec", "nvars", "vars", "constraints": [...], "objective": Polynomial|null, "provenance"}
json to_json(const PolySystem& sys);
PolySystem system_from_json(const json& j);

/// The system encoding with "cofactors" in place of "constraints", plus "degree".
json to_json(const Certificate& cert, const PolySystem& sys);
Certificate certificate_from_json(const json& j);

/// {"degree": n, "generators": [[...], ...]} with 0-based images.
json to_json(const PermutationGroup& g);
PermutationGroup group_from_json(const json& j);

/// {"bases": [[ket, ...], ...]}, each ket a list of [re, im] pairs. A bare
/// top-level list of bases is accepted too.
json bases_to_json(const std::vector<Basis>& bases);
std::vector<Basis> bases_from_json(const json& j);

/// Reads a whole file; "-" means standard input.
std::string read_input(const std::string& path);
/// Writes a whole file; "-" means standard output.
void write_output(const std::string& path, const std::string& text);
json parse_json_text(const std::string& text, const std::string& origin);

std::string sha256_hex(const std::string& data);

}  // namespace mubcert
