#pragma once

#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "mubcert/consys.hpp"
#include "mubcert/polynomial.hpp"

namespace testing {

using mubcert::Polynomial;
using mubcert::Rational;

// Shorthand for building small polynomials by hand.
struct Ring {
  std::size_t n;
  Polynomial x(std::size_t i) const { return Polynomial::variable(n, i); }
  Polynomial k(const Rational& c) const { return Polynomial::constant(n, c); }
};

struct CorpusEntry {
  std::string name;
  std::vector<Polynomial> F;
  bool infeasible;
};

// Twenty small systems with known verdicts over C.
inline std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> out;
  {
    Ring r{1};
    auto x = r.x(0);
    out.push_back({"x, x+1", {x, x + r.k(1)}, true});
    out.push_back({"x^2-1, x", {x * x - r.k(1), x}, true});
    out.push_back({"x^2+1, x", {x * x + r.k(1), x}, true});
    out.push_back({"x^2, x-1", {x * x, x - r.k(1)}, true});
    out.push_back({"x^3-1, x^2-1, x-2", {x.pow(3) - r.k(1), x * x - r.k(1), x - r.k(2)}, true});
    out.push_back({"x^2+1", {x * x + r.k(1)}, false});
  }
  {
    Ring r{2};
    auto x = r.x(0), y = r.x(1);
    out.push_back({"xy-1, x", {x * y - r.k(1), x}, true});
    out.push_back({"two circles", {x * x + y * y - r.k(1), x * x + y * y - r.k(2)}, true});
    out.push_back({"x-y, x+y-1, x-2y", {x - y, x + y - r.k(1), x - r.k(2) * y}, true});
    out.push_back({"x^2-y, y-2, x^2-3", {x * x - y, y - r.k(2), x * x - r.k(3)}, true});
    out.push_back({"xy, x-1, y-1", {x * y, x - r.k(1), y - r.k(1)}, true});
    out.push_back({"circle", {x * x + y * y - r.k(1)}, false});
    out.push_back({"x-1, y-2", {x - r.k(1), y - r.k(2)}, false});
    out.push_back({"xy-1", {x * y - r.k(1)}, false});
    out.push_back({"x^2-2, y^2-3", {x * x - r.k(2), y * y - r.k(3)}, false});
    out.push_back({"x^2+y^2, x-1", {x * x + y * y, x - r.k(1)}, false});
  }
  {
    Ring r{3};
    auto x = r.x(0), y = r.x(1), z = r.x(2);
    out.push_back({"xy-1, yz-1, xz-1, x+y+z", {x * y - r.k(1), y * z - r.k(1), x * z - r.k(1), x + y + z}, true});
    out.push_back({"sphere, x-y", {x * x + y * y + z * z - r.k(1), x - y}, false});
    out.push_back({"xyz-1, x-y", {x * y * z - r.k(1), x - y}, false});
  }
  out.push_back({"{1,1,1,1}_2", mubcert::build_1111_2().constraints, true});
  return out;
}

// Constraints of a density system that involve entries of more than one
// state. Variable names carry the state as "zr_<group>_<index>_<entry>".
inline std::size_t cross_state_constraints(const mubcert::PolySystem& sys) {
  auto state_of = [&](std::size_t v) {
    const auto& name = sys.vars[v];
    return name.substr(3, name.rfind('_') - 3);
  };
  std::size_t count = 0;
  for (const auto& p : sys.constraints) {
    std::set<std::string> states;
    for (const auto& t : p.terms())
      for (std::size_t v = 0; v < sys.nvars; ++v)
        if (t.mono[v] > 0) states.insert(state_of(v));
    count += states.size() > 1;
  }
  return count;
}

// Scratch directory for files written by tests.
inline std::filesystem::path temp_dir() {
  const char* env = std::getenv("MUBCERT_TEST_TMP");
  std::filesystem::path p = env ? env : std::filesystem::temp_directory_path();
  p /= "mubcert-test-files";
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
