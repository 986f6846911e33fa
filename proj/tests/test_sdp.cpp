#include <doctest.h>

#include <fstream>
#include <sstream>

#include "corpus.hpp"
#include "mubcert/errors.hpp"
#include "mubcert/sdp.hpp"

using namespace mubcert;

namespace {

// min tr X  s.t.  X11 = 1, X PSD (2x2).
SdpProblem trivial_problem() {
  SdpProblem p;
  p.block_sizes = {2};
  p.objective.add(0, 0, 0, 1);
  p.objective.add(0, 1, 1, 1);
  SparseSymMatrix a;
  a.add(0, 0, 0, 1);
  p.constraints.push_back(a);
  p.rhs = {1};
  return p;
}

// Feasibility problem built from a known PSD point over two blocks.
SdpProblem from_point() {
  Eigen::MatrixXd X0(3, 3);
  X0 << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  SdpProblem p;
  p.block_sizes = {3, -2};
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> picks{{0, 0, 0}, {0, 0, 1}, {0, 1, 2}, {0, 2, 2}, {1, 0, 0}};
  for (auto [b, i, j] : picks) {
    SparseSymMatrix a;
    a.add(b, i, j, 1);
    p.constraints.push_back(a);
    double v = b == 0 ? X0(i, j) : 3.0;
    p.rhs.push_back(i == j ? v : 2 * v);
  }
  return p;
}

}  // namespace

TEST_SUITE("sdp") {
  TEST_CASE("trivial problem") {
    auto sol = solve_sdp(trivial_problem());
    CHECK(sol.status == SdpStatus::Optimal);
    CHECK(sol.primal_objective == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.X[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(sol.X[0](1, 1)) < 1e-6);
    CHECK(std::abs(sol.X[0](0, 1)) < 1e-6);
  }

  TEST_CASE("feasibility from a known point") {
    auto p = from_point();
    p.validate();
    auto sol = solve_sdp(p);
    CHECK(sol.status == SdpStatus::Optimal);
    CHECK(sol.primal_residual <= 1e-7);
    CHECK(sol.min_eigenvalue >= -1e-7);
    // The diagonal block stays diagonal.
    CHECK(sol.X[1](0, 1) == 0.0);
  }

  TEST_CASE("objective scaling") {
    auto p = trivial_problem();
    auto base = solve_sdp(p);
    for (auto& e : p.objective.entries) e.value *= 5;
    auto scaled = solve_sdp(p);
    CHECK(scaled.primal_objective == doctest::Approx(5 * base.primal_objective).epsilon(1e-6));
    CHECK((scaled.X[0] - base.X[0]).norm() < 1e-6);
  }

  TEST_CASE("determinism") {
    auto p = from_point();
    auto a = solve_sdp(p), b = solve_sdp(p);
    CHECK(a.iterations == b.iterations);
    CHECK(a.X[0] == b.X[0]);
  }

  TEST_CASE("inconsistent equalities are flagged") {
    auto p = trivial_problem();
    SparseSymMatrix again;
    again.add(0, 0, 0, 1);
    p.constraints.push_back(again);
    p.rhs.push_back(2);
    CHECK(solve_sdp(p).status == SdpStatus::InfeasibleDetected);
  }

  TEST_CASE("solutions are re-evaluated independently") {
    auto p = trivial_problem();
    auto sol = solve_sdp(p);
    auto copy = sol;
    copy.primal_residual = copy.gap = 123.0;
    evaluate_solution(p, p.objective, copy);
    CHECK(copy.primal_residual == doctest::Approx(sol.primal_residual));
    CHECK(copy.gap == doctest::Approx(sol.gap));
  }

  TEST_CASE("validation") {
    auto p = trivial_problem();
    p.rhs.clear();
    CHECK_THROWS_AS(p.validate(), DimensionError);
    auto q = trivial_problem();
    q.constraints[0].add(0, 2, 2, 1);
    CHECK_THROWS_AS(q.validate(), DimensionError);
    auto d = trivial_problem();
    d.block_sizes = {-2};
    d.validate();
    d.constraints[0].add(0, 0, 1, 1);
    CHECK_THROWS_AS(d.validate(), DimensionError);
  }

  TEST_CASE("SDPA output of the trivial problem") {
    auto p = trivial_problem();
    p.canonicalize();
    std::string text = emit_sdpa(p);
    std::istringstream in(text);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    REQUIRE(lines.size() == 8);
    CHECK(lines[0].front() == '*');
    CHECK(lines[1] == "1");
    CHECK(lines[2] == "1");
    CHECK(lines[3] == "2");
    CHECK(lines[4] == "1");
    CHECK(lines[5] == "0 1 1 1 -1");
    CHECK(lines[6] == "0 1 2 2 -1");
    CHECK(lines[7] == "1 1 1 1 1");
    CHECK(emit_sdpa(p) == text);
  }

  TEST_CASE("SDPA round trip") {
    for (auto p : {trivial_problem(), from_point()}) {
      p.comment = "round trip";
      p.canonicalize();
      auto text = emit_sdpa(p);
      auto back = parse_sdpa_string(text);
      CHECK(back == p);
      CHECK(emit_sdpa(back) == text);
    }
    auto path = (testing::temp_dir() / "roundtrip.dat-s").string();
    auto p = from_point();
    p.canonicalize();
    emit_sdpa(p, path);
    CHECK(parse_sdpa_file(path) == p);
  }

  TEST_CASE("SDPA parser tolerates punctuation and reports line numbers") {
    auto p = parse_sdpa_string("\"a comment\n*more\n1 =mdim\n1\n{2}\n{1.0}\n0 1 1 1 -1\n1,1,1,1,1\n");
    CHECK(p.block_sizes == std::vector<long>{2});
    CHECK(p.rhs == std::vector<double>{1.0});
    CHECK(p.objective.entries.size() == 1);
    CHECK(p.objective.entries[0].value == 1.0);
    try {
      parse_sdpa_string("1\n1\n2\n1\n0 1 1 x 1\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
    CHECK_THROWS_AS(parse_sdpa_string("1\n1\n2\n1\n0 1 3 3 1\n"), Error);
  }
}
