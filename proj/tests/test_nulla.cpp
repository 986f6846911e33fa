#include <doctest.h>

#include "corpus.hpp"
#include "mubcert/consys.hpp"
#include "mubcert/errors.hpp"
#include "mubcert/exact_solver.hpp"
#include "mubcert/groebner.hpp"
#include "mubcert/nulla.hpp"

using namespace mubcert;
using testing::Ring;

TEST_SUITE("nulla") {
  TEST_CASE("monomial counts") {
    CHECK(count_monomials(4, 6) == 210);
    CHECK(count_monomials(1, 0) == 1);
    CHECK(count_monomials(2, 2) == 6);
    CHECK(monomials_up_to(2, 2).size() == 6);
    CHECK(monomials_up_to(3, 0).front().is_one());
  }

  TEST_CASE("exact solver") {
    SparseSystem id{2, 2, {{{0, Rational(1)}}, {{1, Rational(1)}}}, {1, 0}};
    auto y = solve_exact(id);
    REQUIRE(y.has_value());
    CHECK(*y == std::vector<Rational>{1, 0});
    SparseSystem zero{1, 1, {{}}, {1}};
    CHECK_FALSE(solve_exact(zero).has_value());
    // Rank-deficient but consistent: y1 + y2 = 2, 2y1 + 2y2 = 4.
    SparseSystem dep{2, 2, {{{0, Rational(1)}, {1, Rational(2)}}, {{0, Rational(1)}, {1, Rational(2)}}}, {2, 4}};
    ExactSolveStats st;
    auto s = solve_exact(dep, {}, &st);
    REQUIRE(s.has_value());
    CHECK((*s)[0] + (*s)[1] == 2);
    CHECK(st.rank == 1);
  }

  TEST_CASE("linear system layout") {
    auto sys = build_1111_2();
    auto ls = build_linear_system(sys.constraints, 6);
    CHECK(ls.matrix.rows == 210);
    CHECK(ls.matrix.cols == 4 * 70 + 15);
    CHECK_THROWS_AS(build_linear_system(sys.constraints, 3), PreconditionError);

    Ring r{1};
    auto single = build_linear_system({r.x(0)}, 1);
    CHECK(single.matrix.rows == 2);
    CHECK(single.matrix.cols == 1);
    CHECK_FALSE(solve_exact(single.matrix).has_value());

    std::vector<Polynomial> F{r.x(0), r.x(0) + r.k(1)};
    auto ls2 = build_linear_system(F, 1);
    auto y = solve_exact(ls2.matrix);
    REQUIRE(y.has_value());
    auto cert = certificate_from_solution(F, ls2, *y);
    CHECK(cert.cofactors == std::vector<Polynomial>{r.k(-1), r.k(1)});
    CHECK(cert.degree == 1);
  }

  TEST_CASE("search") {
    Ring r{1};
    auto res = nulla_search({r.x(0), r.x(0) + r.k(1)}, 3);
    REQUIRE(res.certificate.has_value());
    CHECK(res.certificate->degree == 1);
    CHECK(res.attempts.size() == 1);

    Ring c{2};
    auto circle = nulla_search({c.x(0) * c.x(0) + c.x(1) * c.x(1) - c.k(1)}, 6);
    CHECK_FALSE(circle.certificate.has_value());
    CHECK(circle.attempts.size() == 5);
  }

  TEST_CASE("{1,1,1,1}_2 needs degree 6") {
    auto sys = build_1111_2();
    auto res = nulla_search(sys.constraints, 6);
    REQUIRE(res.certificate.has_value());
    CHECK(res.certificate->degree == 6);
    CHECK(verify(sys.constraints, *res.certificate));
    REQUIRE(res.attempts.size() == 3);
    CHECK_FALSE(res.attempts[0].consistent);
    CHECK_FALSE(res.attempts[1].consistent);
    CHECK(res.attempts[2].consistent);
  }

  TEST_CASE("verification") {
    auto sys = build_1111_2();
    auto cert = known_certificate_1111_2();
    CHECK(verify(sys.constraints, cert));
    CHECK(certificate_stats(cert).degree == 6);
    auto broken = cert;
    broken.cofactors[3] = Polynomial(4);
    CHECK_FALSE(verify(sys.constraints, broken));
    broken.cofactors.pop_back();
    CHECK_THROWS_AS(verify(sys.constraints, broken), DimensionError);

    Ring r{1};
    CHECK(verify({r.x(0), r.x(0) + r.k(1)}, {{r.k(-1), r.k(1)}, 1}));
    CHECK(certificate_stats({{r.k(1)}, 0}).degree == 0);
  }

  TEST_CASE("monotone in the degree") {
    Ring r{2};
    std::vector<Polynomial> F{r.x(0) * r.x(1) - r.k(1), r.x(0)};
    bool seen = false;
    for (unsigned d = 2; d <= 5; ++d) {
      bool ok = solve_exact(build_linear_system(F, d).matrix).has_value();
      if (seen) CHECK(ok);
      seen = seen || ok;
    }
    CHECK(seen);
  }

  TEST_CASE("agreement with Groebner verdicts") {
    for (const auto& e : testing::corpus()) {
      CAPTURE(e.name);
      auto res = nulla_search(e.F, 6);
      CHECK(res.certificate.has_value() == infeasible_over_C(e.F));
      if (res.certificate) CHECK(verify(e.F, *res.certificate));
    }
  }

  TEST_CASE("orbit reduction") {
    Ring r{2};
    std::vector<Polynomial> F{r.x(0) - r.x(1) - r.k(1), r.x(1) - r.x(0) - r.k(1)};
    PermutationGroup swap{2, {{1, 0}}};
    auto red = orbit_reduce(F, 1, swap);
    CHECK(red.col_orbits.size() == 1);
    CHECK(red.row_orbits.size() == 2);
    auto y = solve_exact(red.matrix);
    REQUIRE(y.has_value());
    auto cert = certificate_from_solution(F, red.full, red.lift(*y));
    CHECK(verify(F, cert));
    // Any row-orbit member gives the same reduced entry.
    for (const auto& orbit : red.row_orbits)
      for (std::size_t c = 0; c < red.col_orbits.size(); ++c)
        for (auto member : orbit) CHECK(red.entry_from(member, c) == red.entry_from(orbit.front(), c));

    auto sym = nulla_search_symmetric(F, 3, swap);
    CHECK(sym.symmetric);
    REQUIRE(sym.certificate.has_value());
    CHECK(verify(F, *sym.certificate));
  }

  TEST_CASE("trivial group keeps the system") {
    Ring r{2};
    std::vector<Polynomial> F{r.x(0) * r.x(1) - r.k(1), r.x(0)};
    auto red = orbit_reduce(F, 2, PermutationGroup::trivial(2));
    auto full = build_linear_system(F, 2);
    CHECK(red.matrix.rows == full.matrix.rows);
    CHECK(red.matrix.cols == full.matrix.cols);
    CHECK(red.matrix.rhs == full.matrix.rhs);
    for (std::size_t c = 0; c < full.matrix.cols; ++c) CHECK(red.matrix.columns[c] == full.matrix.columns[c]);
  }

  TEST_CASE("a non-invariant system is rejected") {
    Ring r{2};
    CHECK_THROWS_AS(orbit_reduce({r.x(0), r.x(1) + r.k(1)}, 1, PermutationGroup{2, {{1, 0}}}), PreconditionError);
  }

  TEST_CASE("resource caps report the last completed degree") {
    auto sys = build_1111_2();
    NullaLimits lim;
    lim.max_rows = 100;
    try {
      nulla_search(sys.constraints, 6, lim);
      FAIL("expected a resource error");
    } catch (const ResourceError& e) {
      CHECK(e.cap() == "max_rows");
      CHECK(e.progress() == 4);
    }
  }

  TEST_CASE("{5,5,5,1}_6 is beyond the default caps") {
    auto sys = build_5551_6();
    CHECK(count_monomials(100, 4) == 4598126);
    try {
      nulla_search_symmetric(sys.constraints, 4, symmetry_group_5551());
      FAIL("expected a resource error");
    } catch (const ResourceError& e) {
      CHECK(e.cap() == "max_rows");
      CHECK(e.progress() == 3);
    }
  }
}
