#include "mubcert/cli.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mubcert/errors.hpp"
#include "mubcert/grassmann.hpp"
#include "mubcert/groebner.hpp"
#include "mubcert/io.hpp"
#include "mubcert/lasserre.hpp"
#include "mubcert/nulla.hpp"
#include "mubcert/qmp.hpp"
#include "mubcert/sdp.hpp"

namespace mubcert {

namespace {

// Bookkeeping for the manifest line written to stderr at exit.
struct Run {
  std::string subcommand;
  json inputs = json::array();
  json options = json::object();
  json result = json::object();
  json artifacts = json::array();

  std::string load(const std::string& path) {
    std::string text = read_input(path);
    inputs.push_back({{"path", path}, {"sha256", sha256_hex(text)}, {"bytes", text.size()}});
    return text;
  }
  void emit(const std::string& path, const std::string& text) {
    write_output(path, text);
    if (path != "-") artifacts.push_back(path);
  }
};

void diagnostic(const std::string& level, const std::string& message, json extra = json::object()) {
  extra["level"] = level;
  extra["message"] = message;
  std::cerr << extra.dump() << '\n';
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

PolySystem load_system(Run& run, const std::string& path) {
  return system_from_json(parse_json_text(run.load(path), path));
}

json sdp_solution_json(const SdpSolution& s, const SdpOptions& o) {
  return {{"status", to_string(s.status)},
          {"primal_objective", s.primal_objective},
          {"dual_objective", s.dual_objective},
          {"primal_residual", s.primal_residual},
          {"min_eigenvalue", s.min_eigenvalue},
          {"dual_min_eigenvalue", s.dual_min_eigenvalue},
          {"gap", s.gap},
          {"iterations", s.iterations},
          {"solver", {{"method", "admm"}, {"tol", o.tol}, {"max_iter", o.max_iter}, {"alpha", o.alpha}}}};
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ------------------------------------------------------------ subcommands

struct GenArgs {
  std::string spec, param = "vector", preset, out = "-";
  bool no_extra_gauge = false, full_minors = false;
};

int cmd_gen(Run& run, const GenArgs& a) {
  run.options = {{"spec", a.spec}, {"param", a.param}, {"preset", a.preset},
                 {"extra_gauge", !a.no_extra_gauge}, {"full_minors", a.full_minors}};
  if (a.spec.empty() == a.preset.empty()) throw CLI::ValidationError("gen", "give exactly one of --spec or --preset");
  PolySystem sys;
  if (!a.preset.empty()) {
    if (a.preset == "1111") {
      sys = build_1111_2();
    } else if (a.preset == "1111-opt") {
      sys = build_1111_2_optimization();
    } else if (a.preset == "5551") {
      sys = build_5551_6();
    } else if (a.preset == "5333-density") {
      sys = build_5333_6_density({a.full_minors});
    } else if (a.preset == "circle") {
      sys.nvars = 2;
      sys.vars = {"x", "y"};
      const Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
      sys.constraints = {x * x + y * y - Polynomial::constant(2, 1)};
      sys.provenance = "unit circle x^2 + y^2 - 1 (feasible)";
    } else if (a.preset == "1111-cert") {
      sys = build_1111_2();
      const Certificate c = known_certificate_1111_2();
      run.emit(a.out, dump(to_json(c, sys)));
      run.result = {{"kind", "certificate"}, {"degree", c.degree}};
      return 0;
    } else {
      throw CLI::ValidationError("--preset", "unknown preset '" + a.preset + "'");
    }
  } else {
    const ConstellationSpec spec = ConstellationSpec::parse(a.spec);
    if (a.param == "vector") {
      sys = build_vector_system(spec, {!a.no_extra_gauge});
    } else if (a.param == "density") {
      sys = build_density_system(spec, {a.full_minors});
    } else {
      throw CLI::ValidationError("--param", "expected vector or density");
    }
  }
  run.emit(a.out, dump(to_json(sys)));
  run.result = {{"kind", "system"}, {"nvars", sys.nvars}, {"constraints", sys.constraints.size()},
                {"max_degree", sys.max_constraint_degree()}};
  return 0;
}

struct GroebnerArgs {
  std::string in = "-", order = "grevlex", out = "-";
  unsigned max_degree = 12;
  std::size_t max_basis = 2000, max_pairs = 200000, max_terms = 2000;
  bool chain = false;
};

int cmd_groebner(Run& run, const GroebnerArgs& a) {
  GroebnerOptions o;
  o.order = parse_order(a.order);
  o.chain_criterion = a.chain;
  o.max_degree = a.max_degree;
  o.max_basis = a.max_basis;
  o.max_pairs = a.max_pairs;
  o.max_terms = a.max_terms;
  run.options = {{"order", a.order}, {"chain_criterion", a.chain}, {"max_degree", a.max_degree},
                 {"max_basis", a.max_basis}, {"max_pairs", a.max_pairs}, {"max_terms", a.max_terms}};
  const PolySystem sys = load_system(run, a.in);
  if (sys.constraints.empty()) throw PreconditionError("system has no constraints");
  GroebnerStats st;
  const GroebnerBasis g = reduced_groebner_basis(sys.constraints, o, &st);
  const bool infeasible = g.polynomials.size() == 1 && g.polynomials[0].is_constant();
  json basis = json::array();
  for (const auto& p : g.polynomials) basis.push_back(to_json(p));
  json out = {{"reduced_basis", std::move(basis)},
              {"infeasible_over_C", infeasible},
              {"order", to_string(o.order)},
              {"stats",
               {{"pairs", st.pairs},
                {"skipped", st.skipped},
                {"reductions", st.reductions},
                {"max_degree_seen", st.max_degree_seen}}},
              {"caps", run.options}};
  run.emit(a.out, dump(out));
  run.result = {{"infeasible_over_C", infeasible}, {"basis_size", g.polynomials.size()}};
  return 0;
}

struct NullaArgs {
  std::string in = "-", group, out = "-";
  unsigned dmax = 8;
  std::size_t max_rows = 2'000'000, max_cols = 2'000'000, max_bits = 0;
};

int cmd_nulla(Run& run, const NullaArgs& a) {
  NullaLimits lim;
  lim.max_rows = a.max_rows;
  lim.max_cols = a.max_cols;
  lim.max_bits = a.max_bits;
  run.options = {{"dmax", a.dmax}, {"group", a.group}, {"max_rows", a.max_rows}, {"max_cols", a.max_cols},
                 {"max_bits", a.max_bits}};
  const PolySystem sys = load_system(run, a.in);
  if (sys.constraints.empty()) throw PreconditionError("system has no constraints");
  NullaResult res;
  if (a.group.empty()) {
    res = nulla_search(sys.constraints, a.dmax, lim);
  } else {
    const PermutationGroup g = group_from_json(parse_json_text(run.load(a.group), a.group));
    res = nulla_search_symmetric(sys.constraints, a.dmax, g, lim);
  }
  json attempts = json::array();
  for (const auto& t : res.attempts)
    attempts.push_back({{"degree", t.degree}, {"rows", t.rows}, {"cols", t.cols}, {"consistent", t.consistent}});
  json out = {{"certificate", res.certificate ? to_json(*res.certificate, sys) : json(nullptr)},
              {"attempts", std::move(attempts)},
              {"dmax", a.dmax},
              {"symmetric", res.symmetric},
              {"verified", res.certificate.has_value()}};
  if (!res.certificate) {
    out["conclusion"] = res.symmetric ? "no symmetric certificate up to dmax" : "no certificate up to dmax";
  }
  run.emit(a.out, dump(out));
  run.result = {{"certificate_found", res.certificate.has_value()}, {"dmax", a.dmax}};
  if (res.certificate) run.result["degree"] = res.certificate->degree;
  return res.certificate ? 0 : 1;
}

int cmd_verify(Run& run, const std::string& sys_path, const std::string& cert_path, const std::string& out_path) {
  const PolySystem sys = load_system(run, sys_path);
  const json cj = parse_json_text(run.load(cert_path), cert_path);
  // Accept both a bare certificate and the output of `nulla`.
  const json& body = cj.contains("certificate") ? cj.at("certificate") : cj;
  if (body.is_null()) throw PreconditionError("the certificate file holds no certificate");
  const Certificate c = certificate_from_json(body);
  if (!sys.constraints.empty() && c.cofactors.size() == sys.constraints.size() &&
      c.cofactors.front().nvars() != sys.nvars) {
    throw DimensionError("certificate and system have different variable counts");
  }
  const bool ok = verify(sys.constraints, c);
  json out = {{"verified", ok}, {"degree", certificate_degree(sys.constraints, c.cofactors)},
              {"identity", "sum r_i p_i == 1 (exact)"}};
  run.emit(out_path, dump(out));
  run.result = out;
  return ok ? 0 : 1;
}

int cmd_grassmann(Run& run, const std::string& path, const std::string& out_path) {
  const auto bases = bases_from_json(parse_json_text(run.load(path), path));
  if (bases.size() < 2) throw PreconditionError("need at least two bases");
  std::vector<PlaneProjector> planes;
  for (const auto& b : bases) planes.push_back(basis_plane(b));
  json pairs = json::array();
  for (std::size_t i = 0; i < planes.size(); ++i)
    for (std::size_t j = i + 1; j < planes.size(); ++j)
      pairs.push_back({{"i", i}, {"j", j}, {"D2", distance_sq(planes[i], planes[j])}});
  const unsigned d = planes.front().d;
  json out = {{"d", d},
              {"max_D2", d - 1},
              {"pairwise", std::move(pairs)},
              {"avg_D2", avg_distance_sq(planes)},
              {"validation_tol", 1e-10}};
  run.emit(out_path, dump(out));
  run.result = {{"bases", bases.size()}, {"avg_D2", out["avg_D2"]}};
  return 0;
}

struct CiterArgs {
  std::string spec, init = "zero", out = "-";
  long max_iter = 500;
  double tol = 1e-7, sdp_tol = 1e-9, mu_tol = 1e-5;
  std::uint64_t seed = 1;
  bool polish = true;
};

int cmd_citer(Run& run, const CiterArgs& a) {
  run.options = {{"spec", a.spec}, {"max_iter", a.max_iter}, {"tol", a.tol}, {"sdp_tol", a.sdp_tol},
                 {"init", a.init}, {"seed", a.seed}, {"mu_tol", a.mu_tol},
                 {"polish", a.polish}};
  const QmpEncoding enc = encode_constellation_qmp(ConstellationSpec::parse(a.spec));
  const QmpProblem feas = enc.problem.feasibility();
  const RankConstrainedSdp rc = build_relaxation(feas);
  ConvexIterOptions o;
  o.max_iter = a.max_iter;
  o.tol = a.tol;
  o.sdp.tol = a.sdp_tol;
  if (a.init == "random") {
    o.seed = a.seed;
  } else if (a.init != "zero") {
    throw CLI::ValidationError("--init", "expected zero or random");
  }
  const ConvexIterState st = convex_iteration(rc, o);
  json out = {{"spec", enc.spec.to_string()},
              {"N", rc.size()},
              {"rank_bound", rc.rank_bound()},
              {"constraints", rc.sdp.constraints.size()},
              {"status", to_string(st.status)},
              {"iterations", st.iterations},
              {"tau", st.tau},
              {"tau_final", st.tau.empty() ? 0.0 : st.tau.back()},
              {"sdp_status", st.sdp_status},
              {"options", run.options}};
  bool positive = false;
  if (st.X) {
    // Orthogonality enters squared, so a tiny SDP residual can still leave a
    // visible overlap. A few Gauss-Newton steps on the QMP remove it.
    const PolishResult pol = a.polish ? polish(feas, *st.X) : PolishResult{*st.X, 0.0, 0.0, 0};
    const Eigen::MatrixXd& X = pol.X;
    const auto groups = enc.kets(X);
    const MuReport rep = check_mu(groups, a.mu_tol);
    json kets = json::array();
    for (const auto& g : groups) kets.push_back(bases_to_json({g})["bases"][0]);
    out["extracted"] = {{"X", matrix_json(X)},
                        {"kets", std::move(kets)},
                        {"reconstruction_residual", st.reconstruction_residual},
                        {"qmp_max_violation_raw", feas.max_violation(*st.X)},
                        {"polish_steps", pol.steps},
                        {"qmp_max_violation", feas.max_violation(X)},
                        {"mu_check", {{"pass", rep.pass}, {"max_deviation", rep.max_deviation}, {"tol", a.mu_tol}}}};
    positive = rep.pass;
  } else {
    out["extracted"] = nullptr;
  }
  run.emit(a.out, dump(out));
  run.result = {{"status", to_string(st.status)}, {"tau_final", out["tau_final"]}, {"mu_pass", positive}};
  return positive ? 0 : 1;
}

int cmd_emit_qmp(Run& run, const std::string& spec, const std::string& out_path) {
  run.options = {{"spec", spec}};
  const QmpEncoding enc = encode_constellation_qmp(ConstellationSpec::parse(spec));
  const RankConstrainedSdp rc = build_relaxation(enc.problem);
  run.emit(out_path, emit_sdpa(rc.sdp));
  run.result = {{"N", rc.size()},
                {"n", rc.n},
                {"rank_bound", rc.rank_bound()},
                {"qmp_constraints", rc.qmp_constraints},
                {"sdp_constraints", rc.sdp.constraints.size()},
                {"objective_pair", enc.objective_pair ? json({enc.objective_pair->first, enc.objective_pair->second})
                                                      : json(nullptr)}};
  return 0;
}

struct LasserreArgs {
  std::string in = "-", emit, out = "-";
  unsigned order = 0;
  bool solve = false;
  double tol = 1e-7;
  long max_iter = 200'000;
};

int cmd_lasserre(Run& run, const LasserreArgs& a) {
  run.options = {{"order", a.order}, {"solve", a.solve}, {"emit", a.emit}, {"tol", a.tol}, {"max_iter", a.max_iter}};
  if (a.solve == !a.emit.empty()) throw CLI::ValidationError("lasserre", "give exactly one of --solve or --emit");
  const PolySystem sys = load_system(run, a.in);
  const Polynomial objective = sys.objective ? *sys.objective : Polynomial(sys.nvars);
  const unsigned kmin = minimal_order(objective, sys.constraints);
  const unsigned k = a.order ? a.order : kmin;
  const MomentRelaxation r = build_moment_relaxation(objective, sys.constraints, k);
  json out = {{"order", k},
              {"minimal_order", kmin},
              {"level", k - kmin + 1},
              {"moment_matrix_size", r.basis.size()},
              {"moments", r.moments.size()},
              {"consistency_rows", r.consistency_rows},
              {"equality_rows", r.equality_rows},
              {"sdp_constraints", r.sdp.constraints.size()}};
  if (!a.emit.empty()) {
    run.emit(a.emit, emit_sdpa(r.sdp));
    if (a.emit != "-") run.emit(a.out, dump(out));
    run.result = out;
    return 0;
  }
  SdpOptions o;
  o.tol = a.tol;
  o.max_iter = a.max_iter;
  const SdpSolution s = solve_sdp(r.sdp, o);
  out["bound"] = s.primal_objective;
  out["solution"] = sdp_solution_json(s, o);
  run.emit(a.out, dump(out));
  run.result = {{"bound", s.primal_objective}, {"status", to_string(s.status)}, {"order", k}};
  return s.status == SdpStatus::Optimal ? 0 : 1;
}

int cmd_sdp(Run& run, const std::string& in, const std::string& out_path, double tol, long max_iter) {
  run.options = {{"tol", tol}, {"max_iter", max_iter}};
  const SdpProblem p = parse_sdpa_string(run.load(in));
  SdpOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  const SdpSolution s = solve_sdp(p, o);
  json blocks = json::array();
  for (const auto& x : s.X) blocks.push_back(matrix_json(x));
  json out = sdp_solution_json(s, o);
  out["X"] = std::move(blocks);
  out["y"] = s.y;
  run.emit(out_path, dump(out));
  run.result = {{"status", to_string(s.status)}, {"primal_objective", s.primal_objective}};
  return s.status == SdpStatus::Optimal ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"mubcert: certificates and relaxations for MU constellations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a polynomial system as JSON");
  g->add_option("--spec", gen.spec, "Constellation a1,...,ak@d");
  g->add_option("--param", gen.param, "vector or density")->check(CLI::IsMember({"vector", "density"}));
  g->add_option("--preset", gen.preset, "1111, 1111-opt, 1111-cert, 5551, 5333-density or circle");
  g->add_flag("--no-extra-gauge", gen.no_extra_gauge, "Keep the first vector of group 2 free");
  g->add_flag("--full-minors", gen.full_minors, "Use every 2x2 minor in the density parameterization");
  g->add_option("--out,-o", gen.out, "Output path ('-' for stdout)");

  GroebnerArgs gb;
  auto* gr = app.add_subcommand("groebner", "Reduced Groebner basis and infeasibility verdict");
  gr->add_option("--in,-i", gb.in, "System JSON ('-' for stdin)");
  gr->add_option("--order", gb.order)->check(CLI::IsMember({"lex", "grlex", "grevlex"}));
  gr->add_option("--max-degree", gb.max_degree, "Cap on intermediate degree (0 = none)");
  gr->add_option("--max-basis", gb.max_basis, "Cap on basis size (0 = none)");
  gr->add_option("--max-pairs", gb.max_pairs, "Cap on reduced S-pairs (0 = none)");
  gr->add_option("--max-terms", gb.max_terms, "Cap on terms per polynomial (0 = none)");
  gr->add_flag("--chain-criterion", gb.chain, "Also skip pairs by the chain criterion");
  gr->add_option("--out,-o", gb.out);

  NullaArgs nl;
  auto* nu = app.add_subcommand("nulla", "Search for a Nullstellensatz certificate");
  nu->add_option("--in,-i", nl.in, "System JSON ('-' for stdin)");
  nu->add_option("--dmax", nl.dmax, "Largest certificate degree to try");
  nu->add_option("--group", nl.group, "Permutation group JSON for orbit reduction");
  nu->add_option("--max-rows", nl.max_rows);
  nu->add_option("--max-cols", nl.max_cols);
  nu->add_option("--max-bits", nl.max_bits, "Cap on coefficient bits during elimination (0 = none)");
  nu->add_option("--out,-o", nl.out);

  std::string v_sys, v_cert, v_out = "-";
  auto* ve = app.add_subcommand("verify", "Check a certificate as an exact identity");
  ve->add_option("--sys", v_sys)->required();
  ve->add_option("--cert", v_cert)->required();
  ve->add_option("--out,-o", v_out);

  std::string gm_bases, gm_out = "-";
  auto* gs = app.add_subcommand("grassmann", "Pairwise Grassmann distances of bases");
  gs->add_option("--bases", gm_bases)->required();
  gs->add_option("--out,-o", gm_out);

  CiterArgs ci;
  auto* cv = app.add_subcommand("citer", "Convex iteration on the QMP encoding of a constellation");
  cv->add_option("--spec", ci.spec)->required();
  cv->add_option("--max-iter", ci.max_iter);
  cv->add_option("--tol", ci.tol, "Target for tau");
  cv->add_option("--sdp-tol", ci.sdp_tol);
  cv->add_option("--mu-tol", ci.mu_tol);
  cv->add_option("--init", ci.init, "zero or random")->check(CLI::IsMember({"zero", "random"}));
  cv->add_option("--seed", ci.seed, "Seed of the random initial projector");
  cv->add_flag("!--no-polish", ci.polish, "Report the raw extracted state without Gauss-Newton refinement");
  cv->add_option("--out,-o", ci.out);

  LasserreArgs la;
  auto* ls = app.add_subcommand("lasserre", "Moment relaxation lower bound");
  ls->add_option("--in,-i", la.in);
  ls->add_option("--order,-k", la.order, "Relaxation order (default: smallest admissible)");
  ls->add_flag("--solve", la.solve);
  ls->add_option("--emit", la.emit, "Write the SDP in SDPA sparse format");
  ls->add_option("--tol", la.tol);
  ls->add_option("--max-iter", la.max_iter);
  ls->add_option("--out,-o", la.out);

  std::string sd_in = "-", sd_out = "-";
  double sd_tol = 1e-7;
  long sd_iter = 200'000;
  auto* sd = app.add_subcommand("sdp", "Solve an SDPA sparse file");
  sd->add_option("--in,-i", sd_in);
  sd->add_option("--tol", sd_tol);
  sd->add_option("--max-iter", sd_iter);
  sd->add_option("--out,-o", sd_out);

  std::string eq_spec, eq_out = "-";
  auto* eq = app.add_subcommand("emit-qmp", "Write the QMP relaxation of a constellation as SDPA");
  eq->add_option("--spec", eq_spec)->required();
  eq->add_option("--out,-o", eq_out);

  Run run;
  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    run.subcommand = sub->get_name();
    if (sub == g) code = cmd_gen(run, gen);
    else if (sub == gr) code = cmd_groebner(run, gb);
    else if (sub == nu) code = cmd_nulla(run, nl);
    else if (sub == ve) code = cmd_verify(run, v_sys, v_cert, v_out);
    else if (sub == gs) code = cmd_grassmann(run, gm_bases, gm_out);
    else if (sub == cv) code = cmd_citer(run, ci);
    else if (sub == ls) code = cmd_lasserre(run, la);
    else if (sub == sd) code = cmd_sdp(run, sd_in, sd_out, sd_tol, sd_iter);
    else if (sub == eq) code = cmd_emit_qmp(run, eq_spec, eq_out);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    diagnostic("error", e.what(), {{"kind", "usage"}});
    code = 2;
  } catch (const ResourceError& e) {
    diagnostic("error", e.what(), {{"kind", "resource"}, {"cap", e.cap()}, {"progress", e.progress()}});
    run.result = {{"resource_cap", e.cap()}, {"progress", e.progress()}};
    code = 3;
  } catch (const ParseError& e) {
    diagnostic("error", e.what(), {{"kind", "parse"}, {"line", e.line()}});
    code = 2;
  } catch (const Error& e) {
    diagnostic("error", e.what(), {{"kind", "input"}});
    code = 2;
  } catch (const std::bad_alloc&) {
    diagnostic("error", "out of memory", {{"kind", "resource"}, {"cap", "memory"}});
    code = 3;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest = {{"manifest",
                    {{"subcommand", run.subcommand},
                     {"inputs", run.inputs},
                     {"options", run.options},
                     {"wall_time_s", wall},
                     {"result", run.result},
                     {"artifacts", run.artifacts},
                     {"exit_code", code}}}};
  std::cerr << manifest.dump() << std::endl;
  return code;
}

}  // namespace mubcert
