#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shipplan/cone_program.hpp"
#include "shipplan/ipm_solver.hpp"

using namespace shipplan;

TEST_CASE("lp lower bound") {
  ConeProgram prog;
  const int x = prog.add_var("x", 0);
  prog.c[x] = 1.0;
  prog.add_nonneg(LinExpr::var(x).add_const(-1.0), "lb", 0);  // x - 1 >= 0
  SolverResult res = solve_cone_program(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x[x] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.primal_obj == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("lp with equality") {
  ConeProgram prog;
  const int x = prog.add_var("x", 0);
  const int y = prog.add_var("y", 0);
  prog.c[x] = 1.0;
  prog.c[y] = 1.0;
  LinExpr sum = LinExpr::var(x);
  sum.add(y, 1.0).add_const(-1.0);
  prog.add_nonneg(sum, "sum_lb", 0);  // x + y >= 1
  LinExpr eq = LinExpr::var(x);
  eq.add(y, -1.0);
  prog.add_eq(eq, "sym", 0);  // x = y
  SolverResult res = solve_cone_program(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x[x] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(res.x[y] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("soc projection distance") {
  // min t s.t. t >= ||(3,4)||  ->  t = 5
  ConeProgram prog;
  const int t = prog.add_var("t", 0);
  prog.c[t] = 1.0;
  prog.add_soc(LinExpr::var(t), {LinExpr(3.0), LinExpr(4.0)}, "soc", 0);
  SolverResult res = solve_cone_program(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x[t] == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("rotated cone geometric mean") {
  // min v + w s.t. 2^2 <= v*w  ->  v = w = 2
  ConeProgram prog;
  const int v = prog.add_var("v", 0);
  const int w = prog.add_var("w", 0);
  prog.c[v] = 1.0;
  prog.c[w] = 1.0;
  prog.add_rsoc(LinExpr::var(v), LinExpr::var(w), LinExpr(2.0), "gm", 0);
  SolverResult res = solve_cone_program(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.primal_obj == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(res.x[v] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(res.x[w] == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("quadratic over linear epigraph") {
  // min q s.t. 3^2 <= q * 2  ->  q = 4.5
  ConeProgram prog;
  const int q = prog.add_var("q", 0);
  prog.c[q] = 1.0;
  prog.add_rsoc(LinExpr::var(q), LinExpr(2.0), LinExpr(3.0), "qol", 0);
  SolverResult res = solve_cone_program(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x[q] == doctest::Approx(4.5).epsilon(1e-7));
}

TEST_CASE("inverse sqrt encoding") {
  // min y s.t. w^2 <= 4, 1 <= y*w  ->  y = 1/2 at w = 2
  ConeProgram prog;
  const int y = prog.add_var("y", 0);
  const int w = prog.add_var("w", 0);
  prog.c[y] = 1.0;
  prog.add_rsoc(LinExpr(4.0), LinExpr(1.0), LinExpr::var(w), "w2_le_b", 0);
  prog.add_rsoc(LinExpr::var(y), LinExpr::var(w), LinExpr(1.0), "recip", 0);
  SolverResult res = solve_cone_program(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x[y] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("primal infeasible detected") {
  ConeProgram prog;
  const int x = prog.add_var("x", 0);
  prog.c[x] = 1.0;
  prog.add_nonneg(LinExpr::var(x).add_const(-1.0), "ge1", 0);   // x >= 1
  prog.add_nonneg(LinExpr::var(x, -1.0), "le0", 0);             // x <= 0
  SolverResult res = solve_cone_program(prog);
  CHECK(res.status == SolveStatus::PrimalInfeasible);
}

TEST_CASE("unbounded detected") {
  ConeProgram prog;
  const int x = prog.add_var("x", 0);
  prog.c[x] = 1.0;
  prog.add_nonneg(LinExpr::var(x, -1.0), "le0", 0);  // x <= 0, min x
  SolverResult res = solve_cone_program(prog);
  CHECK(res.status == SolveStatus::DualUnbounded);
}

TEST_CASE("deterministic repeat solve") {
  auto run = [] {
    ConeProgram prog;
    const int q = prog.add_var("q", 0);
    const int v = prog.add_var("v", 0);
    prog.c[q] = 1.0;
    prog.c[v] = 0.3;
    prog.add_rsoc(LinExpr::var(q), LinExpr::var(v), LinExpr(3.0), "qol", 0);
    prog.add_nonneg(LinExpr::var(v, -1.0).add_const(5.0), "cap", 0);
    return solve_cone_program(prog);
  };
  SolverResult a = run [0]();
  SolverResult b = run();
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.primal_obj == b.primal_obj);  // bitwise identical path
}

TEST_CASE("dual values satisfy stationarity") {
  // min x s.t. x >= 2: dual of the bound must be 1.
  ConeProgram prog;
  const int x = prog.add_var("x", 0);
  prog.c[x] = 1.0;
  prog.add_nonneg(LinExpr::var(x).add_const(-2.0), "lb", 0);
  SolverResult res = solve_cone_program(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.z[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.dual_obj == doctest::Approx(2.0).epsilon(1e-6));
}
