#pragma once

#include <string>
#include <vector>

#include "shipplan/cone_program.hpp"

namespace shipplan {

enum class SolveStatus {
  Optimal,
  PrimalInfeasible,
  DualUnbounded,  // dual infeasibility certificate: primal unbounded below
  NumericalLimit,
};

std::string to_string(SolveStatus status);

struct SolverSettings {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 120;
  int refine_steps = 2;
  double static_reg = 1e-10;
  bool verbose = false;
};

struct SolverResult {
  SolveStatus status = SolveStatus::NumericalLimit;
  std::vector<double> x;  // primal variables
  std::vector<double> s;  // cone slacks, h - Gx
  std::vector<double> z;  // cone duals
  std::vector<double> y;  // equality duals
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;
  double rel_gap = 0.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  int iterations = 0;
  double solve_seconds = 0.0;
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling
/// and Mehrotra predictor-corrector steps. Rotated cones are mapped to
/// standard second-order cones internally; the KKT system is solved with a
/// sparse LDL^T factorization (static regularization + iterative
/// refinement). Deterministic: same program and settings give the same
/// iterates.
SolverResult solve_cone_program(const ConeProgram& prog,
                                const SolverSettings& settings = {});

}  // namespace shipplan
