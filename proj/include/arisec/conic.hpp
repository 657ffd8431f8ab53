// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "arisec/types.hpp"

namespace arisec {

/// -weight * ln(a.x + b); convex for weight > 0.
struct LogTerm {
  double weight = 1.0;
  RVector a;
  double b = 0.0;
};

/// weight * (a.x + b)^exponent with exponent < 0; convex and decreasing for weight > 0.
struct PowerTerm {
  double weight = 1.0;
  RVector a;
  double b = 0.0;
  double exponent = -1.0;
};

/// x_I^T Q x_I with Q symmetric PSD.
struct QuadTerm {
  std::vector<int> index;
  RMatrix Q;
};

/// g(x) = linear.x + constant + quads + logs + powers <= 0.
struct Constraint {
  RVector linear;
  double constant = 0.0;
  std::vector<QuadTerm> quads;
  std::vector<LogTerm> logs;
  std::vector<PowerTerm> powers;
};

/// A Hermitian PSD matrix variable X, stored in the real decision vector from `offset`:
/// the real diagonal (skipped when unit_diagonal) then (Re X_pq, Im X_pq) for p < q in
/// row-major order.
struct HermitianBlock {
  int offset = 0;
  int dim = 0;
  bool unit_diagonal = false;

  int var_count() const { return unit_diagonal ? dim * (dim - 1) : dim * dim; }
};

/// minimize cost.x  s.t.  constraints g_i(x) <= 0, eq_A x = eq_b, every block PSD.
struct ConicProblem {
  int num_vars = 0;
  RVector cost;
  std::vector<Constraint> constraints;
  RMatrix eq_A;
  RVector eq_b;
  std::vector<HermitianBlock> blocks;

  /// Reserves `count` scalar variables and returns the first index.
  int add_variables(int count);
  /// Reserves a Hermitian block and returns it.
  HermitianBlock add_block(int dim, bool unit_diagonal);
  /// Constraint with a zero linear part of the right size.
  Constraint make_constraint() const;
  RVector zeros() const { return RVector::Zero(num_vars); }
  void add_equality(const RVector& row, double rhs);
};

struct SolverOptions {
  double tol_feas = 1e-9;
  double tol_gap = 1e-8;
  int max_newton_steps = 600;
  double t0 = 1.0;
  double mu = 20.0;
  /// Radius of the ball around the start point that bounds phase I (phase II uses 1e3x);
  /// 0 picks 1e3 + 10 sqrt(n) ||x0||_inf.
  double ball_radius = 0.0;
};

enum class SolveStatus { optimal, infeasible, iteration_limit, numerical_failure };

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  RVector x;
  double objective = 0.0;
  double max_violation = 0.0;
  int newton_steps = 0;
  std::string message;
};

const char* to_string(SolveStatus status);

/// Primal log-barrier interior-point method with a phase-I search for a strictly
/// feasible point. `x0` must lie in the domain of every log and power term.
ConicSolution solve(const ConicProblem& problem, const RVector& x0, const SolverOptions& options = {});

/// Value of g_i(x) for one constraint; +inf outside the domain of its log/power terms.
double evaluate_constraint(const Constraint& c, const RVector& x);

/// Largest violation of constraints, equalities and PSD blocks at x (0 when feasible).
double max_violation(const ConicProblem& problem, const RVector& x);

/// Builds the Hermitian matrix a block encodes.
CMatrix block_matrix(const HermitianBlock& block, const RVector& x);
/// Writes a Hermitian matrix into a block's variables.
void set_block(const HermitianBlock& block, const CMatrix& X, RVector& x);
/// Tr(A X) = coeffs.x + constant for a Hermitian A. Coefficients are written into
/// `coeffs` (size num_vars) at the block's variables and added to what is there.
double add_trace_coefficients(const HermitianBlock& block, const CMatrix& A, RVector& coeffs);

/// [[Re H, -Im H], [Im H, Re H]]; throws Error(argument) if H is not Hermitian within 1e-10.
RMatrix hermitian_real_embedding(const CMatrix& H);

}  // namespace arisec
