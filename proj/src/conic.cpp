// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/conic.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace arisec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
  int r;
  int s;
  Complex c;
};

// Affine matrix map X(x) = base + sum_v x_v E_v for one PSD block.
struct BlockMap {
  int dim = 0;
  CMatrix base;
  std::vector<int> vars;
  std::vector<std::vector<Entry>> entries;
};

BlockMap make_block_map(const HermitianBlock& b, int shift_var) {
  BlockMap m;
  m.dim = b.dim;
  m.base = CMatrix::Zero(b.dim, b.dim);
  if (b.unit_diagonal) m.base.setIdentity();
  int v = b.offset;
  if (!b.unit_diagonal) {
    for (int p = 0; p < b.dim; ++p) {
      m.vars.push_back(v++);
      m.entries.push_back({{p, p, 1.0}});
    }
  }
  const Complex i1(0.0, 1.0);
  for (int p = 0; p < b.dim; ++p) {
    for (int q = p + 1; q < b.dim; ++q) {
      m.vars.push_back(v++);
      m.entries.push_back({{p, q, 1.0}, {q, p, 1.0}});
      m.vars.push_back(v++);
      m.entries.push_back({{p, q, i1}, {q, p, -i1}});
    }
  }
  if (shift_var >= 0) {
    std::vector<Entry> id;
    for (int p = 0; p < b.dim; ++p) id.push_back({p, p, 1.0});
    m.vars.push_back(shift_var);
    m.entries.push_back(std::move(id));
  }
  return m;
}

CMatrix assemble(const BlockMap& m, const RVector& x) {
  CMatrix X = m.base;
  for (size_t a = 0; a < m.vars.size(); ++a) {
    const double xv = x(m.vars[a]);
    if (xv == 0.0) continue;
    for (const Entry& e : m.entries[a]) X(e.r, e.s) += xv * e.c;
  }
  return X;
}

struct TermEval {
  double value;
  bool ok;
};

// Value of g(x) minus the optional shift variable; ok = false outside the domain.
TermEval constraint_value(const Constraint& c, const RVector& x, int shift_var) {
  double v = c.linear.dot(x) + c.constant;
  for (const QuadTerm& qt : c.quads) {
    RVector xi(qt.index.size());
    for (size_t k = 0; k < qt.index.size(); ++k) xi(k) = x(qt.index[k]);
    v += xi.dot(qt.Q * xi);
  }
  for (const LogTerm& lt : c.logs) {
    const double z = lt.a.dot(x) + lt.b;
    if (!(z > 0.0)) return {kInf, false};
    v -= lt.weight * std::log(z);
  }
  for (const PowerTerm& pt : c.powers) {
    const double z = pt.a.dot(x) + pt.b;
    if (!(z > 0.0)) return {kInf, false};
    v += pt.weight * std::pow(z, pt.exponent);
  }
  if (shift_var >= 0) v -= x(shift_var);
  return {v, true};
}

class Barrier {
 public:
  Barrier(const ConicProblem& p, int shift_var, const RVector& ball_center, double ball_radius)
      : shift_(shift_var) {
    n_ = p.num_vars + (shift_var >= 0 ? 1 : 0);
    cost_ = RVector::Zero(n_);
    if (shift_var >= 0) {
      cost_(shift_var) = 1.0;
    } else {
      cost_ = p.cost;
    }
    for (const Constraint& c : p.constraints) {
      Constraint cc = c;
      if (shift_var >= 0) cc.linear = pad(c.linear);
      for (auto& lt : cc.logs) lt.a = pad(lt.a);
      for (auto& pt : cc.powers) pt.a = pad(pt.a);
      constraints_.push_back(std::move(cc));
    }
    {
      // ||x - c||^2 <= R^2 keeps the barrier bounded below along directions free of cost.
      Constraint ball;
      const int n = p.num_vars;
      ball.linear = RVector::Zero(n_);
      ball.linear.head(n) = -2.0 * ball_center;
      ball.constant = ball_center.squaredNorm() - ball_radius * ball_radius;
      QuadTerm qt;
      for (int i = 0; i < n; ++i) qt.index.push_back(i);
      qt.Q = RMatrix::Identity(n, n);
      ball.quads.push_back(std::move(qt));
      constraints_.push_back(std::move(ball));
    }
    for (const HermitianBlock& b : p.blocks) blocks_.push_back(make_block_map(b, shift_var));
    barrier_order_ = static_cast<double>(constraints_.size() + (shift_var >= 0 ? 1 : 0));
    for (const auto& b : blocks_) barrier_order_ += b.dim;
  }

  int size() const { return n_; }
  double order() const { return barrier_order_; }

  // t * cost.x + barrier; +inf outside the domain.
  double value(const RVector& x, double t) const {
    double f = t * cost_.dot(x);
    for (const Constraint& c : constraints_) {
      const TermEval e = constraint_value(c, x, shift_);
      if (!e.ok || !(e.value < 0.0)) return kInf;
      f -= std::log(-e.value);
    }
    if (shift_ >= 0) {
      // s >= -1 keeps phase I bounded below.
      const double v = -x(shift_) - 1.0;
      if (!(v < 0.0)) return kInf;
      f -= std::log(-v);
    }
    for (const BlockMap& b : blocks_) {
      const CMatrix X = assemble(b, x);
      Eigen::LLT<CMatrix> llt(X);
      if (llt.info() != Eigen::Success) return kInf;
      const auto& L = llt.matrixLLT();
      for (int p = 0; p < b.dim; ++p) {
        const double d = L(p, p).real();
        if (!(d > 0.0)) return kInf;
        f -= 2.0 * std::log(d);
      }
    }
    return f;
  }

  // Gradient and Hessian at a point inside the domain.
  bool derivatives(const RVector& x, double t, RVector& g, RMatrix& H) const {
    g = t * cost_;
    H = RMatrix::Zero(n_, n_);
    RVector grad(n_);
    for (const Constraint& c : constraints_) {
      const TermEval e = constraint_value(c, x, shift_);
      if (!e.ok || !(e.value < 0.0)) return false;
      const double inv = 1.0 / -e.value;
      grad = c.linear;
      if (shift_ >= 0) grad(shift_) -= 1.0;
      for (const QuadTerm& qt : c.quads) {
        RVector xi(qt.index.size());
        for (size_t k = 0; k < qt.index.size(); ++k) xi(k) = x(qt.index[k]);
        const RVector qx = 2.0 * (qt.Q * xi);
        for (size_t a = 0; a < qt.index.size(); ++a) {
          grad(qt.index[a]) += qx(a);
          for (size_t b = 0; b < qt.index.size(); ++b) H(qt.index[a], qt.index[b]) += inv * 2.0 * qt.Q(a, b);
        }
      }
      for (const LogTerm& lt : c.logs) {
        const double z = lt.a.dot(x) + lt.b;
        grad -= (lt.weight / z) * lt.a;
        H.noalias() += (inv * lt.weight / (z * z)) * lt.a * lt.a.transpose();
      }
      for (const PowerTerm& pt : c.powers) {
        const double z = pt.a.dot(x) + pt.b;
        const double p = pt.exponent;
        grad += (pt.weight * p * std::pow(z, p - 1.0)) * pt.a;
        H.noalias() += (inv * pt.weight * p * (p - 1.0) * std::pow(z, p - 2.0)) * pt.a * pt.a.transpose();
      }
      g += inv * grad;
      H.noalias() += (inv * inv) * grad * grad.transpose();
    }
    if (shift_ >= 0) {
      const double v = -x(shift_) - 1.0;
      if (!(v < 0.0)) return false;
      g(shift_) += -1.0 / -v;
      H(shift_, shift_) += 1.0 / (v * v);
    }
    for (const BlockMap& b : blocks_) {
      const CMatrix X = assemble(b, x);
      Eigen::LLT<CMatrix> llt(X);
      if (llt.info() != Eigen::Success) return false;
      const CMatrix Y = llt.solve(CMatrix::Identity(b.dim, b.dim));
      const size_t nv = b.vars.size();
      for (size_t a = 0; a < nv; ++a) {
        Complex tr = 0.0;
        for (const Entry& e : b.entries[a]) tr += e.c * Y(e.s, e.r);
        g(b.vars[a]) -= tr.real();
        for (size_t c = a; c < nv; ++c) {
          Complex h = 0.0;
          for (const Entry& e : b.entries[a]) {
            for (const Entry& f : b.entries[c]) h += e.c * f.c * Y(e.s, f.r) * Y(f.s, e.r);
          }
          H(b.vars[a], b.vars[c]) += h.real();
          if (c != a) H(b.vars[c], b.vars[a]) += h.real();
        }
      }
    }
    return true;
  }

 private:
  RVector pad(const RVector& v) const {
    if (v.size() == n_) return v;
    RVector out = RVector::Zero(n_);
    out.head(v.size()) = v;
    return out;
  }

  int n_ = 0;
  int shift_ = -1;
  RVector cost_;
  std::vector<Constraint> constraints_;
  std::vector<BlockMap> blocks_;
  double barrier_order_ = 0.0;
};

enum class CenterResult { converged, stalled, limit, early_exit };

struct NewtonState {
  int steps = 0;
  int max_steps = 0;
};

// Damped Newton on value(., t) restricted to x + range(Z).
CenterResult center(const Barrier& bar, const RMatrix* Z, RVector& x, double t, NewtonState& ns, int shift_var) {
  RVector g;
  RMatrix H;
  for (int local = 0;; ++local) {
    if (local >= 80) return CenterResult::converged;
    if (shift_var >= 0 && x(shift_var) < 0.0) return CenterResult::early_exit;
    if (ns.steps >= ns.max_steps) return CenterResult::limit;
    if (!bar.derivatives(x, t, g, H)) return CenterResult::stalled;
    RVector gz = Z ? RVector(Z->transpose() * g) : g;
    RMatrix Hz = Z ? RMatrix(Z->transpose() * H * *Z) : H;
    const int m = static_cast<int>(gz.size());
    RVector dz;
    double reg = 0.0;
    const double scale = std::max(1e-300, Hz.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::LLT<RMatrix> llt(Hz + reg * RMatrix::Identity(m, m));
      if (llt.info() == Eigen::Success) {
        dz = -llt.solve(gz);
        if (dz.allFinite()) break;
      }
      reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
      dz.resize(0);
    }
    if (dz.size() == 0) return CenterResult::stalled;
    const RVector dx = Z ? RVector(*Z * dz) : dz;
    const double decrement = -g.dot(dx);
    if (decrement / 2.0 <= 1e-10) return CenterResult::converged;
    const double f0 = bar.value(x, t);
    double alpha = 1.0;
    bool moved = false;
    while (alpha > 1e-12) {
      const RVector trial = x + alpha * dx;
      const double f1 = bar.value(trial, t);
      if (f1 <= f0 - 0.25 * alpha * decrement) {
        x = trial;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    ++ns.steps;
    // Without a resolvable decrease the centering is as good as rounding allows.
    const bool tiny = decrement <= 1e-6;
    if (!moved) return tiny ? CenterResult::converged : CenterResult::stalled;
    if (alpha < 1e-6 && tiny) return CenterResult::converged;
  }
}

// Orthonormal basis of null(A); empty pointer result when A has no rows.
std::optional<RMatrix> nullspace(const RMatrix& A, int n) {
  if (A.rows() == 0) return std::nullopt;
  Eigen::ColPivHouseholderQR<RMatrix> qr(A.transpose());
  const int rank = static_cast<int>(qr.rank());
  const RMatrix Q = qr.householderQ() * RMatrix::Identity(n, n);
  return RMatrix(Q.rightCols(n - rank));
}

}  // namespace

int ConicProblem::add_variables(int count) {
  const int first = num_vars;
  num_vars += count;
  RVector c = RVector::Zero(num_vars);
  c.head(cost.size()) = cost;
  cost = c;
  for (Constraint& k : constraints) {
    RVector l = RVector::Zero(num_vars);
    l.head(k.linear.size()) = k.linear;
    k.linear = l;
  }
  if (eq_A.rows() > 0) {
    RMatrix A = RMatrix::Zero(eq_A.rows(), num_vars);
    A.leftCols(eq_A.cols()) = eq_A;
    eq_A = A;
  } else {
    eq_A.resize(0, num_vars);
  }
  return first;
}

HermitianBlock ConicProblem::add_block(int dim, bool unit_diagonal) {
  HermitianBlock b;
  b.dim = dim;
  b.unit_diagonal = unit_diagonal;
  b.offset = add_variables(b.var_count());
  blocks.push_back(b);
  return b;
}

Constraint ConicProblem::make_constraint() const {
  Constraint c;
  c.linear = RVector::Zero(num_vars);
  return c;
}

void ConicProblem::add_equality(const RVector& row, double rhs) {
  RMatrix A(eq_A.rows() + 1, num_vars);
  if (eq_A.rows() > 0) A.topRows(eq_A.rows()) = eq_A;
  A.row(eq_A.rows()) = row.transpose();
  eq_A = A;
  RVector b(eq_b.size() + 1);
  b.head(eq_b.size()) = eq_b;
  b(eq_b.size()) = rhs;
  eq_b = b;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::iteration_limit: return "iteration_limit";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

double evaluate_constraint(const Constraint& c, const RVector& x) {
  const TermEval e = constraint_value(c, x, -1);
  return e.ok ? e.value : kInf;
}

CMatrix block_matrix(const HermitianBlock& block, const RVector& x) {
  return assemble(make_block_map(block, -1), x);
}

void set_block(const HermitianBlock& block, const CMatrix& X, RVector& x) {
  int v = block.offset;
  if (!block.unit_diagonal) {
    for (int p = 0; p < block.dim; ++p) x(v++) = X(p, p).real();
  }
  for (int p = 0; p < block.dim; ++p) {
    for (int q = p + 1; q < block.dim; ++q) {
      x(v++) = X(p, q).real();
      x(v++) = X(p, q).imag();
    }
  }
}

double add_trace_coefficients(const HermitianBlock& block, const CMatrix& A, RVector& coeffs) {
  double constant = 0.0;
  int v = block.offset;
  for (int p = 0; p < block.dim; ++p) {
    if (block.unit_diagonal) {
      constant += A(p, p).real();
    } else {
      coeffs(v++) += A(p, p).real();
    }
  }
  for (int p = 0; p < block.dim; ++p) {
    for (int q = p + 1; q < block.dim; ++q) {
      coeffs(v++) += 2.0 * A(q, p).real();
      coeffs(v++) += -2.0 * A(q, p).imag();
    }
  }
  return constant;
}

double max_violation(const ConicProblem& problem, const RVector& x) {
  double v = 0.0;
  for (const Constraint& c : problem.constraints) v = std::max(v, evaluate_constraint(c, x));
  if (problem.eq_A.rows() > 0) v = std::max(v, (problem.eq_A * x - problem.eq_b).cwiseAbs().maxCoeff());
  for (const HermitianBlock& b : problem.blocks) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(block_matrix(b, x), Eigen::EigenvaluesOnly);
    v = std::max(v, -es.eigenvalues().minCoeff());
  }
  return v;
}

ConicSolution solve(const ConicProblem& problem, const RVector& x0, const SolverOptions& options) {
  ConicSolution sol;
  const int n = problem.num_vars;
  if (x0.size() != n || problem.cost.size() != n) {
    throw Error(ErrorCode::dimension, "conic solve: start point or cost has the wrong size");
  }
  for (const Constraint& c : problem.constraints) {
    if (c.linear.size() != n) throw Error(ErrorCode::dimension, "conic solve: constraint has the wrong size");
  }

  RVector x = x0;
  std::optional<RMatrix> Z = nullspace(problem.eq_A, n);
  if (problem.eq_A.rows() > 0) {
    const RVector r = problem.eq_b - problem.eq_A * x;
    x += problem.eq_A.completeOrthogonalDecomposition().solve(r);
  }

  const double radius = options.ball_radius > 0.0 ? options.ball_radius
                                                 : 1e3 + 10.0 * x.lpNorm<Eigen::Infinity>() * std::sqrt(double(n));
  NewtonState ns;
  ns.max_steps = options.max_newton_steps;

  // Phase I: minimize s subject to g_i(x) <= s and X_b(x) + s I >= 0.
  double s0 = -kInf;
  for (const Constraint& c : problem.constraints) {
    const TermEval e = constraint_value(c, x, -1);
    if (!e.ok) {
      sol.status = SolveStatus::numerical_failure;
      sol.x = x;
      sol.message = "start point outside the domain of a log or power term";
      return sol;
    }
    s0 = std::max(s0, e.value);
  }
  for (const HermitianBlock& b : problem.blocks) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(block_matrix(b, x), Eigen::EigenvaluesOnly);
    s0 = std::max(s0, -es.eigenvalues().minCoeff());
  }
  if (s0 > -1e-9) {
    const Barrier phase1(problem, n, x, radius);
    RVector xa(n + 1);
    xa.head(n) = x;
    xa(n) = std::max(s0, 0.0) + 1.0;
    std::optional<RMatrix> Za;
    if (Z) {
      RMatrix z = RMatrix::Zero(n + 1, Z->cols() + 1);
      z.topLeftCorner(n, Z->cols()) = *Z;
      z(n, Z->cols()) = 1.0;
      Za = z;
    }
    double t = options.t0;
    bool found = false;
    for (;;) {
      const CenterResult r = center(phase1, Za ? &*Za : nullptr, xa, t, ns, n);
      if (r == CenterResult::early_exit) {
        found = true;
        break;
      }
      if (r == CenterResult::limit) break;
      if (phase1.order() / t < options.tol_feas || r == CenterResult::stalled) break;
      t *= options.mu;
    }
    sol.newton_steps = ns.steps;
    if (!found) {
      sol.x = xa.head(n);
      sol.status = ns.steps >= ns.max_steps ? SolveStatus::iteration_limit : SolveStatus::infeasible;
      sol.message = "no strictly feasible point (phase I optimum " + std::to_string(xa(n)) + ")";
      sol.max_violation = max_violation(problem, sol.x);
      sol.objective = problem.cost.dot(sol.x);
      return sol;
    }
    x = xa.head(n);
  }

  const Barrier phase2(problem, -1, x, 1e3 * radius);
  double t = options.t0;
  SolveStatus status = SolveStatus::optimal;
  for (;;) {
    const CenterResult r = center(phase2, Z ? &*Z : nullptr, x, t, ns, -1);
    if (r == CenterResult::limit) {
      status = SolveStatus::iteration_limit;
      break;
    }
    if (r == CenterResult::stalled) {
      // Loss of precision close to the optimum is benign once the duality gap is small.
      status = phase2.order() / t <= std::sqrt(options.tol_gap) ? SolveStatus::optimal
                                                                : SolveStatus::numerical_failure;
      if (status == SolveStatus::numerical_failure) sol.message = "Newton step stalled";
      break;
    }
    if (phase2.order() / t < options.tol_gap) break;
    t *= options.mu;
  }
  sol.status = status;
  sol.x = x;
  sol.newton_steps = ns.steps;
  sol.objective = problem.cost.dot(x);
  sol.max_violation = max_violation(problem, x);
  return sol;
}

RMatrix hermitian_real_embedding(const CMatrix& H) {
  if (H.rows() != H.cols()) throw Error(ErrorCode::argument, "hermitian_real_embedding: matrix is not square");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::argument, "hermitian_real_embedding: matrix is not Hermitian");
  }
  const auto n = H.rows();
  RMatrix E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = H.real();
  E.topRightCorner(n, n) = -H.imag();
  E.bottomLeftCorner(n, n) = H.imag();
  E.bottomRightCorner(n, n) = H.real();
  return E;
}

}  // namespace arisec
