#include "shipplan/ipm_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace shipplan {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Block {
  ConeKind kind;  // Nonnegative or SecondOrder after expansion
  int offset;
  int dim;
};

/// Nesterov-Todd scaling state for one second-order cone block.
struct SocScaling {
  double eta = 1.0;
  Vec wbar;          // scaling point, wbar' J wbar = 1
  Eigen::MatrixXd W2;  // dense eta^2 * (2 wbar wbar' - J)^2
};

struct Scaling {
  // Nonnegative part: per-row w^2 = s/z and lambda = sqrt(s z).
  std::vector<double> nn_w2;
  std::vector<SocScaling> soc;
  Vec lambda;  // full length, scaled variable
};

double soc_resid(const double* v, int dim) {
  double nrm = 0.0;
  for (int i = 1; i < dim; ++i) nrm += v[i] * v[i];
  return v[0] - std::sqrt(nrm);
}

/// Internal expanded problem: only nonnegative rows and SOC blocks.
struct Expanded {
  int n = 0;   // variables
  int p = 0;   // equality rows
  int m = 0;   // cone rows
  SpMat A, G, At, Gt;
  Vec b, h, c;
  std::vector<Block> blocks;
  int nn_rows = 0;   // total nonnegative rows
  double barrier_degree = 0.0;

  // Map back to the caller's problem.
  Vec col_scale;      // x_orig = col_scale .* x_scaled
  Vec eq_row_scale;   // y_orig = eq_row_scale .* y / obj_scale
  Vec cone_row_scale; // scaling of the expanded rows
  double obj_scale = 1.0;
};

struct KktSolver {
  const Expanded& ex;
  double reg;
  int refine_steps;
  SpMat K;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;
  const Scaling* scal = nullptr;

  explicit KktSolver(const Expanded& e, double reg_, int refine_)
      : ex(e), reg(reg_), refine_steps(refine_) {}

  void factor(const Scaling& s) {
    scal = &s;
    const int dim = ex.n + ex.p + ex.m;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(ex.A.nonZeros() + ex.G.nonZeros() + ex.m * 4 + dim);
    for (int i = 0; i < ex.n; ++i) trip.emplace_back(i, i, reg);
    for (int i = 0; i < ex.p; ++i) {
      trip.emplace_back(ex.n + i, ex.n + i, -reg);
    }
    for (int k = 0; k < ex.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(ex.A, k); it; ++it) {
        // lower triangle entries (row block y, col block x)
        trip.emplace_back(ex.n + static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
      }
    }
    for (int k = 0; k < ex.G.outerSize(); ++k) {
      for (SpMat::InnerIterator it(ex.G, k); it; ++it) {
        trip.emplace_back(ex.n + ex.p + static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
      }
    }
    // -W^2 block
    int nn_seen = 0;
    std::size_t soc_idx = 0;
    for (const Block& blk : ex.blocks) {
      const int base = ex.n + ex.p + blk.offset;
      if (blk.kind == ConeKind::Nonnegative) {
        for (int i = 0; i < blk.dim; ++i) {
          trip.emplace_back(base + i, base + i,
                            -s.nn_w2[nn_seen + i] - reg);
        }
        nn_seen += blk.dim;
      } else {
        const Eigen::MatrixXd& W2 = s.soc[soc_idx++].W2;
        for (int r = 0; r < blk.dim; ++r) {
          for (int c2 = 0; c2 <= r; ++c2) {
            double v = -W2(r, c2);
            if (r == c2) v -= reg;
            trip.emplace_back(base + r, base + c2, v);
          }
        }
      }
    }
    if (!analyzed) {
      K = SpMat(dim, dim);
      K.setFromTriplets(trip.begin(), trip.end());
      ldlt.analyzePattern(K.selfadjointView<Eigen::Lower>());
      analyzed = true;
    } else {
      K.setFromTriplets(trip.begin(), trip.end());
    }
    ldlt.factorize(K.selfadjointView<Eigen::Lower>());
    if (ldlt.info() != Eigen::Success) {
      throw std::runtime_error("ipm: KKT factorization failed");
    }
  }

  // Apply the unregularized KKT operator.
  void apply(const Vec& u, Vec& out) const {
    const auto ux = u.head(ex.n);
    const auto uy = u.segment(ex.n, ex.p);
    const auto uz = u.tail(ex.m);
    out.resize(ex.n + ex.p + ex.m);
    out.head(ex.n) = ex.At * uy + ex.Gt * uz;
    out.segment(ex.n, ex.p) = ex.A * ux;
    Vec w2uz(ex.m);
    int nn_seen = 0;
    std::size_t soc_idx = 0;
    for (const Block& blk : ex.blocks) {
      if (blk.kind == ConeKind::Nonnegative) {
        for (int i = 0; i < blk.dim; ++i) {
          w2uz(blk.offset + i) = scal->nn_w2[nn_seen + i] * uz(blk.offset + i);
        }
        nn_seen += blk.dim;
      } else {
        w2uz.segment(blk.offset, blk.dim) =
            scal->soc[soc_idx++].W2 * uz.segment(blk.offset, blk.dim);
      }
    }
    out.tail(ex.m) = ex.G * ux - w2uz;
  }

  Vec solve(const Vec& rhs) const {
    Vec u = ldlt.solve(rhs);
    Vec r(rhs.size()), ku(rhs.size());
    for (int it = 0; it < refine_steps; ++it) {
      apply(u, ku);
      r = rhs - ku;
      u += ldlt.solve(r);
    }
    return u;
  }
};

Scaling compute_scaling(const Expanded& ex, const Vec& s, const Vec& z) {
  Scaling out;
  out.nn_w2.reserve(ex.nn_rows);
  out.lambda.resize(ex.m);
  for (const Block& blk : ex.blocks) {
    if (blk.kind == ConeKind::Nonnegative) {
      for (int i = 0; i < blk.dim; ++i) {
        const double si = s(blk.offset + i), zi = z(blk.offset + i);
        out.nn_w2.push_back(si / zi);
        out.lambda(blk.offset + i) = std::sqrt(si * zi);
      }
    } else {
      const int d = blk.dim;
      Vec sb = s.segment(blk.offset, d);
      Vec zb = z.segment(blk.offset, d);
      const double a2 = sb(0) * sb(0) - sb.tail(d - 1).squaredNorm();
      const double b2 = zb(0) * zb(0) - zb.tail(d - 1).squaredNorm();
      if (!(a2 > 0.0) || !(b2 > 0.0)) {
        throw std::runtime_error("ipm: iterate left the cone interior");
      }
      const double a = std::sqrt(a2), b = std::sqrt(b2);
      Vec sbar = sb / a, zbar = zb / b;
      const double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
      Vec Jz = zbar;
      Jz.tail(d - 1) = -Jz.tail(d - 1);
      SocScaling ss;
      ss.wbar = (sbar + Jz) / (2.0 * gamma);
      ss.eta = std::sqrt(a / b);
      // W = eta (2 wbar wbar' - J); W2 = W * W
      Eigen::MatrixXd J = -Eigen::MatrixXd::Identity(d, d);
      J(0, 0) = 1.0;
      Eigen::MatrixXd Wb = 2.0 * ss.wbar * ss.wbar.transpose() - J;
      ss.W2 = (ss.eta * ss.eta) * (Wb * Wb);
      // lambda = W z
      Vec lam = ss.eta * (Wb * zb);
      out.lambda.segment(blk.offset, d) = lam;
      out.soc.push_back(std::move(ss));
    }
  }
  return out;
}

/// W u (scaled) for corrector terms.
Vec apply_W(const Expanded& ex, const Scaling& sc, const Vec& u) {
  Vec out(ex.m);
  int nn_seen = 0;
  std::size_t soc_idx = 0;
  for (const Block& blk : ex.blocks) {
    if (blk.kind == ConeKind::Nonnegative) {
      for (int i = 0; i < blk.dim; ++i) {
        out(blk.offset + i) =
            std::sqrt(sc.nn_w2[nn_seen + i]) * u(blk.offset + i);
      }
      nn_seen += blk.dim;
    } else {
      const SocScaling& ss = sc.soc[soc_idx++];
      const int d = blk.dim;
      Vec ub = u.segment(blk.offset, d);
      Vec Ju = ub;
      Ju.tail(d - 1) = -Ju.tail(d - 1);
      out.segment(blk.offset, d) =
          ss.eta * (2.0 * ss.wbar * ss.wbar.dot(ub) - Ju);
    }
  }
  return out;
}

Vec apply_Winv(const Expanded& ex, const Scaling& sc, const Vec& u) {
  Vec out(ex.m);
  int nn_seen = 0;
  std::size_t soc_idx = 0;
  for (const Block& blk : ex.blocks) {
    if (blk.kind == ConeKind::Nonnegative) {
      for (int i = 0; i < blk.dim; ++i) {
        out(blk.offset + i) =
            u(blk.offset + i) / std::sqrt(sc.nn_w2[nn_seen + i]);
      }
      nn_seen += blk.dim;
    } else {
      const SocScaling& ss = sc.soc[soc_idx++];
      const int d = blk.dim;
      // W^-1 = (1/eta) (2 (J wbar)(J wbar)' - J)
      Vec ub = u.segment(blk.offset, d);
      Vec Jw = ss.wbar;
      Jw.tail(d - 1) = -Jw.tail(d - 1);
      Vec Ju = ub;
      Ju.tail(d - 1) = -Ju.tail(d - 1);
      out.segment(blk.offset, d) = (2.0 * Jw * Jw.dot(ub) - Ju) / ss.eta;
    }
  }
  return out;
}

/// Jordan product u o v per block.
Vec jordan_prod(const Expanded& ex, const Vec& u, const Vec& v) {
  Vec out(ex.m);
  for (const Block& blk : ex.blocks) {
    if (blk.kind == ConeKind::Nonnegative) {
      for (int i = 0; i < blk.dim; ++i) {
        out(blk.offset + i) = u(blk.offset + i) * v(blk.offset + i);
      }
    } else {
      const int d = blk.dim;
      auto ub = u.segment(blk.offset, d);
      auto vb = v.segment(blk.offset, d);
      out(blk.offset) = ub.dot(vb);
      out.segment(blk.offset + 1, d - 1) =
          ub(0) * vb.tail(d - 1) + vb(0) * ub.tail(d - 1);
    }
  }
  return out;
}

/// Solve lambda o x = d per block (arrow system for SOC).
Vec jordan_solve(const Expanded& ex, const Vec& lambda, const Vec& d) {
  Vec out(ex.m);
  for (const Block& blk : ex.blocks) {
    if (blk.kind == ConeKind::Nonnegative) {
      for (int i = 0; i < blk.dim; ++i) {
        out(blk.offset + i) = d(blk.offset + i) / lambda(blk.offset + i);
      }
    } else {
      const int dd = blk.dim;
      auto lb = lambda.segment(blk.offset, dd);
      auto db = d.segment(blk.offset, dd);
      const double det = lb(0) * lb(0) - lb.tail(dd - 1).squaredNorm();
      const double x0 = (lb(0) * db(0) - lb.tail(dd - 1).dot(db.tail(dd - 1))) / det;
      out(blk.offset) = x0;
      out.segment(blk.offset + 1, dd - 1) =
          (db.tail(dd - 1) - x0 * lb.tail(dd - 1)) / lb(0);
    }
  }
  return out;
}

/// Identity element of the cone algebra.
Vec cone_identity(const Expanded& ex) {
  Vec e = Vec::Zero(ex.m);
  for (const Block& blk : ex.blocks) {
    if (blk.kind == ConeKind::Nonnegative) {
      e.segment(blk.offset, blk.dim).setOnes();
    } else {
      e(blk.offset) = 1.0;
    }
  }
  return e;
}

/// Smallest cone eigenvalue, negative means outside.
double min_eig(const Expanded& ex, const Vec& u) {
  double m = kInf;
  for (const Block& blk : ex.blocks) {
    if (blk.kind == ConeKind::Nonnegative) {
      for (int i = 0; i < blk.dim; ++i) m = std::min(m, u(blk.offset + i));
    } else {
      m = std::min(m, soc_resid(u.data() + blk.offset, blk.dim));
    }
  }
  return m;
}

/// Largest alpha in [0, cap] with u + alpha du staying in the cone.
double max_step(const Expanded& ex, const Vec& u, const Vec& du, double cap) {
  double alpha = cap;
  for (const Block& blk : ex.blocks) {
    if (blk.kind == ConeKind::Nonnegative) {
      for (int i = 0; i < blk.dim; ++i) {
        const double d = du(blk.offset + i);
        if (d < 0.0) alpha = std::min(alpha, -u(blk.offset + i) / d);
      }
    } else {
      const int dd = blk.dim;
      auto ub = u.segment(blk.offset, dd);
      auto db = du.segment(blk.offset, dd);
      // (u0+a d0)^2 - ||u1+a d1||^2 >= 0 and u0 + a d0 >= 0
      const double a2 = db(0) * db(0) - db.tail(dd - 1).squaredNorm();
      const double a1 = 2.0 * (ub(0) * db(0) - ub.tail(dd - 1).dot(db.tail(dd - 1)));
      const double a0 = ub(0) * ub(0) - ub.tail(dd - 1).squaredNorm();
      double bound = kInf;
      const double disc = a1 * a1 - 4.0 * a2 * a0;
      if (std::abs(a2) < 1e-300) {
        if (a1 < 0.0) bound = -a0 / a1;
      } else if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double r1 = (-a1 - sq) / (2.0 * a2);
        const double r2 = (-a1 + sq) / (2.0 * a2);
        const double lo = std::min(r1, r2), hi = std::max(r1, r2);
        if (a2 > 0.0) {
          // feasible outside (lo, hi); boundary at lo if lo > 0
          if (lo > 0.0) bound = lo;
        } else {
          // feasible inside [lo, hi]
          if (hi > 0.0) bound = hi;
        }
      }
      if (db(0) < 0.0) bound = std::min(bound, -ub(0) / db(0));
      alpha = std::min(alpha, bound);
    }
  }
  return std::max(0.0, alpha);
}

Expanded expand_and_scale(const ConeProgram& prog) {
  Expanded ex;
  ex.n = prog.num_vars;
  ex.p = prog.num_eq_rows();

  // Rotated cones become standard second-order cones through
  // (v, w, u) -> (v + w, v - w, 2u).
  std::vector<Eigen::Triplet<double>> gt;
  std::vector<double> h2;

  // Collect original G rows for random access.
  std::vector<std::vector<std::pair<int, double>>> grows(prog.num_cone_rows());
  for (const Triplet& t : prog.G) grows[t.row].push_back({t.col, t.val});

  auto emit_row = [&](const std::vector<std::pair<int, double>>& row,
                      double hval) {
    const int r = static_cast<int>(h2.size());
    for (const auto& [col, val] : row) gt.emplace_back(r, col, val);
    h2.push_back(hval);
  };
  auto emit_combo = [&](int ra, double ca, int rb, double cb) {
    const int r = static_cast<int>(h2.size());
    for (const auto& [col, val] : grows[ra]) gt.emplace_back(r, col, ca * val);
    if (rb >= 0) {
      for (const auto& [col, val] : grows[rb]) {
        gt.emplace_back(r, col, cb * val);
      }
    }
    h2.push_back(ca * prog.h[ra] + (rb >= 0 ? cb * prog.h[rb] : 0.0));
  };

  for (const ConeBlock& blk : prog.cones) {
    if (blk.kind == ConeKind::Nonnegative) {
      Block b{ConeKind::Nonnegative, static_cast<int>(h2.size()), blk.dim};
      for (int i = 0; i < blk.dim; ++i) {
        emit_row(grows[blk.offset + i], prog.h[blk.offset + i]);
      }
      ex.blocks.push_back(b);
      ex.nn_rows += blk.dim;
      ex.barrier_degree += blk.dim;
    } else if (blk.kind == ConeKind::SecondOrder) {
      Block b{ConeKind::SecondOrder, static_cast<int>(h2.size()), blk.dim};
      for (int i = 0; i < blk.dim; ++i) {
        emit_row(grows[blk.offset + i], prog.h[blk.offset + i]);
      }
      ex.blocks.push_back(b);
      ex.barrier_degree += 1.0;
    } else {
      Block b{ConeKind::SecondOrder, static_cast<int>(h2.size()), 3};
      emit_combo(blk.offset, 1.0, blk.offset + 1, 1.0);   // v + w
      emit_combo(blk.offset, 1.0, blk.offset + 1, -1.0);  // v - w
      emit_combo(blk.offset + 2, 2.0, -1, 0.0);           // 2u
      ex.blocks.push_back(b);
      ex.barrier_degree += 1.0;
    }
  }
  ex.m = static_cast<int>(h2.size());

  ex.A = SpMat(ex.p, ex.n);
  {
    std::vector<Eigen::Triplet<double>> at;
    at.reserve(prog.A.size());
    for (const Triplet& t : prog.A) at.emplace_back(t.row, t.col, t.val);
    ex.A.setFromTriplets(at.begin(), at.end());
  }
  ex.G = SpMat(ex.m, ex.n);
  ex.G.setFromTriplets(gt.begin(), gt.end());
  ex.b = Eigen::Map<const Vec>(prog.b.data(), ex.p);
  ex.h = Eigen::Map<const Vec>(h2.data(), ex.m);
  ex.c = Eigen::Map<const Vec>(prog.c.data(), ex.n);

  // Ruiz equilibration; rows belonging to one SOC block share a single
  // scale so the cone is preserved.
  ex.col_scale = Vec::Ones(ex.n);
  ex.eq_row_scale = Vec::Ones(ex.p);
  ex.cone_row_scale = Vec::Ones(ex.m);
  for (int pass = 0; pass < 10; ++pass) {
    Vec colmax = Vec::Zero(ex.n);
    for (int k = 0; k < ex.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(ex.A, k); it; ++it) {
        colmax(it.col()) = std::max(colmax(it.col()), std::abs(it.value()));
      }
    }
    for (int k = 0; k < ex.G.outerSize(); ++k) {
      for (SpMat::InnerIterator it(ex.G, k); it; ++it) {
        colmax(it.col()) = std::max(colmax(it.col()), std::abs(it.value()));
      }
    }
    Vec dcol(ex.n);
    for (int j = 0; j < ex.n; ++j) {
      dcol(j) = colmax(j) > 0.0 ? 1.0 / std::sqrt(colmax(j)) : 1.0;
    }
    Vec rowmax_a = Vec::Zero(ex.p), rowmax_g = Vec::Zero(ex.m);
    for (int k = 0; k < ex.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(ex.A, k); it; ++it) {
        const double v = std::abs(it.value()) * dcol(it.col());
        rowmax_a(it.row()) = std::max(rowmax_a(it.row()), v);
      }
    }
    for (int k = 0; k < ex.G.outerSize(); ++k) {
      for (SpMat::InnerIterator it(ex.G, k); it; ++it) {
        const double v = std::abs(it.value()) * dcol(it.col());
        rowmax_g(it.row()) = std::max(rowmax_g(it.row()), v);
      }
    }
    Vec dra(ex.p), drg(ex.m);
    for (int i = 0; i < ex.p; ++i) {
      dra(i) = rowmax_a(i) > 0.0 ? 1.0 / std::sqrt(rowmax_a(i)) : 1.0;
    }
    for (const Block& blk : ex.blocks) {
      if (blk.kind == ConeKind::Nonnegative) {
        for (int i = 0; i < blk.dim; ++i) {
          const int r = blk.offset + i;
          drg(r) = rowmax_g(r) > 0.0 ? 1.0 / std::sqrt(rowmax_g(r)) : 1.0;
        }
      } else {
        double mx = 0.0;
        for (int i = 0; i < blk.dim; ++i) {
          mx = std::max(mx, rowmax_g(blk.offset + i));
        }
        const double sc = mx > 0.0 ? 1.0 / std::sqrt(mx) : 1.0;
        for (int i = 0; i < blk.dim; ++i) drg(blk.offset + i) = sc;
      }
    }
    ex.A = dra.asDiagonal() * ex.A * dcol.asDiagonal();
    ex.G = drg.asDiagonal() * ex.G * dcol.asDiagonal();
    ex.col_scale = ex.col_scale.cwiseProduct(dcol);
    ex.eq_row_scale = ex.eq_row_scale.cwiseProduct(dra);
    ex.cone_row_scale = ex.cone_row_scale.cwiseProduct(drg);
  }
  ex.b = ex.eq_row_scale.cwiseProduct(ex.b);
  ex.h = ex.cone_row_scale.cwiseProduct(ex.h);
  ex.c = ex.col_scale.cwiseProduct(ex.c);
  const double cmax = ex.c.size() > 0 ? ex.c.cwiseAbs().maxCoeff() : 0.0;
  ex.obj_scale = cmax > 1.0 ? 1.0 / cmax : 1.0;
  ex.c *= ex.obj_scale;

  ex.At = ex.A.transpose();
  ex.Gt = ex.G.transpose();
  return ex;
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "infeasible";
    case SolveStatus::DualUnbounded: return "unbounded";
    case SolveStatus::NumericalLimit: return "numerical-limit";
  }
  return "unknown";
}

SolverResult solve_cone_program(const ConeProgram& prog,
                                const SolverSettings& settings) {
  const auto t0 = std::chrono::steady_clock::now();
  prog.verify();
  if (prog.num_cone_rows() == 0) {
    throw std::invalid_argument("ipm: program has no cone constraints");
  }

  Expanded ex = expand_and_scale(prog);
  const int n = ex.n, p = ex.p, m = ex.m;

  SolverResult res;
  res.x.assign(n, 0.0);
  res.y.assign(p, 0.0);
  res.s.assign(prog.num_cone_rows(), 0.0);
  res.z.assign(prog.num_cone_rows(), 0.0);

  KktSolver kkt(ex, settings.static_reg, settings.refine_steps);

  // Initial point from two least-norm solves with identity scaling.
  Vec s0 = Vec::Ones(m), z0 = Vec::Ones(m);
  Scaling ident = compute_scaling(ex, s0, z0);
  kkt.factor(ident);

  Vec rhs(n + p + m);
  rhs.head(n).setZero();
  rhs.segment(n, p) = ex.b;
  rhs.tail(m) = ex.h;
  Vec u0 = kkt.solve(rhs);
  Vec x = u0.head(n);
  Vec s = -(u0.tail(m));  // h - Gx at the least-norm point
  {
    const double me = min_eig(ex, s);
    if (me < 0.0) {
      s += (1.0 - me) * cone_identity(ex);
    } else if (me < 1e-8) {
      s += cone_identity(ex);
    }
  }
  rhs.head(n) = -ex.c;
  rhs.segment(n, p).setZero();
  rhs.tail(m).setZero();
  Vec u1 = kkt.solve(rhs);
  Vec y = u1.segment(n, p);
  Vec z = u1.tail(m);
  {
    const double me = min_eig(ex, z);
    if (me < 0.0) {
      z += (1.0 - me) * cone_identity(ex);
    } else if (me < 1e-8) {
      z += cone_identity(ex);
    }
  }
  double tau = 1.0, kappa = 1.0;

  const double nu = ex.barrier_degree + 1.0;
  const double bnorm = 1.0 + ex.b.norm();
  const double hnorm = 1.0 + ex.h.norm();
  const double cnorm = 1.0 + ex.c.norm();

  auto finish = [&](SolveStatus st, const Vec& xs, const Vec& ys,
                    const Vec& zs, const Vec& ss, int iters) {
    res.status = st;
    // Undo Ruiz/objective scaling.
    Vec xo = ex.col_scale.cwiseProduct(xs);
    Vec yo = ex.eq_row_scale.cwiseProduct(ys) / ex.obj_scale;
    Vec zexp = ex.cone_row_scale.cwiseProduct(zs) / ex.obj_scale;
    Vec sexp = ss.cwiseQuotient(ex.cone_row_scale);
    for (int i = 0; i < n; ++i) res.x[i] = xo(i);
    for (int i = 0; i < p; ++i) res.y[i] = yo(i);
    // Map expanded slacks/duals back to the caller's rotated blocks:
    // s_orig = T^-1 s_exp, z_orig = T' z_exp.
    std::size_t bi = 0;
    for (const ConeBlock& blk : prog.cones) {
      const Block& eb = ex.blocks[bi++];
      if (blk.kind == ConeKind::RotatedSecondOrder) {
        const double st0 = sexp(eb.offset), st1 = sexp(eb.offset + 1),
                     st2 = sexp(eb.offset + 2);
        res.s[blk.offset] = 0.5 * (st0 + st1);
        res.s[blk.offset + 1] = 0.5 * (st0 - st1);
        res.s[blk.offset + 2] = 0.5 * st2;
        const double zt0 = zexp(eb.offset), zt1 = zexp(eb.offset + 1),
                     zt2 = zexp(eb.offset + 2);
        res.z[blk.offset] = zt0 + zt1;
        res.z[blk.offset + 1] = zt0 - zt1;
        res.z[blk.offset + 2] = 2.0 * zt2;
      } else {
        for (int i = 0; i < blk.dim; ++i) {
          res.s[blk.offset + i] = sexp(eb.offset + i);
          res.z[blk.offset + i] = zexp(eb.offset + i);
        }
      }
    }
    res.iterations = iters;
    res.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return res;
  };

  int iter = 0;
  for (; iter < settings.max_iter; ++iter) {
    // Residuals of the homogeneous embedding.
    Vec hrx = -(ex.At * y + ex.Gt * z + ex.c * tau);
    Vec hry = ex.A * x - ex.b * tau;
    Vec hrz = s + ex.G * x - ex.h * tau;
    const double hrt = kappa + ex.c.dot(x) + ex.b.dot(y) + ex.h.dot(z);

    // Convergence bookkeeping on the de-homogenized point.
    const double pcost = ex.c.dot(x) / tau;
    const double dcost = -(ex.b.dot(y) + ex.h.dot(z)) / tau;
    const double gap = s.dot(z) / (tau * tau);
    const double relgap = gap / std::max({1.0, std::abs(pcost), std::abs(dcost)});
    const double pres =
        std::max((ex.A * (x / tau) - ex.b).norm() / bnorm,
                 (ex.G * (x / tau) + s / tau - ex.h).norm() / hnorm);
    const double dres =
        (ex.At * (y / tau) + ex.Gt * (z / tau) + ex.c).norm() / cnorm;

    res.primal_obj = pcost / ex.obj_scale;
    res.dual_obj = dcost / ex.obj_scale;
    res.gap = gap / ex.obj_scale;
    res.rel_gap = relgap;
    res.primal_res = pres;
    res.dual_res = dres;

    if (settings.verbose) {
      std::printf(
          "iter %3d  pcost % .6e  gap %.3e  pres %.3e  dres %.3e  tau %.2e "
          "kap %.2e\n",
          iter, res.primal_obj, gap, pres, dres, tau, kappa);
    }

    if (pres <= settings.tol_feas && dres <= settings.tol_feas &&
        relgap <= settings.tol_gap) {
      return finish(SolveStatus::Optimal, x / tau, y / tau, z / tau, s / tau,
                    iter);
    }
    // Certificates of infeasibility.
    const double byhz = ex.b.dot(y) + ex.h.dot(z);
    if (byhz < 0.0) {
      const double pinf = (ex.At * y + ex.Gt * z).norm() / (-byhz);
      if (pinf <= settings.tol_feas * 100.0 && kappa > 1e6 * tau) {
        return finish(SolveStatus::PrimalInfeasible, x, y / (-byhz),
                      z / (-byhz), s, iter);
      }
    }
    const double ctx = ex.c.dot(x);
    if (ctx < 0.0) {
      const double dinf =
          std::max((ex.A * x).norm(), (ex.G * x + s).norm()) / (-ctx);
      if (dinf <= settings.tol_feas * 100.0 && kappa > 1e6 * tau) {
        return finish(SolveStatus::DualUnbounded, x / (-ctx), y, z, s / (-ctx),
                      iter);
      }
    }

    Scaling sc = compute_scaling(ex, s, z);
    const double mu = (s.dot(z) + tau * kappa) / nu;
    kkt.factor(sc);

    // Direction for the tau column, reused by both passes.
    Vec rhs1(n + p + m);
    rhs1.head(n) = -ex.c;
    rhs1.segment(n, p) = ex.b;
    rhs1.tail(m) = ex.h;
    Vec u_tau = kkt.solve(rhs1);
    const double tau_den = -kappa / tau + ex.c.dot(u_tau.head(n)) +
                           ex.b.dot(u_tau.segment(n, p)) +
                           ex.h.dot(u_tau.tail(m));

    auto newton = [&](double eta_r, const Vec& dsvec, double dkap, Vec& dx,
                      Vec& dy, Vec& dz, Vec& ds, double& dtau,
                      double& dkappa) {
      Vec dsl = jordan_solve(ex, sc.lambda, dsvec);
      Vec rhs2(n + p + m);
      rhs2.head(n) = eta_r * hrx;
      rhs2.segment(n, p) = -eta_r * hry;
      rhs2.tail(m) = -eta_r * hrz + apply_W(ex, sc, dsl);
      Vec u2 = kkt.solve(rhs2);
      const double num = -eta_r * hrt + dkap / tau -
                         (ex.c.dot(u2.head(n)) + ex.b.dot(u2.segment(n, p)) +
                          ex.h.dot(u2.tail(m)));
      dtau = num / tau_den;
      dx = u2.head(n) + dtau * u_tau.head(n);
      dy = u2.segment(n, p) + dtau * u_tau.segment(n, p);
      dz = u2.tail(m) + dtau * u_tau.tail(m);
      ds = -apply_W(ex, sc, dsl + apply_W(ex, sc, dz));
      dkappa = -(dkap + kappa * dtau) / tau;
    };

    // Affine (predictor) direction.
    Vec lam_lam = jordan_prod(ex, sc.lambda, sc.lambda);
    Vec dx_a(n), dy_a(p), dz_a(m), ds_a(m);
    double dtau_a = 0.0, dkappa_a = 0.0;
    newton(1.0, lam_lam, tau * kappa, dx_a, dy_a, dz_a, ds_a, dtau_a,
           dkappa_a);

    double alpha_a = max_step(ex, s, ds_a, kInf);
    alpha_a = std::min(alpha_a, max_step(ex, z, dz_a, kInf));
    if (dtau_a < 0.0) alpha_a = std::min(alpha_a, -tau / dtau_a);
    if (dkappa_a < 0.0) alpha_a = std::min(alpha_a, -kappa / dkappa_a);
    alpha_a = std::min(alpha_a, 1.0);

    const double sigma = std::pow(1.0 - alpha_a, 3);

    // Combined (corrector) direction with Mehrotra second-order term.
    Vec corr = jordan_prod(ex, apply_Winv(ex, sc, ds_a), apply_W(ex, sc, dz_a));
    Vec ds_comb = lam_lam + corr - sigma * mu * cone_identity(ex);
    const double dkap_comb = tau * kappa + dtau_a * dkappa_a - sigma * mu;

    Vec dx(n), dy(p), dz(m), ds(m);
    double dtau = 0.0, dkappa = 0.0;
    newton(1.0 - sigma, ds_comb, dkap_comb, dx, dy, dz, ds, dtau, dkappa);

    double alpha = max_step(ex, s, ds, kInf);
    alpha = std::min(alpha, max_step(ex, z, dz, kInf));
    if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
    if (dkappa < 0.0) alpha = std::min(alpha, -kappa / dkappa);
    alpha = std::min(0.99 * alpha, 1.0);

    if (!(alpha > 1e-10) || !std::isfinite(alpha)) {
      return finish(SolveStatus::NumericalLimit, x / tau, y / tau, z / tau,
                    s / tau, iter);
    }

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }

  return finish(SolveStatus::NumericalLimit, x / tau, y / tau, z / tau,
                s / tau, iter);
}

}  // namespace shipplan
