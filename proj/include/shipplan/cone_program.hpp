#pragma once

#include <string>
#include <vector>

namespace shipplan {

/// Sparse triplet.
struct Triplet {
  int row = 0;
  int col = 0;
  double val = 0.0;
};

enum class ConeKind {
  Nonnegative,         // each row r: (h - Gx)_r >= 0
  SecondOrder,         // (t, u): t >= ||u||_2
  RotatedSecondOrder,  // (v, w, u): v,w >= 0, ||u||^2 <= v*w
};

struct ConeBlock {
  ConeKind kind = ConeKind::Nonnegative;
  int offset = 0;  // first row in (G, h)
  int dim = 0;
};

/// Linear expression over program variables, constant + sum coef*x.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  explicit LinExpr(double c) : constant(c) {}
  static LinExpr var(int index, double coef = 1.0) {
    LinExpr e;
    e.terms.push_back({index, coef});
    return e;
  }
  LinExpr& add(int index, double coef) {
    if (coef != 0.0) terms.push_back({index, coef});
    return *this;
  }
  LinExpr& add_const(double c) {
    constant += c;
    return *this;
  }
};

/// Canonical conic program
///   min c'x   s.t.   A x = b,   h - G x in K,
/// with K a product of nonnegative, second-order and rotated second-order
/// cones, plus bookkeeping that ties every scalar variable and constraint
/// row back to a named quantity at a discretization node.
struct ConeProgram {
  int num_vars = 0;
  std::vector<double> c;

  std::vector<Triplet> A;
  std::vector<double> b;

  std::vector<Triplet> G;
  std::vector<double> h;
  std::vector<ConeBlock> cones;

  struct VarInfo {
    std::string quantity;
    int node = -1;
  };
  struct RowInfo {
    std::string klass;
    int node = -1;
  };
  std::vector<VarInfo> var_info;
  std::vector<RowInfo> eq_info;    // one per equality row
  std::vector<RowInfo> cone_info;  // one per cone block

  int num_eq_rows() const { return static_cast<int>(b.size()); }
  int num_cone_rows() const { return static_cast<int>(h.size()); }

  int add_var(const std::string& quantity, int node);

  /// expr == 0
  void add_eq(const LinExpr& expr, const std::string& klass, int node);
  /// expr >= 0 (one-row nonnegative block)
  void add_nonneg(const LinExpr& expr, const std::string& klass, int node);
  /// ||u||^2 <= v*w with v, w >= 0
  void add_rsoc(const LinExpr& v, const LinExpr& w, const LinExpr& u,
                const std::string& klass, int node);
  /// t >= ||u||
  void add_soc(const LinExpr& t, const std::vector<LinExpr>& u,
               const std::string& klass, int node);

  /// Dimension consistency and one-bookkeeping-entry-per-variable checks.
  void verify() const;
};

}  // namespace shipplan
