#include "shipplan/cone_program.hpp"

#include <set>
#include <stdexcept>

namespace shipplan {

int ConeProgram::add_var(const std::string& quantity, int node) {
  const int idx = num_vars++;
  c.push_back(0.0);
  var_info.push_back({quantity, node});
  return idx;
}

namespace {
// A cone row holds h_r - (Gx)_r = expr, i.e. h_r = expr.constant and
// G_{r,j} = -coef_j.
void push_cone_row(std::vector<Triplet>& G, std::vector<double>& h,
                   const LinExpr& expr) {
  const int row = static_cast<int>(h.size());
  h.push_back(expr.constant);
  for (const auto& [var, coef] : expr.terms) {
    G.push_back({row, var, -coef});
  }
}
}  // namespace

void ConeProgram::add_eq(const LinExpr& expr, const std::string& klass,
                         int node) {
  const int row = num_eq_rows();
  b.push_back(-expr.constant);
  for (const auto& [var, coef] : expr.terms) {
    A.push_back({row, var, coef});
  }
  eq_info.push_back({klass, node});
}

void ConeProgram::add_nonneg(const LinExpr& expr, const std::string& klass,
                             int node) {
  const int offset = num_cone_rows();
  push_cone_row(G, h, expr);
  cones.push_back({ConeKind::Nonnegative, offset, 1});
  cone_info.push_back({klass, node});
}

void ConeProgram::add_rsoc(const LinExpr& v, const LinExpr& w,
                           const LinExpr& u, const std::string& klass,
                           int node) {
  const int offset = num_cone_rows();
  push_cone_row(G, h, v);
  push_cone_row(G, h, w);
  push_cone_row(G, h, u);
  cones.push_back({ConeKind::RotatedSecondOrder, offset, 3});
  cone_info.push_back({klass, node});
}

void ConeProgram::add_soc(const LinExpr& t, const std::vector<LinExpr>& u,
                          const std::string& klass, int node) {
  const int offset = num_cone_rows();
  push_cone_row(G, h, t);
  for (const LinExpr& e : u) push_cone_row(G, h, e);
  cones.push_back({ConeKind::SecondOrder, offset,
                   static_cast<int>(u.size()) + 1});
  cone_info.push_back({klass, node});
}

void ConeProgram::verify() const {
  if (static_cast<int>(c.size()) != num_vars ||
      static_cast<int>(var_info.size()) != num_vars) {
    throw std::logic_error("cone program: variable bookkeeping out of sync");
  }
  if (eq_info.size() != b.size() || cone_info.size() != cones.size()) {
    throw std::logic_error("cone program: row bookkeeping out of sync");
  }
  int rows = 0;
  for (const ConeBlock& blk : cones) {
    if (blk.offset != rows) {
      throw std::logic_error("cone program: non-contiguous cone blocks");
    }
    rows += blk.dim;
  }
  if (rows != num_cone_rows()) {
    throw std::logic_error("cone program: cone dims do not cover G");
  }
  for (const Triplet& t : A) {
    if (t.col < 0 || t.col >= num_vars || t.row < 0 ||
        t.row >= num_eq_rows()) {
      throw std::logic_error("cone program: A triplet out of range");
    }
  }
  for (const Triplet& t : G) {
    if (t.col < 0 || t.col >= num_vars || t.row < 0 ||
        t.row >= num_cone_rows()) {
      throw std::logic_error("cone program: G triplet out of range");
    }
  }
  std::set<std::pair<std::string, int>> seen;
  for (const VarInfo& vi : var_info) {
    if (!seen.insert({vi.quantity, vi.node}).second) {
      throw std::logic_error("cone program: duplicate bookkeeping entry " +
                             vi.quantity + "@" + std::to_string(vi.node));
    }
  }
}

}  // namespace shipplan
