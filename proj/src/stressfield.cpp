#include "plategamma/stressfield.hpp"

#include <cmath>

namespace pg {

void StressField::check_same_grid(const StressField& other) const {
  const QuadGrid& a = *grid_;
  const QuadGrid& b = *other.grid_;
  if (grid_ == other.grid_) return;
  if (a.columns() != b.columns() || a.levels() != b.levels())
    throw Error("StressField: mismatched quadrature sampling");
  for (int c = 0; c < a.columns(); ++c)
    if (a.plane.x1[c] != b.plane.x1[c] || a.plane.x2[c] != b.plane.x2[c])
      throw Error("StressField: mismatched quadrature sampling");
}

double StressField::l2_norm() const {
  double acc = 0;
  for (int c = 0; c < grid_->columns(); ++c)
    for (int l = 0; l < grid_->levels(); ++l) {
      const Sym3& s = v_[grid_->index(c, l)];
      acc += grid_->weight(c, l) * s.dot(s);
    }
  return std::sqrt(acc);
}

double StressField::transverse_l2_norm() const {
  double acc = 0;
  for (int c = 0; c < grid_->columns(); ++c)
    for (int l = 0; l < grid_->levels(); ++l) {
      const Sym3& s = v_[grid_->index(c, l)];
      double s13 = s(0, 2), s23 = s(1, 2), s33 = s(2, 2);
      acc += grid_->weight(c, l) *
             (2 * s13 * s13 + 2 * s23 * s23 + s33 * s33);
    }
  return std::sqrt(acc);
}

double StressField::l2_distance(const StressField& other) const {
  check_same_grid(other);
  double acc = 0;
  for (int c = 0; c < grid_->columns(); ++c)
    for (int l = 0; l < grid_->levels(); ++l) {
      Sym3 d = v_[grid_->index(c, l)] - other.v_[grid_->index(c, l)];
      acc += grid_->weight(c, l) * d.dot(d);
    }
  return std::sqrt(acc);
}

StressField StressField::operator-(const StressField& other) const {
  check_same_grid(other);
  StressField out(grid_);
  for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] = v_[i] - other.v_[i];
  return out;
}

void StressField::resultants(std::vector<Sym2>* n, std::vector<Sym2>* m) const {
  n->assign(grid_->columns(), Sym2());
  m->assign(grid_->columns(), Sym2());
  for (int c = 0; c < grid_->columns(); ++c)
    for (int l = 0; l < grid_->levels(); ++l) {
      Sym2 p = plane_part(v_[grid_->index(c, l)]);
      (*n)[c] += grid_->rule.w[l] * p;
      (*m)[c] += (grid_->rule.w[l] * grid_->rule.x[l]) * p;
    }
}

StressField StressField::project_affine() const {
  std::vector<Sym2> n, m;
  resultants(&n, &m);
  StressField out(grid_);
  for (int c = 0; c < grid_->columns(); ++c)
    for (int l = 0; l < grid_->levels(); ++l) {
      const Sym3& s = v_[grid_->index(c, l)];
      Sym2 plane = n[c] + (12.0 * grid_->rule.x[l]) * m[c];
      out.v_[grid_->index(c, l)] = assemble_sym3(plane, s.i3_vector());
    }
  return out;
}

double l2_distance(const InPlaneQuad& grid, const std::vector<Sym2>& a,
                   const std::vector<Sym2>& b) {
  if (a.size() != b.size() || static_cast<int>(a.size()) != grid.size())
    throw Error("l2_distance: mismatched sampling");
  double acc = 0;
  for (int c = 0; c < grid.size(); ++c) {
    Sym2 d = a[c] - b[c];
    acc += grid.w[c] * d.dot(d);
  }
  return std::sqrt(acc);
}

}  // namespace pg
