#pragma once

#include <memory>
#include <vector>

#include "plategamma/quadrature.hpp"
#include "plategamma/reduction.hpp"
#include "plategamma/tensor.hpp"

namespace pg {

// Tensor quadrature set on the rescaled body: midplane columns, each
// carrying the same through-thickness rule.  Point (col, lev) sits at
// (x1[col], x2[col], rule.x[lev]) with weight w2[col] * rule.w[lev].
struct QuadGrid {
  InPlaneQuad plane;
  Rule1D rule;

  int columns() const { return plane.size(); }
  int levels() const { return rule.size(); }
  int size() const { return columns() * levels(); }
  int index(int col, int lev) const { return col * levels() + lev; }
  double weight(int col, int lev) const { return plane.w[col] * rule.w[lev]; }
};

// Symmetric tensor field sampled on a QuadGrid.
class StressField {
 public:
  StressField() = default;
  explicit StressField(std::shared_ptr<const QuadGrid> grid)
      : grid_(std::move(grid)), v_(grid_->size()) {}

  const QuadGrid& grid() const { return *grid_; }
  std::shared_ptr<const QuadGrid> grid_ptr() const { return grid_; }

  Sym3& at(int col, int lev) { return v_[grid_->index(col, lev)]; }
  const Sym3& at(int col, int lev) const { return v_[grid_->index(col, lev)]; }

  // L2 norm over the body, full tensor contraction as the pointwise square.
  double l2_norm() const;

  // L2 norm of the transverse components only (two shears and the normal).
  double transverse_l2_norm() const;

  double l2_distance(const StressField& other) const;

  StressField operator-(const StressField& other) const;

  // Zeroth and first thickness moments of the in-plane block, per column.
  void resultants(std::vector<Sym2>* n, std::vector<Sym2>* m) const;

  // Orthogonal projection onto the class of fields whose in-plane block is
  // affine in x3: in-plane part becomes N + 12 x3 M, transverse part kept.
  StressField project_affine() const;

 private:
  void check_same_grid(const StressField& other) const;

  std::shared_ptr<const QuadGrid> grid_;
  std::vector<Sym3> v_;
};

// L2(midplane) distance of sampled plane-tensor fields under the column
// weights.
double l2_distance(const InPlaneQuad& grid, const std::vector<Sym2>& a,
                   const std::vector<Sym2>& b);

}  // namespace pg
