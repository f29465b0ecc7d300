#pragma once

#include <array>
#include <vector>

#include "plategamma/common.hpp"

namespace pg {

// Edge ids of the rectangle (0, l1) x (0, l2): x1 = 0, x1 = l1, x2 = 0,
// x2 = l2.
enum Edge : int { kX0 = 0, kX1 = 1, kY0 = 2, kY1 = 3 };

// Structured rectangular grid over the midplane.  The clamped part of the
// boundary is a nonempty union of whole edges.
struct PlateMesh {
  double l1 = 1.0, l2 = 1.0;
  int nx = 1, ny = 1;
  std::array<bool, 4> clamped = {true, true, true, true};

  PlateMesh() = default;
  PlateMesh(double l1_, double l2_, int nx_, int ny_,
            std::array<bool, 4> clamped_ = {true, true, true, true})
      : l1(l1_), l2(l2_), nx(nx_), ny(ny_), clamped(clamped_) {
    if (nx < 1 || ny < 1) throw Error("PlateMesh: empty grid");
    if (!(clamped[0] || clamped[1] || clamped[2] || clamped[3]))
      throw Error("PlateMesh: at least one clamped edge is required");
  }

  double hx() const { return l1 / nx; }
  double hy() const { return l2 / ny; }
  int n_nodes() const { return (nx + 1) * (ny + 1); }
  int n_elems() const { return nx * ny; }
  int node(int i, int j) const { return j * (nx + 1) + i; }
  double node_x1(int i) const { return l1 * i / nx; }
  double node_x2(int j) const { return l2 * j / ny; }

  bool node_clamped(int i, int j) const {
    return (clamped[kX0] && i == 0) || (clamped[kX1] && i == nx) ||
           (clamped[kY0] && j == 0) || (clamped[kY1] && j == ny);
  }

  // Local corner order (0,0), (1,0), (1,1), (0,1).
  std::array<int, 4> elem_nodes(int ei, int ej) const {
    return {node(ei, ej), node(ei + 1, ej), node(ei + 1, ej + 1),
            node(ei, ej + 1)};
  }

  // Element containing (x1, x2); clamps to the grid.
  void locate(double x1, double x2, int* ei, int* ej, double* s,
              double* t) const;

  // Boundary segments lying on free edges, as (element, edge) pairs.
  struct BoundarySegment {
    int ei, ej;
    Edge edge;
  };
  std::vector<BoundarySegment> free_segments() const;
};

// Structured hexahedral grid on the rescaled body: the plate grid extruded
// through the thickness.  The displacement is constrained on the lateral
// faces above the clamped midplane edges.
struct BrickMesh3D {
  PlateMesh base;
  int nz = 1;
  double z0 = -0.5, z1 = 0.5;

  BrickMesh3D() = default;
  BrickMesh3D(PlateMesh base_, int nz_, double z0_ = -0.5, double z1_ = 0.5)
      : base(std::move(base_)), nz(nz_), z0(z0_), z1(z1_) {
    if (nz < 1) throw Error("BrickMesh3D: empty grid");
  }

  double hz() const { return (z1 - z0) / nz; }
  int n_nodes() const { return base.n_nodes() * (nz + 1); }
  int n_elems() const { return base.n_elems() * nz; }
  int node(int i, int j, int k) const { return k * base.n_nodes() + base.node(i, j); }
  double node_x3(int k) const { return z0 + (z1 - z0) * k / nz; }

  bool node_constrained(int i, int j) const { return base.node_clamped(i, j); }

  // Local order: bottom face (0,0), (1,0), (1,1), (0,1), then top face.
  std::array<int, 8> elem_nodes(int ei, int ej, int ek) const {
    auto b = base.elem_nodes(ei, ej);
    return {node(0, 0, ek) - node(0, 0, 0) + b[0],
            node(0, 0, ek) - node(0, 0, 0) + b[1],
            node(0, 0, ek) - node(0, 0, 0) + b[2],
            node(0, 0, ek) - node(0, 0, 0) + b[3],
            node(0, 0, ek + 1) - node(0, 0, 0) + b[0],
            node(0, 0, ek + 1) - node(0, 0, 0) + b[1],
            node(0, 0, ek + 1) - node(0, 0, 0) + b[2],
            node(0, 0, ek + 1) - node(0, 0, 0) + b[3]};
  }
};

}  // namespace pg
