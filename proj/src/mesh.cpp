#include "plategamma/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace pg {

void PlateMesh::locate(double x1, double x2, int* ei, int* ej, double* s,
                       double* t) const {
  int i = std::clamp(static_cast<int>(std::floor(x1 / hx())), 0, nx - 1);
  int j = std::clamp(static_cast<int>(std::floor(x2 / hy())), 0, ny - 1);
  *ei = i;
  *ej = j;
  *s = x1 / hx() - i;
  *t = x2 / hy() - j;
}

std::vector<PlateMesh::BoundarySegment> PlateMesh::free_segments() const {
  std::vector<BoundarySegment> out;
  if (!clamped[kX0])
    for (int j = 0; j < ny; ++j) out.push_back({0, j, kX0});
  if (!clamped[kX1])
    for (int j = 0; j < ny; ++j) out.push_back({nx - 1, j, kX1});
  if (!clamped[kY0])
    for (int i = 0; i < nx; ++i) out.push_back({i, 0, kY0});
  if (!clamped[kY1])
    for (int i = 0; i < nx; ++i) out.push_back({i, ny - 1, kY1});
  return out;
}

}  // namespace pg
