#include "hill.hpp"

#include "dynamics.hpp"
#include "error.hpp"
#include "parallel.hpp"

#include <cmath>
#include <limits>

namespace sectionscope {

std::size_t HillGrid::index(int i, int j, int k) const {
  const auto n = static_cast<std::size_t>(resolution);
  return (static_cast<std::size_t>(k) * n + static_cast<std::size_t>(j)) * n + static_cast<std::size_t>(i);
}

Vec3 HillGrid::cell_center(int i, int j, int k) const {
  const Vec3 h = (box.hi - box.lo) / resolution;
  Vec3 x = box.lo + Vec3((i + 0.5) * h.x(), (j + 0.5) * h.y(), (k + 0.5) * h.z());
  if (planar) x.z() = 0.0;
  return x;
}

int HillGrid::bounded_count() const {
  int n = 0;
  for (bool u : unbounded) n += u ? 0 : 1;
  return n;
}

namespace {

bool cell_holds(const Vec3& center, const Vec3& half, const Vec3& point, bool planar) {
  for (int a = 0; a < (planar ? 2 : 3); ++a) {
    if (std::abs(point[a] - center[a]) > half[a]) return false;
  }
  return !planar || point.z() == 0.0;
}

void sample(HillGrid& g, const MassRatio& mu) {
  const int n = g.resolution;
  const int nk = g.planar ? 1 : n;
  g.potential.assign(static_cast<std::size_t>(n) * n * nk, 0.0);
  g.inside.assign(g.potential.size(), 0);
  const Vec3 half = 0.5 * (g.box.hi - g.box.lo) / n;

  parallel_for(static_cast<std::size_t>(n) * nk, [&](std::size_t row) {
    const int j = static_cast<int>(row % n);
    const int k = static_cast<int>(row / n);
    for (int i = 0; i < n; ++i) {
      const Vec3 x = g.cell_center(i, j, k);
      const std::size_t id = g.index(i, j, k);
      bool holds_primary = false;
      if (mu.moon_mass() > 0.0 && cell_holds(x, half, mu.moon(), g.planar)) holds_primary = true;
      if (mu.earth_mass() > 0.0 && cell_holds(x, half, mu.earth(), g.planar)) holds_primary = true;
      double u = -std::numeric_limits<double>::infinity();
      if (nearest_primary(x, mu).second >= kCollisionThreshold) u = effective_potential(x, mu);
      g.potential[id] = u;
      g.inside[id] = (holds_primary || u <= g.c) ? 1 : 0;
    }
  });
}

void label(HillGrid& g) {
  const int n = g.resolution;
  const int nk = g.planar ? 1 : n;
  g.labels.assign(g.inside.size(), -1);
  g.components = 0;
  g.component_sizes.clear();
  g.unbounded.clear();
  std::vector<std::size_t> stack;
  for (int k = 0; k < nk; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t seed = g.index(i, j, k);
        if (!g.inside[seed] || g.labels[seed] >= 0) continue;
        const int id = g.components++;
        std::size_t size = 0;
        bool touches = false;
        g.labels[seed] = id;
        stack.push_back(seed);
        while (!stack.empty()) {
          const std::size_t cur = stack.back();
          stack.pop_back();
          ++size;
          const int ci = static_cast<int>(cur % n);
          const int cj = static_cast<int>((cur / n) % n);
          const int ck = static_cast<int>(cur / (static_cast<std::size_t>(n) * n));
          if (ci == 0 || cj == 0 || ci == n - 1 || cj == n - 1 || (!g.planar && (ck == 0 || ck == n - 1))) {
            touches = true;
          }
          const int dk_lo = g.planar ? 0 : -1;
          const int dk_hi = g.planar ? 0 : 1;
          for (int dk = dk_lo; dk <= dk_hi; ++dk) {
            for (int dj = -1; dj <= 1; ++dj) {
              for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0 && dk == 0) continue;
                const int ni = ci + di, nj = cj + dj, nkk = ck + dk;
                if (ni < 0 || nj < 0 || nkk < 0 || ni >= n || nj >= n || nkk >= nk) continue;
                const std::size_t nb = g.index(ni, nj, nkk);
                if (g.inside[nb] && g.labels[nb] < 0) {
                  g.labels[nb] = id;
                  stack.push_back(nb);
                }
              }
            }
          }
        }
        g.component_sizes.push_back(size);
        g.unbounded.push_back(touches);
      }
    }
  }
}

}  // namespace

HillGrid hill_components(double c, const MassRatio& mu, const GridBox& box, int resolution, bool planar,
                         bool check_resolution) {
  if (resolution < 2) fail(ErrorCode::kInvalidArgument, "grid resolution must be at least 2");
  for (int a = 0; a < 3; ++a) {
    if (!(box.hi[a] > box.lo[a])) fail(ErrorCode::kInvalidArgument, "grid box has non-positive extent");
  }
  HillGrid g;
  g.c = c;
  g.resolution = resolution;
  g.planar = planar;
  g.box = box;
  sample(g, mu);
  label(g);
  if (check_resolution) {
    const HillGrid fine = hill_components(c, mu, box, 2 * resolution, planar, false);
    g.resolution_checked = true;
    g.components_at_double = fine.components;
    g.resolution_warning = fine.components != g.components;
  }
  return g;
}

}  // namespace sectionscope
