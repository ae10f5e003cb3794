#include "cauchygof/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace cauchygof {

namespace {

using Point = std::array<double, 2>;

Point lerp(const Point& from, const Point& to, double t) {
  return {from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])};
}

double distance(const Point& a, const Point& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(const Point&)>& f, Point start,
    double initial_step, double diameter_tol, std::size_t max_iterations) {
  std::array<Point, 3> p = {start, start, start};
  p[1][0] += initial_step;
  p[2][1] += initial_step;
  std::array<double, 3> v = {f(p[0]), f(p[1]), f(p[2])};

  NelderMeadResult result;
  for (; result.iterations < max_iterations; ++result.iterations) {
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return v[a] < v[b]; });
    const int best = order[0], mid = order[1], worst = order[2];

    const double diameter = std::max({distance(p[0], p[1]),
                                      distance(p[0], p[2]),
                                      distance(p[1], p[2])});
    if (diameter < diameter_tol) {
      result.converged = true;
      break;
    }

    const Point centroid = lerp(p[best], p[mid], 0.5);
    const Point reflected = lerp(p[worst], centroid, 2.0);
    const double fr = f(reflected);

    if (fr < v[best]) {
      const Point expanded = lerp(p[worst], centroid, 3.0);
      const double fe = f(expanded);
      if (fe < fr) {
        p[worst] = expanded;
        v[worst] = fe;
      } else {
        p[worst] = reflected;
        v[worst] = fr;
      }
      continue;
    }
    if (fr < v[mid]) {
      p[worst] = reflected;
      v[worst] = fr;
      continue;
    }
    // Contraction, outside or inside.
    const bool outside = fr < v[worst];
    const Point contracted =
        outside ? lerp(centroid, reflected, 0.5) : lerp(centroid, p[worst], 0.5);
    const double fc = f(contracted);
    if (fc < (outside ? fr : v[worst])) {
      p[worst] = contracted;
      v[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (int i : {mid, worst}) {
      p[i] = lerp(p[best], p[i], 0.5);
      v[i] = f(p[i]);
    }
  }

  const auto best = std::min_element(v.begin(), v.end()) - v.begin();
  result.x = p[best];
  result.value = v[best];
  return result;
}

}  // namespace cauchygof
