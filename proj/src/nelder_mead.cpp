#include "irmap/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace irmap {

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f,
                             const Vector& start, double initial_step,
                             double tol, int max_iterations) {
  const int dim = static_cast<int>(start.size());
  const int n_points = dim + 1;

  std::vector<Vector> simplex(n_points, start);
  std::vector<double> values(n_points);
  for (int i = 0; i < dim; ++i) simplex[i + 1](i) += initial_step;
  for (int i = 0; i < n_points; ++i) values[i] = f(simplex[i]);

  std::vector<int> order(n_points);
  NelderMeadResult result;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[a] < values[b]; });
    const int best = order.front();
    const int worst = order.back();
    const int second_worst = order[n_points - 2];

    double diameter = 0.0;
    for (int i = 1; i < n_points; ++i) {
      diameter = std::max(diameter,
                          (simplex[order[i]] - simplex[best]).norm());
    }
    if (std::abs(values[worst] - values[best]) <= tol &&
        diameter <= std::sqrt(tol)) {
      result.converged = true;
      break;
    }

    Vector centroid = Vector::Zero(dim);
    for (int i = 0; i < n_points; ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= dim;

    const Vector reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = f(reflected);

    if (f_reflected < values[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
    } else if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
    } else {
      const Vector contracted =
          centroid + 0.5 * (simplex[worst] - centroid);
      const double f_contracted = f(contracted);
      if (f_contracted < values[worst]) {
        simplex[worst] = contracted;
        values[worst] = f_contracted;
      } else {
        for (int i = 0; i < n_points; ++i) {
          if (i == best) continue;
          simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
          values[i] = f(simplex[i]);
        }
      }
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  result.value = *best_it;
  result.iterations = iter;
  return result;
}

}  // namespace irmap
