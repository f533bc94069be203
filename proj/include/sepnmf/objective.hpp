#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sepnmf {

/// A strongly convex function f with f(0) = 0 and grad f(0) = 0, used as the
/// semi-metric for projections. mu and lipschitz are carried explicitly
/// because the fast gradient step size needs the Lipschitz constant.
struct ObjectiveFunction {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  double mu = 0.0;         // strong-convexity parameter, > 0
  double lipschitz = 0.0;  // gradient Lipschitz constant, >= mu
};

/// f(x) = ||x||_2^2 with mu = L = 2, the default choice everywhere.
inline ObjectiveFunction squared_l2_objective() {
  ObjectiveFunction f;
  f.value = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  };
  f.gradient = [](std::span<const double> x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
    return g;
  };
  f.mu = 2.0;
  f.lipschitz = 2.0;
  return f;
}

}  // namespace sepnmf
