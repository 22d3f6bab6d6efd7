#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace chlab {

/// Right-hand side f(t, y, dy); dy is pre-sized to y.size().
using OdeRhs = std::function<void(double, const std::vector<double>&,
                                  std::vector<double>&)>;

/// Called after every accepted step; returning false halts integration
/// (reported as halted_by_observer).
using OdeObserver =
    std::function<bool(double, const std::vector<double>&)>;

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 1e-4;
  double max_step = 0.0;  // 0 = span length
  std::size_t max_steps = 2'000'000;
};

/// One accepted step of the dense trajectory; stores the endpoint state and
/// derivative, plus the extra dense-output coefficient of the step ending
/// at this node, so any interior time can be reconstructed at the
/// integrator's order.
struct OdeNode {
  double t;
  std::vector<double> y;
  std::vector<double> dy;
  std::vector<double> c5;  // empty on the initial node
};

class OdeSolution {
 public:
  OdeSolution(std::vector<OdeNode> nodes, bool halted)
      : nodes_(std::move(nodes)), halted_(halted) {}

  double t_begin() const { return nodes_.front().t; }
  double t_end() const { return nodes_.back().t; }
  bool halted_by_observer() const { return halted_; }
  const std::vector<OdeNode>& nodes() const { return nodes_; }

  /// Dense-output evaluation; clamps t to the covered span.
  std::vector<double> at(double t) const;

 private:
  std::vector<OdeNode> nodes_;
  bool halted_;
};

/// Adaptive embedded Dormand-Prince 5(4). Integrates from t0 to t1
/// (t1 > t0), storing every accepted step. Throws std::runtime_error when
/// the step count budget is exhausted or the step size underflows.
OdeSolution integrate(const OdeRhs& rhs, std::vector<double> y0, double t0,
                      double t1, const OdeOptions& opts = {},
                      const OdeObserver& observer = {});

}  // namespace chlab
