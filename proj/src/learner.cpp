#include "fblf/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <ostream>
#include <stdexcept>

namespace fblf {

TimeGrid::TimeGrid(double horizon, std::size_t steps)
    : horizon_(horizon), steps_(steps), dt_(horizon / static_cast<double>(steps)) {
  if (steps < 2) throw std::invalid_argument("time grid needs at least two steps");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("time grid needs a positive finite horizon");
  }
}

double TimeGrid::node(std::size_t i) const {
  if (i > steps_) throw std::out_of_range(fmt::format("node {} beyond {}", i, steps_));
  return horizon_ * static_cast<double>(i) / static_cast<double>(steps_);
}

std::pair<std::size_t, double> TimeGrid::locate(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw std::out_of_range(fmt::format("time {} outside [0, {}]", t, horizon_));
  }
  auto i = static_cast<std::size_t>(std::floor(t / dt_));
  i = std::min(i, steps_ - 1);
  const double frac = std::clamp((t - node(i)) / dt_, 0.0, 1.0);
  return {i, frac};
}

double sat(double value, double bound) { return std::clamp(value, -bound, bound); }

Eigen::VectorXd sat(const Eigen::VectorXd& v, double bound) {
  return v.cwiseMax(-bound).cwiseMin(bound);
}

ParamMemory::ParamMemory(TimeGrid grid, int dim, double bound)
    : grid_(grid), dim_(dim), bound_(bound), theta_star_(grid.nodes(), Eigen::VectorXd::Zero(dim)) {
  if (dim < 1) throw std::invalid_argument("parameter dimension must be positive");
  if (!(bound > 0.0)) throw std::invalid_argument("saturation bound must be positive");
}

void ParamMemory::check_index(std::size_t i) const {
  if (i >= theta_star_.size()) {
    throw std::out_of_range(fmt::format("node {} outside memory of {} nodes", i, theta_star_.size()));
  }
}

ParamMemory::NodeUpdate ParamMemory::update_node(std::size_t i, const Eigen::VectorXd& z,
                                                 double gamma) {
  check_index(i);
  if (z.size() != dim_) {
    throw std::invalid_argument(fmt::format("z has size {}, memory has {}", z.size(), dim_));
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("learning gain must be positive");
  auto& slot = theta_star_[i];
  slot = sat(slot, bound_) + gamma * z;
  return {slot, sat(slot, bound_)};
}

Eigen::VectorXd ParamMemory::read(double t) const {
  const auto [i, frac] = grid_.locate(t);
  const Eigen::VectorXd lo = sat(theta_star_[i], bound_);
  if (frac == 0.0) return lo;
  const Eigen::VectorXd hi = sat(theta_star_[i + 1], bound_);
  if (frac == 1.0) return hi;
  // Re-clamp: the convex combination can round one ulp past the bound.
  return sat(((1.0 - frac) * lo + frac * hi).eval(), bound_);
}

Eigen::VectorXd ParamMemory::theta_star(std::size_t i) const {
  check_index(i);
  return theta_star_[i];
}

Eigen::VectorXd ParamMemory::theta_hat(std::size_t i) const {
  check_index(i);
  return sat(theta_star_[i], bound_);
}

void ParamMemory::write_csv(std::ostream& os) const {
  os << "node,component,theta_star,theta_hat\n";
  for (std::size_t i = 0; i < theta_star_.size(); ++i) {
    for (int c = 0; c < dim_; ++c) {
      const double raw = theta_star_[i](c);
      fmt::print(os, "{},{},{:.17g},{:.17g}\n", i, c, raw, sat(raw, bound_));
    }
  }
}

}  // namespace fblf
