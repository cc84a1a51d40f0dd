#ifndef FBLF_LEARNER_HPP
#define FBLF_LEARNER_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

namespace fblf {

/// Uniform grid t_i = i T / N on [0, T], i = 0..N.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t nodes() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return dt_; }
  /// Exact T at i = N.
  double node(std::size_t i) const;
  /// Interval index i and fraction in [0, 1] with t = t_i + frac dt.
  /// Throws std::out_of_range outside [0, T].
  std::pair<std::size_t, double> locate(double t) const;

 private:
  double horizon_;
  std::size_t steps_;
  double dt_;
};

double sat(double value, double bound);
/// Component-wise clamp to [-bound, bound].
Eigen::VectorXd sat(const Eigen::VectorXd& v, double bound);

/// Node-wise memory of the unsaturated estimate theta*. Reads always go
/// through saturation, so every value handed out satisfies |.|_inf <= bound.
/// The initial memory is zero.
class ParamMemory {
 public:
  ParamMemory(TimeGrid grid, int dim, double bound);

  struct NodeUpdate {
    Eigen::VectorXd theta_star;
    Eigen::VectorXd theta_hat;
  };

  /// theta*_new = sat(theta*_old) + gamma z; stores theta*_new at node i and
  /// returns it together with sat(theta*_new).
  NodeUpdate update_node(std::size_t i, const Eigen::VectorXd& z, double gamma);

  /// Linear interpolation of sat(theta*) between the neighbouring nodes.
  Eigen::VectorXd read(double t) const;

  Eigen::VectorXd theta_star(std::size_t i) const;
  Eigen::VectorXd theta_hat(std::size_t i) const;

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }
  double bound() const noexcept { return bound_; }

  /// Columns: node, component, theta_star, theta_hat.
  void write_csv(std::ostream& os) const;

 private:
  void check_index(std::size_t i) const;

  TimeGrid grid_;
  int dim_;
  double bound_;
  std::vector<Eigen::VectorXd> theta_star_;
};

}  // namespace fblf

#endif  // FBLF_LEARNER_HPP
