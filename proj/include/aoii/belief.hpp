#pragma once

#include <cmath>
#include <stdexcept>

#include "aoii/model.hpp"

namespace aoii {

// Distribution of the age of incorrect information conditioned on the age of
// the newest delivered sample. mass[i] = Pr{AoII = i}, i = 0..theta.
struct BeliefVector {
  int theta = 0;
  std::vector<double> mass;

  double sum() const {
    double s = 0.0;
    for (double v : mass) s += v;
    return s;
  }
  double expected_aoii() const {
    double s = 0.0;
    for (std::size_t i = 1; i < mass.size(); ++i) s += double(i) * mass[i];
    return s;
  }
};

inline void check_normalized(const BeliefVector& b, double tol = 1e-9) {
  if (b.mass.size() != std::size_t(b.theta) + 1)
    throw std::invalid_argument("belief: mass must have theta+1 entries");
  for (double v : b.mass)
    if (!(v >= -tol) || !std::isfinite(v))
      throw std::invalid_argument("belief: negative or non-finite mass");
  if (std::abs(b.sum() - 1.0) > tol)
    throw std::invalid_argument("belief: mass does not sum to 1");
}

namespace detail {
// Closed form for the AoII distribution n slots after a delivered sample,
// without the truncation-range check: entry 0 is g(n), entry i in 1..n is
// g(n-i) * (1-p) * p^(i-1).
inline std::vector<double> belief_closed_form(int n, double p) {
  std::vector<double> mass(std::size_t(n) + 1);
  mass[0] = g(n, p);
  for (int i = 1; i <= n; ++i)
    mass[std::size_t(i)] = g(n - i, p) * (1.0 - p) * pow_int(p, i - 1);
  return mass;
}
}  // namespace detail

// One-step filter update. Idle shifts mass up while the source may drift back
// onto the estimate; Act resynchronizes, leaving only the one-slot delivery
// delay: (p, 1-p, 0, ...).
inline BeliefVector belief_update(const BeliefVector& b, Action a, const ModelParams& m) {
  m.validate();
  check_normalized(b);
  if (a == Action::Act) return BeliefVector{1, {m.p, 1.0 - m.p}};
  BeliefVector out;
  out.theta = b.theta + 1;
  out.mass.assign(std::size_t(out.theta) + 1, 0.0);
  out.mass[0] = b.mass[0] * m.p + (1.0 - b.mass[0]) * (1.0 - m.p);
  out.mass[1] = (1.0 - m.p) * b.mass[0];
  for (int i = 2; i <= out.theta; ++i)
    out.mass[std::size_t(i)] = m.p * b.mass[std::size_t(i) - 1];
  return out;
}

inline BeliefVector belief_from_aoi(int theta, const ModelParams& m) {
  m.validate();
  if (theta < 1 || theta > m.n_max)
    throw std::invalid_argument("belief_from_aoi: theta=" + std::to_string(theta) +
                                " outside 1.." + std::to_string(m.n_max));
  return BeliefVector{theta, detail::belief_closed_form(theta, m.p)};
}

// Distance between the belief at age n1 and at age n2, viewing both as
// distributions on 0..n2: sup-norm over shared entries plus the tail mass the
// shorter vector cannot represent. Gauges how much resolution a truncation
// bound of n1 gives up relative to n2.
inline double truncation_gap(int n1, int n2, const ModelParams& m) {
  m.validate();
  if (n1 < 2 || n2 < n1)
    throw std::invalid_argument("truncation_gap: need 2 <= n1 <= n2");
  std::vector<double> a = detail::belief_closed_form(n1, m.p);
  std::vector<double> b = detail::belief_closed_form(n2, m.p);
  double gap = 0.0;
  for (int i = 0; i <= n1; ++i)
    gap = std::max(gap, std::abs(a[std::size_t(i)] - b[std::size_t(i)]));
  double tail = 0.0;
  for (int i = n1 + 1; i <= n2; ++i) tail += b[std::size_t(i)];
  return gap + tail;
}

}  // namespace aoii
