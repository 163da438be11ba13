#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "branchlab/rng.hpp"

namespace branchlab {

/// Two free Gaussian packets with opposite drift, modeling the post-magnet
/// branches of a two-outcome measurement. Closed-form psi(x,t) in units
/// hbar = m = 1.
struct PacketPair {
  double a1 = 0.0, a2 = 0.0;    // branch amplitudes, |a1|^2 + |a2|^2 = 1
  double width = 1.0;           // initial packet width w
  double center1 = 0.0, center2 = 0.0;
  double velocity1 = 4.0, velocity2 = -4.0;

  static PacketPair make(double a1, double a2, double width = 1.0, double v = 4.0,
                         double center_offset = 0.0);

  std::complex<double> psi(double x, double t) const;
  std::complex<double> dpsi_dx(double x, double t) const;

  /// Spatial overlap integral of the two packet envelopes at time t.
  double envelope_overlap(double t) const;
  /// Smallest t with envelope overlap below `tol`; throws if unreachable.
  double separation_time(double tol = 1e-10) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> positions;
  int branch = 0;       // 1, 2, or 0 = unresolved
  bool stalled = false; // nodal-region stall
};

/// Guidance velocity v = Im(d_x psi / psi). Throws near nodes
/// (|psi| below the underflow floor).
double guidance_velocity(const PacketPair& p, double x, double t);

/// Adaptive RK4 integration of dx/dt = guidance_velocity, with branch
/// assignment by proximity to the packet centers at t_end.
Trajectory integrate_trajectory(const PacketPair& p, double x0, double dt, double t_end);

/// Inverse-CDF sample of |psi(x,0)|^2 on a fine grid.
std::vector<double> sample_initial_positions(const PacketPair& p, std::size_t count,
                                             std::uint64_t seed);

struct EquivarianceReport {
  double fraction1 = 0.0, fraction2 = 0.0;
  double target1 = 0.0, target2 = 0.0;
  double ci_halfwidth = 0.0;  // 3-sigma binomial
  std::size_t samples = 0;
  std::size_t unresolved = 0;
  bool pass = false;
};

EquivarianceReport equivariance_report(const PacketPair& p, std::size_t samples,
                                       std::uint64_t seed);

/// Same report for caller-supplied initial positions (e.g. a non-|psi|^2
/// density, which produces a Born violation).
EquivarianceReport equivariance_report_for(const PacketPair& p,
                                           const std::vector<double>& initial_positions);

struct ContextualityResult {
  int branch_plus = 0;   // assignment with separation widened by delta
  int branch_minus = 0;  // assignment with separation narrowed by delta
  bool flipped = false;
};

/// Integrates the same initial position under device placements shifted by
/// +/- delta and reports whether the branch assignment flips.
ContextualityResult contextuality_probe(const PacketPair& p, double x0, double delta);

}  // namespace branchlab
