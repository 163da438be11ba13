#include "branchlab/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace branchlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPsiFloor = 1e-30;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

struct Gaussian {
  std::complex<double> value;
  std::complex<double> dlog;  // d/dx log g
};

// Free Gaussian packet, hbar = m = 1:
//   g(x,t) = (2 pi w^2)^(-1/4) alpha^(-1/2)
//            exp(-(x-c-vt)^2 / (4 w^2 alpha) + i v (x-c) - i v^2 t / 2),
//   alpha = 1 + i t / (2 w^2).
Gaussian packet(double x, double t, double c, double v, double w) {
  const std::complex<double> alpha{1.0, t / (2.0 * w * w)};
  const double u = x - c - v * t;
  const std::complex<double> quad = -u * u / (4.0 * w * w * alpha);
  const std::complex<double> phase{0.0, v * (x - c) - 0.5 * v * v * t};
  const double norm = std::pow(2.0 * kPi * w * w, -0.25);
  Gaussian g;
  g.value = norm / std::sqrt(alpha) * std::exp(quad + phase);
  g.dlog = -u / (2.0 * w * w * alpha) + std::complex<double>{0.0, v};
  return g;
}

}  // namespace

PacketPair PacketPair::make(double a1, double a2, double width, double v,
                            double center_offset) {
  require(std::abs(a1 * a1 + a2 * a2 - 1.0) <= 1e-10, "PacketPair: amplitudes not normalized");
  require(width > 0.0, "PacketPair: width must be positive");
  PacketPair p;
  p.a1 = a1;
  p.a2 = a2;
  p.width = width;
  p.center1 = center_offset;
  p.center2 = -center_offset;
  p.velocity1 = v;
  p.velocity2 = -v;
  return p;
}

std::complex<double> PacketPair::psi(double x, double t) const {
  return a1 * packet(x, t, center1, velocity1, width).value +
         a2 * packet(x, t, center2, velocity2, width).value;
}

std::complex<double> PacketPair::dpsi_dx(double x, double t) const {
  const Gaussian g1 = packet(x, t, center1, velocity1, width);
  const Gaussian g2 = packet(x, t, center2, velocity2, width);
  return a1 * g1.value * g1.dlog + a2 * g2.value * g2.dlog;
}

double PacketPair::envelope_overlap(double t) const {
  const double sigma2 = width * width + t * t / (4.0 * width * width);
  const double d = std::abs((center1 + velocity1 * t) - (center2 + velocity2 * t));
  return std::exp(-d * d / (8.0 * sigma2));
}

double PacketPair::separation_time(double tol) const {
  for (double t = 0.0; t <= 200.0; t += 0.05)
    if (envelope_overlap(t) < tol) return t;
  throw std::invalid_argument("PacketPair: packets never separate below requested overlap");
}

double guidance_velocity(const PacketPair& p, double x, double t) {
  const std::complex<double> v = p.psi(x, t);
  if (std::abs(v) < kPsiFloor) throw std::domain_error("guidance_velocity: nodal region");
  return std::imag(p.dpsi_dx(x, t) / v);
}

namespace {

// One RK4 step; throws domain_error inside nodal regions.
double rk4_step(const PacketPair& p, double x, double t, double h) {
  const double k1 = guidance_velocity(p, x, t);
  const double k2 = guidance_velocity(p, x + 0.5 * h * k1, t + 0.5 * h);
  const double k3 = guidance_velocity(p, x + 0.5 * h * k2, t + 0.5 * h);
  const double k4 = guidance_velocity(p, x + h * k3, t + h);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Advance from t to t_next with step-doubling error control.
bool advance(const PacketPair& p, double& x, double t, double t_next, double tol) {
  double h = t_next - t;
  while (t < t_next - 1e-12) {
    h = std::min(h, t_next - t);
    bool ok = true;
    double full = x, half = x;
    try {
      full = rk4_step(p, x, t, h);
      half = rk4_step(p, x, t, 0.5 * h);
      half = rk4_step(p, half, t + 0.5 * h, 0.5 * h);
    } catch (const std::domain_error&) {
      ok = false;
    }
    const double err = std::abs(full - half);
    if (ok && err <= tol * (1.0 + std::abs(x))) {
      x = half + (half - full) / 15.0;  // local extrapolation
      t += h;
      if (err < 0.03 * tol) h *= 2.0;
    } else {
      h *= 0.5;
      if (h < 1e-9) return false;  // nodal-region stall
    }
  }
  return true;
}

int assign_branch(const PacketPair& p, double x, double t) {
  const double d1 = std::abs(x - (p.center1 + p.velocity1 * t));
  const double d2 = std::abs(x - (p.center2 + p.velocity2 * t));
  return d1 <= d2 ? 1 : 2;
}

}  // namespace

Trajectory integrate_trajectory(const PacketPair& p, double x0, double dt, double t_end) {
  require(dt > 0.0 && t_end > 0.0, "integrate_trajectory: dt, t_end must be positive");
  Trajectory tr;
  double x = x0;
  tr.times.push_back(0.0);
  tr.positions.push_back(x);
  for (double t = 0.0; t < t_end - 1e-12;) {
    const double t_next = std::min(t + dt, t_end);
    if (!advance(p, x, t, t_next, 1e-8)) {
      tr.stalled = true;
      tr.branch = 0;
      return tr;
    }
    t = t_next;
    tr.times.push_back(t);
    tr.positions.push_back(x);
  }
  const double t_sep = p.separation_time();
  tr.branch = t_end >= t_sep ? assign_branch(p, x, t_end) : 0;
  return tr;
}

std::vector<double> sample_initial_positions(const PacketPair& p, std::size_t count,
                                             std::uint64_t seed) {
  const double span = 8.0 * p.width + std::max(std::abs(p.center1), std::abs(p.center2));
  const std::size_t grid = 8192;
  std::vector<double> xs(grid), cdf(grid);
  double acc = 0.0;
  double prev = 0.0;
  const double dx = 2.0 * span / static_cast<double>(grid - 1);
  for (std::size_t i = 0; i < grid; ++i) {
    xs[i] = -span + static_cast<double>(i) * dx;
    const double dens = std::norm(p.psi(xs[i], 0.0));
    if (i > 0) acc += 0.5 * (prev + dens) * dx;
    prev = dens;
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;
  std::vector<double> out;
  out.reserve(count);
  Rng rng(seed);
  for (std::size_t s = 0; s < count; ++s) {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), grid - 1);
    if (hi == 0) {
      out.push_back(xs[0]);
      continue;
    }
    const double frac = (u - cdf[hi - 1]) / std::max(cdf[hi] - cdf[hi - 1], 1e-300);
    out.push_back(xs[hi - 1] + frac * dx);
  }
  return out;
}

EquivarianceReport equivariance_report_for(const PacketPair& p,
                                           const std::vector<double>& initial_positions) {
  EquivarianceReport rep;
  rep.samples = initial_positions.size();
  rep.target1 = p.a1 * p.a1;
  rep.target2 = p.a2 * p.a2;
  const double t_end = p.separation_time() + 0.5;
  std::size_t c1 = 0, c2 = 0;
  for (double x0 : initial_positions) {
    Trajectory tr = integrate_trajectory(p, x0, 0.1, t_end);
    if (tr.branch == 1)
      ++c1;
    else if (tr.branch == 2)
      ++c2;
    else
      ++rep.unresolved;
  }
  const double total = static_cast<double>(rep.samples);
  rep.fraction1 = static_cast<double>(c1) / total;
  rep.fraction2 = static_cast<double>(c2) / total;
  rep.ci_halfwidth = 3.0 * std::sqrt(std::max(rep.target1 * rep.target2, 1e-12) / total);
  rep.pass = rep.unresolved == 0 && std::abs(rep.fraction1 - rep.target1) <= rep.ci_halfwidth;
  return rep;
}

EquivarianceReport equivariance_report(const PacketPair& p, std::size_t samples,
                                       std::uint64_t seed) {
  return equivariance_report_for(p, sample_initial_positions(p, samples, seed));
}

ContextualityResult contextuality_probe(const PacketPair& p, double x0, double delta) {
  // Translate the whole device by +/- delta/2; the basin boundary moves with
  // it while the particle position stays fixed.
  auto shifted = [&](double sign) {
    PacketPair q = p;
    q.center1 += sign * 0.5 * delta;
    q.center2 += sign * 0.5 * delta;
    return q;
  };
  ContextualityResult res;
  const PacketPair plus = shifted(1.0);
  const PacketPair minus = shifted(-1.0);
  const double t_end = std::max(plus.separation_time(), minus.separation_time()) + 0.5;
  res.branch_plus = integrate_trajectory(plus, x0, 0.1, t_end).branch;
  res.branch_minus = integrate_trajectory(minus, x0, 0.1, t_end).branch;
  res.flipped = res.branch_plus != 0 && res.branch_minus != 0 && res.branch_plus != res.branch_minus;
  return res;
}

}  // namespace branchlab
