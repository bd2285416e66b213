#include "trflow/variation/variation.hpp"

#include <cmath>
#include <limits>

#include "trflow/ambient/potential.hpp"
#include "trflow/core/errors.hpp"

namespace trflow {

VariationProbe VariationProbe::zero(const TorusGrid& grid) {
  return {grid.n(), std::vector<Vec>(grid.size(), Vec::Zero(grid.n()))};
}

VariationProbe VariationProbe::from_function(const TorusGrid& grid, const std::function<Vec(const Vec&)>& y) {
  VariationProbe p{grid.n(), std::vector<Vec>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    p.coef[i] = y(grid.angles(i));
    if (p.coef[i].size() != grid.n()) throw ConfigError("probe field must have one coefficient per torus axis");
  }
  return p;
}

VariationProbe VariationProbe::random(const TorusGrid& grid, int kmax, std::mt19937_64& rng) {
  const TrigField f = TrigField::random(grid.n(), grid.n(), kmax, rng);
  // the field has no mean; add one so translations are probed too
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec mean(grid.n());
  for (int a = 0; a < grid.n(); ++a) mean(a) = u(rng);
  return from_function(grid, [&](const Vec& phi) { return Vec(f(phi) + mean); });
}

VariationProbe VariationProbe::bump(const TorusGrid& grid, const Vec& center, double width, int axis) {
  if (axis < 0 || axis >= grid.n()) throw ConfigError("bump probe axis out of range");
  return from_function(grid, [&](const Vec& phi) {
    double u = 0.0;
    for (int a = 0; a < grid.n(); ++a) {
      const double d = std::remainder(phi(a) - center(a), 2.0 * M_PI);
      u += d * d;
    }
    double b[5];
    bump_profile(u / (width * width), b);
    Vec y = Vec::Zero(grid.n());
    y(axis) = b[0];
    return y;
  });
}

VariationProbe VariationProbe::scaled(double s) const {
  VariationProbe p = *this;
  for (Vec& c : p.coef) c *= s;
  return p;
}

std::vector<Vec> probe_direction(const FramePacket& fp, const VariationProbe& y) {
  if (y.coef.size() != fp.nodes.size()) throw ConfigError("probe does not match the immersion grid");
  std::vector<Vec> dir(fp.nodes.size());
  for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = fp.nodes[i].jd * y.coef[i];
  return dir;
}

double vol_J_along(const Immersion& imm, const AmbientModel& model, const std::vector<Vec>& direction, double t) {
  std::vector<Vec> pos = imm.positions();
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] += t * direction[i];
  FrameOptions o;
  o.second_derivatives = false;
  return volumes(frames(imm.with_positions(std::move(pos)), model, o)).vol_J;
}

FirstVariationReport first_variation_check(const Immersion& imm, const AmbientModel& model,
                                           const VariationProbe& y, double tau) {
  const FramePacket fp = frames(imm, model);
  const std::vector<Vec> dir = probe_direction(fp, y);
  FirstVariationReport r;
  r.tau = tau;
  const double d1 = (vol_J_along(imm, model, dir, tau) - vol_J_along(imm, model, dir, -tau)) / (2.0 * tau);
  const double d2 = (vol_J_along(imm, model, dir, 2.0 * tau) - vol_J_along(imm, model, dir, -2.0 * tau)) / (4.0 * tau);
  r.derivative = (4.0 * d1 - d2) / 3.0;

  const VectorField v = velocity(fp, FlowKind::jmcf);
  const Volumes vol = volumes(fp);
  double s = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) s += dir[i].dot(fp.nodes[i].amb.g * v[i]) * vol.density_J[i];
  r.predicted = -s * fp.grid.cell_measure();
  r.residual = std::abs(r.derivative - r.predicted) / std::max(std::abs(r.derivative), 1e-8);
  r.noise = 32.0 * std::numeric_limits<double>::epsilon() * vol.vol_J / tau;
  return r;
}

ScalarField divergence(const FramePacket& fp, const VariationProbe& y) {
  const std::size_t N = fp.nodes.size();
  ScalarField div(N, 0.0);
  const Volumes vol = volumes(fp);
  for (int a = 0; a < fp.n; ++a) {
    std::vector<double> f(N);
    for (std::size_t i = 0; i < N; ++i) f[i] = vol.density_g[i] * y.coef[i](a);
    const std::vector<double> df = grid_diff(fp.grid, f, a);
    for (std::size_t i = 0; i < N; ++i) div[i] += df[i];
  }
  for (std::size_t i = 0; i < N; ++i) div[i] /= vol.density_g[i];
  return div;
}

SecondVariationReport second_variation_at_critical(const Immersion& imm, const AmbientModel& model,
                                                   const VariationProbe& y, double tau, double crit_tol) {
  if (!model.is_flat())
    throw UnsupportedError("second variation check needs a Ricci-flat (flat) Kahler model; off-critical or curved cases are not covered");
  const FramePacket fp = frames(imm, model);
  const double hj = sup_norm(fp, H_J(fp));
  if (hj > crit_tol)
    throw UnsupportedError("second variation check refused: immersion is not critical (sup |H_J| = " +
                           std::to_string(hj) + ")");
  const std::vector<Vec> dir = probe_direction(fp, y);
  SecondVariationReport r;
  r.tau = tau;
  const double v0 = vol_J_along(imm, model, dir, 0.0);
  auto second = [&](double s) {
    return (vol_J_along(imm, model, dir, s) - 2.0 * v0 + vol_J_along(imm, model, dir, -s)) / (s * s);
  };
  const double s1 = second(tau), s2 = second(2.0 * tau);
  r.second = (4.0 * s1 - s2) / 3.0;

  // Div(rho_J Y) / rho_J with rho_J from the frames
  const std::size_t N = fp.nodes.size();
  VariationProbe ry = y;
  for (std::size_t i = 0; i < N; ++i) ry.coef[i] *= fp.nodes[i].rho_J;
  const ScalarField div = divergence(fp, ry);
  const Volumes vol = volumes(fp);
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double q = div[i] / fp.nodes[i].rho_J;
    s += q * q * vol.density_J[i];
  }
  r.predicted = s * fp.grid.cell_measure();
  r.residual = std::abs(r.second - r.predicted) / std::max(std::abs(r.predicted), 1e-8);
  return r;
}

GradientReport gradient_reconstruction(const Immersion& imm, const AmbientModel& model,
                                       const std::vector<std::size_t>& nodes, double width, double tau) {
  const FramePacket fp = frames(imm, model);
  const VectorField v = velocity(fp, FlowKind::jmcf);
  const Volumes vol = volumes(fp);
  const double scale = std::max(sup_norm(fp, v), 1e-300);
  const int n = fp.n;
  GradientReport rep;
  for (std::size_t node : nodes) {
    const NodeFrame& f = fp.nodes.at(node);
    Vec G(n);
    for (int k = 0; k < n; ++k) {
      const VariationProbe y = VariationProbe::bump(fp.grid, fp.grid.angles(node), width, k);
      const std::vector<Vec> dir = probe_direction(fp, y);
      const double d1 = (vol_J_along(imm, model, dir, tau) - vol_J_along(imm, model, dir, -tau)) / (2.0 * tau);
      const double d2 =
          (vol_J_along(imm, model, dir, 2.0 * tau) - vol_J_along(imm, model, dir, -2.0 * tau)) / (4.0 * tau);
      const double deriv = (4.0 * d1 - d2) / 3.0;
      double weight = 0.0;
      for (std::size_t i = 0; i < fp.nodes.size(); ++i) weight += y.coef[i](k) * vol.density_J[i];
      weight *= fp.grid.cell_measure();
      G(k) = -deriv / weight;  // g(J d_k, V) averaged under the bump
    }
    // V = c^l J d_l with g(J d_k, J d_l) = g_kl
    const Vec c = f.gind.ldlt().solve(G);
    GradientSample s{node, f.jd * c, v[node], 0.0};
    const Vec diff = s.reconstructed - s.expected;
    s.rel_error = std::sqrt(diff.dot(f.amb.g * diff)) / scale;
    rep.max_rel_error = std::max(rep.max_rel_error, s.rel_error);
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

}  // namespace trflow
