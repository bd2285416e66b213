#include "trflow/flows/krf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trflow/core/errors.hpp"
#include "trflow/core/parallel.hpp"
#include "trflow/kernels/stencil.hpp"

namespace trflow {

PotentialGrid::PotentialGrid(int n, int nodes, Vec center, double half_width, std::vector<double> psi)
    : n_(n), nodes_(nodes), center_(std::move(center)), half_width_(half_width), psi_(std::move(psi)) {
  if (n < 1 || n > kMaxComplex) throw ConfigError("potential grid dimension must be 1..3");
  if (nodes < 8) throw ConfigError("potential grid needs at least 8 nodes per axis");
  if (!(half_width > 0.0)) throw ConfigError("potential grid half width must be positive");
  if (center_.size() == 0) center_ = Vec::Zero(2 * n);
  if (center_.size() != 2 * n) throw ConfigError("potential grid center has the wrong dimension");
  h_ = 2.0 * half_width / nodes;
  lo_ = center_.array() - half_width;
  std::size_t total = 1;
  for (int a = 0; a < 2 * n; ++a) total *= static_cast<std::size_t>(nodes);
  if (psi_.size() != total) throw ConfigError("potential grid sample count does not match the grid");
}

std::vector<int> PotentialGrid::extents() const { return std::vector<int>(2 * n_, nodes_); }

Vec PotentialGrid::node_position(std::size_t idx) const {
  const int d = dim();
  Vec x(d);
  for (int a = d - 1; a >= 0; --a) {
    x(a) = lo_(a) + h_ * static_cast<double>(idx % nodes_);
    idx /= nodes_;
  }
  return x;
}

PotentialGrid PotentialGrid::sample(const KahlerPotential& phi, int nodes, Vec center, double half_width) {
  const int d = 2 * phi.n;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(nodes);
  PotentialGrid g(phi.n, nodes, center, half_width, std::vector<double>(total, 0.0));
  parallel_for(total, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const Vec x = g.node_position(p);
      g.psi_[p] = phi.evaluate(x, 0).value - 0.5 * x.squaredNorm();
    }
  });
  return g;
}

std::vector<double> PotentialGrid::rate() const {
  const int d = dim();
  const std::size_t N = psi_.size();
  const auto ext = extents();
  const double s1 = 1.0 / (12.0 * h_), s2 = 1.0 / (12.0 * h_ * h_);
  std::vector<std::vector<double>> first(d, std::vector<double>(N));
  for (int a = 0; a < d; ++a) kernels::diff1(psi_.data(), first[a].data(), kernels::axis_layout(ext, a), s1);
  // Hessian components, upper triangle in row order.
  std::vector<std::vector<double>> hess;
  hess.reserve(d * (d + 1) / 2);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      std::vector<double> out(N);
      if (a == b)
        kernels::diff2(psi_.data(), out.data(), kernels::axis_layout(ext, a), s2);
      else
        kernels::diff1(first[a].data(), out.data(), kernels::axis_layout(ext, b), s1);
      hess.push_back(std::move(out));
    }
  first.clear();
  first.shrink_to_fit();
  const Mat J = standard_j(n_);
  std::vector<double> rate(N);
  std::size_t bad = N;
  parallel_for(N, [&](std::size_t b0, std::size_t e0) {
    Mat H(d, d);
    for (std::size_t p = b0; p < e0; ++p) {
      int k = 0;
      double hmax = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b, ++k) {
          H(a, b) = H(b, a) = hess[k][p];
          hmax = std::max(hmax, std::abs(hess[k][p]));
        }
      if (hmax < 1e-9) {
        // far from the bump: (1/2) log det(I + G) = tr(H)/2 + O(|H|^2)
        double tr = 0.0;
        for (int a = 0; a < d; ++a) tr += H(a, a);
        rate[p] = 0.5 * tr;
        continue;
      }
      const Mat g = Mat::Identity(d, d) + 0.5 * (H + J.transpose() * H * J);
      Eigen::LLT<Mat> llt(g);
      if (llt.info() != Eigen::Success) {
        bad = p;
        rate[p] = 0.0;
        continue;
      }
      double ld = 0.0;
      for (int a = 0; a < d; ++a) ld += std::log(llt.matrixL()(a, a));
      rate[p] = ld;  // (1/2) log det g = sum log L_aa
    }
  });
  if (bad < N) {
    std::ostringstream os;
    os << "ambient degenerate: potential metric not positive at grid node " << bad;
    throw DegenerateError(os.str());
  }
  return rate;
}

PotentialGrid PotentialGrid::advanced(const std::vector<double>& rate, double dt) const {
  std::vector<double> psi = psi_;
  for (std::size_t p = 0; p < psi.size(); ++p) psi[p] += dt * rate[p];
  return PotentialGrid(n_, nodes_, center_, half_width_, std::move(psi));
}

ModelPtr PotentialGrid::model(double margin) const {
  auto spline = std::make_shared<const PeriodicBoxSpline>(extents(), lo_, h_, psi_);
  const Vec lo = lo_.array() + margin;
  const Vec hi = (center_.array() + half_width_ - margin).matrix();
  return kahler_from_grid_potential(n_, std::move(spline), ChartDomain::box(lo, hi));
}

}  // namespace trflow
