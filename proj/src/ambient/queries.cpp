#include "trflow/ambient/queries.hpp"

#include <algorithm>
#include <cmath>

#include "trflow/core/errors.hpp"

namespace trflow {

Connection chern_connection(const AmbientModel& m, const Vec& x) { return m.geometry(x).chern; }

Vec chern_torsion(const AmbientModel& m, const Vec& x, const Vec& X, const Vec& Y) {
  return m.geometry(x).torsion(X, Y);
}

Mat ricci_form(const AmbientModel& m, const Vec& x) { return m.geometry(x, true).rho(); }

Mat chern_form_P(const AmbientModel& m, const Vec& x) { return m.geometry(x, true).chern_form(); }

EinsteinRatio einstein_ratio(const AmbientModel& m, const std::vector<Vec>& samples) {
  if (samples.size() < 100) throw std::invalid_argument("einstein_ratio: need at least 100 samples");
  std::vector<PointGeometry> geo(samples.size());
  std::vector<double> ratios;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    geo[s] = m.geometry(samples[s], true);
    const int d = geo[s].dim;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (std::abs(geo[s].omega(i, j)) > 1e-8) ratios.push_back(geo[s].rho()(i, j) / geo[s].omega(i, j));
  }
  EinsteinRatio r;
  r.samples = samples.size();
  if (!ratios.empty()) {
    const auto mid = ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2);
    std::nth_element(ratios.begin(), mid, ratios.end());
    r.lambda = *mid;
    if (ratios.size() % 2 == 0) {
      const double lower = *std::max_element(ratios.begin(), mid);
      r.lambda = 0.5 * (r.lambda + lower);
    }
  }
  for (const auto& g : geo) r.deviation = std::max(r.deviation, max_abs(g.rho() - r.lambda * g.omega));
  return r;
}

std::vector<Vec> sample_ball(const Vec& center, double radius, std::size_t count, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = static_cast<int>(center.size());
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vec v(d);
    for (int a = 0; a < d; ++a) v(a) = normal(rng);
    const double r = radius * std::pow(unif(rng), 1.0 / d);
    out.push_back(center + r * v / v.norm());
  }
  return out;
}

}  // namespace trflow
