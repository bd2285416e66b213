#pragma once
// Point queries on an ambient model.

#include <random>
#include <vector>

#include "trflow/ambient/model.hpp"

namespace trflow {

Connection chern_connection(const AmbientModel& m, const Vec& x);
Vec chern_torsion(const AmbientModel& m, const Vec& x, const Vec& X, const Vec& Y);
Mat ricci_form(const AmbientModel& m, const Vec& x);
Mat chern_form_P(const AmbientModel& m, const Vec& x);

struct EinsteinRatio {
  double lambda = 0.0;
  double deviation = 0.0;  // max |rho - lambda*omega|
  std::size_t samples = 0;
};

// Requires at least 100 samples.
EinsteinRatio einstein_ratio(const AmbientModel& m, const std::vector<Vec>& samples);

// Uniform samples in the ball of `radius` around `center` (2n-dim).
std::vector<Vec> sample_ball(const Vec& center, double radius, std::size_t count, std::mt19937_64& rng);

}  // namespace trflow
