#pragma once

// Central finite-difference verification of the analytic gradient.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>

#include "rsaqfs/error.hpp"
#include "rsaqfs/nnsum/train.hpp"
#include "rsaqfs/random.hpp"

namespace rsaqfs::nnsum {

struct GradCheckOptions {
  double epsilon = 1e-4;
  // Coordinates sampled per tensor; tensors at most this large are checked
  // exhaustively.
  std::size_t coordinates_per_tensor = 200;
  // Denominator floor of the relative error, so coordinates whose true
  // gradient is ~0 are judged on absolute error.
  double relative_floor = 1e-6;
  std::uint64_t seed = 7;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::map<std::string, double> per_tensor;
  std::size_t coordinates_checked = 0;
};

inline double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline GradCheckReport grad_check(const ModelParams& params, std::span<const Example> batch,
                                  const GradCheckOptions& opt = {},
                                  const GradientFn& gradient = loss_and_gradient) {
  if (!(opt.epsilon >= 1e-6 && opt.epsilon <= 1e-4)) {
    throw ConfigError("grad_check: epsilon must lie in [1e-6, 1e-4]");
  }
  if (opt.coordinates_per_tensor == 0) {
    throw ConfigError("grad_check: parameter subsample must be non-empty");
  }
  ModelParams analytic;
  gradient(params, batch, &analytic);
  if (!analytic.all_finite()) throw Error("grad_check: non-finite analytic gradient");

  ModelParams probe = params;
  auto probe_tensors = probe.tensors();
  const auto grad_tensors = analytic.tensors();
  Rng rng(opt.seed);
  GradCheckReport report;
  for (std::size_t k = 0; k < probe_tensors.size(); ++k) {
    auto& t = probe_tensors[k];
    const auto size = static_cast<std::size_t>(t.rows * t.cols);
    std::vector<std::size_t> coords =
        size <= opt.coordinates_per_tensor ? rng.sample(size, size)
                                           : rng.sample(size, opt.coordinates_per_tensor);
    double worst = 0.0;
    for (const std::size_t i : coords) {
      const double saved = t.data[i];
      t.data[i] = saved + opt.epsilon;
      const double up = loss_and_gradient(probe, batch, nullptr);
      t.data[i] = saved - opt.epsilon;
      const double down = loss_and_gradient(probe, batch, nullptr);
      t.data[i] = saved;
      const double numeric = (up - down) / (2.0 * opt.epsilon);
      if (!std::isfinite(numeric)) throw Error("grad_check: non-finite numeric gradient");
      worst = std::max(worst, relative_error(grad_tensors[k].data[i], numeric, opt.relative_floor));
    }
    report.per_tensor[t.name] = worst;
    report.max_relative_error = std::max(report.max_relative_error, worst);
    report.coordinates_checked += coords.size();
  }
  return report;
}

}  // namespace rsaqfs::nnsum
