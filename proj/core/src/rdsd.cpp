// Copyright (c) the satpre authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "satpre/rdsd.h"

#include <algorithm>
#include <vector>

#include "satpre/error.h"

namespace satpre {

namespace {

const RDPoint* find_qp(std::span<const RDPoint> curve, int qp) {
  for (const RDPoint& p : curve) {
    if (p.qp == qp) return &p;
  }
  return nullptr;
}

}  // namespace

std::optional<SlopeSample> approx_slope(std::span<const RDPoint> curve,
                                        int qp_star, int offset) {
  const RDPoint* p0 = find_qp(curve, qp_star);
  if (p0 == nullptr) {
    throw ConfigError("approx_slope: qp " + std::to_string(qp_star) +
                      " not present in the curve");
  }
  const RDPoint* p1 = find_qp(curve, qp_star + offset);
  if (p1 == nullptr) {
    throw ConfigError("approx_slope: qp " + std::to_string(qp_star + offset) +
                      " not present in the curve");
  }
  if (p1->rate_bits == p0->rate_bits) return std::nullopt;
  double slope = -(p1->dist_input - p0->dist_input) /
                 static_cast<double>(p1->rate_bits - p0->rate_bits);
  return SlopeSample{offset, slope};
}

std::optional<double> saturation_lambda(std::span<const RDPoint> curve,
                                        int qp_star,
                                        std::span<const int> offsets) {
  if (curve.empty()) {
    throw ConfigError("saturation_lambda: empty curve");
  }
  int curve_max = curve.back().qp;
  for (const RDPoint& p : curve) curve_max = std::max(curve_max, p.qp);

  std::vector<double> positive;
  int usable = 0;
  for (int offset : offsets) {
    if (offset <= 0) {
      throw ConfigError("saturation_lambda: slope offsets must be positive");
    }
    if (qp_star + offset > curve_max || find_qp(curve, qp_star + offset) == nullptr) {
      continue;
    }
    ++usable;
    auto sample = approx_slope(curve, qp_star, offset);
    if (sample && sample->slope > 0.0) positive.push_back(sample->slope);
  }
  if (usable == 0) {
    throw ConfigError("saturation_lambda: every slope offset falls outside the curve");
  }
  if (positive.empty()) return std::nullopt;
  return *std::min_element(positive.begin(), positive.end());
}

double transfer_lambda(double lambda_s, int qp_star,
                       const CalibrationTable& table) {
  if (!(lambda_s > 0.0)) {
    throw ConfigError("transfer_lambda: lambda must be positive");
  }
  return table.ratio_at(qp_star) * lambda_s;
}

BlockQpResult rdsd_block_qp(const MacroBlockCoeffs& u, const MacroBlockCoeffs& z,
                            const QpGrid& grid, std::span<const int> offsets,
                            const CalibrationTable& table, double r,
                            EntropyModel model) {
  BlockQpResult out;
  out.dsd = dsd_block_qp(u, z, grid);
  out.qp_star = out.dsd.saturation_qp;
  if (out.dsd.degenerate) {
    out.fallback = true;
    return out;
  }
  int qp0 = out.dsd.saturation_qp;
  std::vector<RDPoint> curve;
  curve.push_back(rd_point(u, z, qp0, grid, model));
  bool any_offset = false;
  for (int offset : offsets) {
    if (offset <= 0) {
      throw ConfigError("rdsd_block_qp: slope offsets must be positive");
    }
    if (!grid.contains(qp0 + offset)) continue;
    any_offset = true;
    curve.push_back(rd_point(u, z, qp0 + offset, grid, model));
  }
  if (!any_offset) {
    out.fallback = true;  // qp* sits at the top of the grid
    return out;
  }
  auto lambda_s = saturation_lambda(curve, qp0, offsets);
  if (!lambda_s) {
    out.fallback = true;
    return out;
  }
  out.lambda_s = *lambda_s;
  out.lambda_t = transfer_lambda(*lambda_s, qp0, table);
  out.qp_star = lambda_to_qp(*out.lambda_t, grid, r);
  return out;
}

}  // namespace satpre
