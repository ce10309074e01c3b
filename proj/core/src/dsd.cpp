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

#include "satpre/dsd.h"

#include <cmath>

#include "satpre/error.h"

namespace satpre {

SignificantSet significant_indices(const MacroBlockCoeffs& u, const QpGrid& grid) {
  double threshold = grid.min_step() / 2.0;
  SignificantSet sig;
  for (int i = 0; i < kCoeffsPerMb; ++i) {
    if (std::abs(u.coeffs[i]) >= threshold) sig.indices.push_back(i);
  }
  return sig;
}

double noise_energy(const MacroBlockCoeffs& u, const MacroBlockCoeffs& z,
                    const SignificantSet& sig) {
  if (u.origin_x != z.origin_x || u.origin_y != z.origin_y) {
    throw InputError("noise_energy: blocks at different origins");
  }
  double energy = 0.0;
  for (int i : sig.indices) {
    double d = u.coeffs[i] - z.coeffs[i];
    energy += d * d;
  }
  return energy;
}

SaturationStep saturation_step(const SignificantSet& sig, double noise,
                               const QpGrid& grid) {
  SaturationStep out;
  out.saturation_qp = grid.min_qp();
  if (sig.count() == 0 || !(noise > 0.0)) {
    out.degenerate = true;
    return out;
  }
  double q_cont = std::sqrt(12.0 * noise / sig.count());
  out.saturation_step = q_cont;
  if (q_cont < grid.min_step()) {
    out.degenerate = true;
    return out;
  }
  for (int qp : grid.qps()) {
    if (qp_to_step(qp) <= q_cont) out.saturation_qp = qp;
  }
  return out;
}

bool check_criterion(const MacroBlockCoeffs& u, const MacroBlockCoeffs& z,
                     int qp, const QpGrid& grid) {
  double step = grid.step(qp);
  SignificantSet sig = significant_indices(u, grid);
  double noise = noise_energy(u, z, sig);
  return expected_quant_error(step, sig.count()) <= noise;
}

SaturationDecision dsd_block_qp(const MacroBlockCoeffs& u,
                                const MacroBlockCoeffs& z, const QpGrid& grid) {
  SignificantSet sig = significant_indices(u, grid);
  double noise = noise_energy(u, z, sig);
  SaturationStep st = saturation_step(sig, noise, grid);
  SaturationDecision out;
  out.block_x = u.origin_x;
  out.block_y = u.origin_y;
  out.saturation_qp = st.saturation_qp;
  out.saturation_step = st.saturation_step;
  out.noise_energy = noise;
  out.significant_count = sig.count();
  out.degenerate = st.degenerate;
  return out;
}

}  // namespace satpre
