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

#ifndef SATPRE_DSD_H_
#define SATPRE_DSD_H_

#include <vector>

#include "satpre/transform.h"

namespace satpre {

// Coefficient positions of a macroblock whose input magnitude reaches
// at least half the finest grid step. Quantization error on positions
// below that threshold is bounded by the coefficient itself at every
// grid QP, so they carry no saturation information.
struct SignificantSet {
  std::vector<int> indices;  // ascending, values in [0, 256)
  int count() const { return static_cast<int>(indices.size()); }
};

SignificantSet significant_indices(const MacroBlockCoeffs& u, const QpGrid& grid);

// Sum of |u_i - z_i|^2 over the significant set: the block's estimated
// distortion (noise) energy.
double noise_energy(const MacroBlockCoeffs& u, const MacroBlockCoeffs& z,
                    const SignificantSet& sig);

// Largest grid QP whose expected quantization error over the
// significant set stays within the noise energy. saturation_step is the
// continuous step solving n * q^2 / 12 = noise. Degenerate when the set
// is empty, the noise is zero, or even the finest grid step already
// overshoots; then saturation_qp falls back to the grid minimum.
struct SaturationStep {
  double saturation_step = 0.0;
  int saturation_qp = 0;
  bool degenerate = false;
};

SaturationStep saturation_step(const SignificantSet& sig, double noise,
                               const QpGrid& grid);

// Whether qp's expected quantization error over the significant set is
// at most the measured noise energy (distortion saturation holds).
bool check_criterion(const MacroBlockCoeffs& u, const MacroBlockCoeffs& z,
                     int qp, const QpGrid& grid);

struct SaturationDecision {
  int block_x = 0;
  int block_y = 0;
  int saturation_qp = 0;
  double saturation_step = 0.0;
  double noise_energy = 0.0;
  int significant_count = 0;
  bool degenerate = false;
};

// Full per-block decision: significant set, noise energy, QP*.
SaturationDecision dsd_block_qp(const MacroBlockCoeffs& u,
                                const MacroBlockCoeffs& z, const QpGrid& grid);

}  // namespace satpre

#endif  // SATPRE_DSD_H_
