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

#ifndef SATPRE_RDSD_H_
#define SATPRE_RDSD_H_

#include <optional>
#include <span>

#include "satpre/calibration.h"
#include "satpre/dsd.h"
#include "satpre/lcc.h"

namespace satpre {

inline constexpr int kDefaultSlopeOffset = 5;

// Finite-difference slope -(D(qp*+offset) - D(qp*)) / (R(qp*+offset) -
// R(qp*)) over dist_input. nullopt when the rates are equal.
struct SlopeSample {
  int offset = 0;
  double slope = 0.0;
};

std::optional<SlopeSample> approx_slope(std::span<const RDPoint> curve,
                                        int qp_star, int offset);

// Smallest positive slope over the offsets; offsets reaching past the
// curve are skipped. nullopt when no slope is positive; ConfigError
// when every offset falls outside the curve.
std::optional<double> saturation_lambda(std::span<const RDPoint> curve,
                                        int qp_star,
                                        std::span<const int> offsets);

// Applies the calibration ratio at qp_star: lambda_t = ratio * lambda_s.
double transfer_lambda(double lambda_s, int qp_star,
                       const CalibrationTable& table);

struct BlockQpResult {
  int qp_star = 0;  // final decision on the target-codec scale
  bool fallback = false;  // criterion value reused because no slope was usable
  SaturationDecision dsd;
  std::optional<double> lambda_s;
  std::optional<double> lambda_t;
};

// Full RDSD decision for one block: DSD locates qp*, local slopes turn
// it into a lambda, calibration moves the lambda to the target codec,
// and the lambda map turns it back into a QP. Degenerate DSD results
// and blocks without a usable positive slope keep the DSD QP and set
// the fallback flag.
BlockQpResult rdsd_block_qp(const MacroBlockCoeffs& u,
                            const MacroBlockCoeffs& z, const QpGrid& grid,
                            std::span<const int> offsets,
                            const CalibrationTable& table,
                            double r = kDefaultLambdaScale,
                            EntropyModel model = EntropyModel::kRunLevelExpGolomb);

}  // namespace satpre

#endif  // SATPRE_RDSD_H_
