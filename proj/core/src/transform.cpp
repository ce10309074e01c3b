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

#include "satpre/transform.h"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "satpre/error.h"

namespace satpre {

namespace {

// Orthonormal DCT-II basis: A[i][j] = c_i * cos((2j + 1) * i * pi / 8),
// c_0 = 1/2, c_i = sqrt(2)/2 otherwise. Rows are unit-norm.
constexpr double kA = 0.5;
constexpr double kB = 0.65328148243818826;  // sqrt(1/2) * cos(pi/8)
constexpr double kC = 0.27059805007309851;  // sqrt(1/2) * cos(3*pi/8)

constexpr double kDct[4][4] = {
    {kA, kA, kA, kA},
    {kB, kC, -kC, -kB},
    {kA, -kA, -kA, kA},
    {kC, -kB, kB, -kC},
};

}  // namespace

Coeff4x4 forward_dct4(const Block4& block) {
  // A * X * A^T
  double tmp[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += kDct[i][k] * block[4 * k + j];
      tmp[i][j] = s;
    }
  }
  Coeff4x4 out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += tmp[i][k] * kDct[j][k];
      out.c[4 * i + j] = s;
    }
  }
  return out;
}

Block4 inverse_dct4(const Coeff4x4& coeffs) {
  // A^T * C * A
  double tmp[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += kDct[k][i] * coeffs.c[4 * k + j];
      tmp[i][j] = s;
    }
  }
  Block4 out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += tmp[i][k] * kDct[k][j];
      out[4 * i + j] = s;
    }
  }
  return out;
}

MacroBlockCoeffs macroblock_coeffs(const PixelBlock& block) {
  if (block.pixels.size() !=
      static_cast<size_t>(kMacroBlockSize) * kMacroBlockSize) {
    throw InputError("macroblock_coeffs: block is not 16x16");
  }
  MacroBlockCoeffs out;
  out.origin_x = block.origin_x;
  out.origin_y = block.origin_y;
  out.padded = block.padded;
  for (int sb = 0; sb < kSubBlocksPerMb; ++sb) {
    int sx = (sb % 4) * kSubBlockSize;
    int sy = (sb / 4) * kSubBlockSize;
    Block4 tile;
    for (int y = 0; y < kSubBlockSize; ++y) {
      for (int x = 0; x < kSubBlockSize; ++x) {
        tile[4 * y + x] =
            block.pixels[static_cast<size_t>(sy + y) * kMacroBlockSize + sx + x];
      }
    }
    Coeff4x4 c = forward_dct4(tile);
    std::copy(c.c.begin(), c.c.end(), out.coeffs.begin() + 16 * sb);
  }
  return out;
}

double qp_to_step(int qp) { return std::exp2((qp - 4) / 6.0); }

double qp_to_lambda(int qp, double r) { return r * std::exp2((qp - 12) / 3.0); }

QpGrid::QpGrid(int min_qp, int max_qp) {
  if (min_qp > max_qp) {
    throw ConfigError("qp grid range [" + std::to_string(min_qp) + ", " +
                      std::to_string(max_qp) + "] is empty");
  }
  qps_.reserve(static_cast<size_t>(max_qp - min_qp) + 1);
  for (int qp = min_qp; qp <= max_qp; ++qp) qps_.push_back(qp);
}

QpGrid::QpGrid(std::vector<int> qps) : qps_(std::move(qps)) {
  if (qps_.empty()) {
    throw ConfigError("qp grid must not be empty");
  }
  for (size_t i = 1; i < qps_.size(); ++i) {
    if (qps_[i] <= qps_[i - 1]) {
      throw ConfigError("qp grid must be strictly increasing");
    }
  }
}

bool QpGrid::contains(int qp) const {
  return std::binary_search(qps_.begin(), qps_.end(), qp);
}

double QpGrid::step(int qp) const {
  if (!contains(qp)) {
    throw ConfigError("qp " + std::to_string(qp) + " outside configured grid [" +
                      std::to_string(min_qp()) + ", " + std::to_string(max_qp()) +
                      "]");
  }
  return qp_to_step(qp);
}

int QpGrid::snap(int qp) const {
  auto it = std::lower_bound(qps_.begin(), qps_.end(), qp);
  if (it == qps_.end()) return qps_.back();
  if (it == qps_.begin()) return qps_.front();
  int above = *it;
  int below = *(it - 1);
  return (above - qp <= qp - below) ? above : below;
}

int lambda_to_qp(double lambda, const QpGrid& grid, double r) {
  if (!(lambda > 0.0) || !(r > 0.0)) {
    throw ConfigError("lambda_to_qp requires positive lambda and r");
  }
  double raw = 12.0 + 3.0 * std::log2(lambda / r);
  int rounded = static_cast<int>(std::floor(raw + 0.5));
  return grid.snap(rounded);
}

int32_t quantize_coeff(double coeff, double step) {
  assert(step > 0.0);
  return static_cast<int32_t>(std::llround(coeff / step));
}

LevelBlock quantize(const MacroBlockCoeffs& coeffs, double step) {
  if (!(step > 0.0)) {
    throw ConfigError("quantize: step must be positive");
  }
  LevelBlock out;
  out.step = step;
  for (int i = 0; i < kCoeffsPerMb; ++i) {
    out.levels[i] = quantize_coeff(coeffs.coeffs[i], step);
  }
  return out;
}

std::array<double, kCoeffsPerMb> dequantize(const LevelBlock& levels) {
  std::array<double, kCoeffsPerMb> out;
  for (int i = 0; i < kCoeffsPerMb; ++i) {
    out[i] = levels.levels[i] * levels.step;
  }
  return out;
}

double expected_quant_error(double step, int n_coeffs) {
  return n_coeffs * step * step / 12.0;
}

}  // namespace satpre
