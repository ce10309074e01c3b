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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "satpre/error.h"
#include "satpre/transform.h"
#include "testutil.h"

using namespace satpre;

namespace {

// Independent basis oracle.
double dct_basis(int i, int j) {
  double c = i == 0 ? std::sqrt(0.25) : std::sqrt(0.5);
  return c * std::cos((2 * j + 1) * i * M_PI / 8.0);
}

Coeff4x4 reference_dct(const Block4& x) {
  Coeff4x4 out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          s += dct_basis(i, a) * x[4 * a + b] * dct_basis(j, b);
        }
      }
      out.c[4 * i + j] = s;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("forward dct matches the orthonormal basis definition") {
  satpre_test::Rng rng(11);
  std::uniform_real_distribution<double> dist(-255.0, 255.0);
  for (int t = 0; t < 200; ++t) {
    Block4 x;
    for (double& v : x) v = dist(rng);
    Coeff4x4 got = forward_dct4(x);
    Coeff4x4 want = reference_dct(x);
    for (int i = 0; i < 16; ++i) {
      CHECK(got.c[i] == doctest::Approx(want.c[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("constant block concentrates into the dc coefficient") {
  Block4 x;
  x.fill(100.0);
  Coeff4x4 c = forward_dct4(x);
  CHECK(c.c[0] == doctest::Approx(400.0).epsilon(1e-12));
  for (int i = 1; i < 16; ++i) {
    CHECK(std::abs(c.c[i]) < 1e-10);
  }
}

TEST_CASE("inverse undoes forward and energy is preserved") {
  satpre_test::Rng rng(12);
  std::uniform_real_distribution<double> dist(-255.0, 255.0);
  for (int t = 0; t < 500; ++t) {
    Block4 x;
    double ex = 0.0;
    for (double& v : x) {
      v = dist(rng);
      ex += v * v;
    }
    Coeff4x4 c = forward_dct4(x);
    double ec = 0.0;
    for (double v : c.c) ec += v * v;
    CHECK(ec == doctest::Approx(ex).epsilon(1e-12));
    Block4 back = inverse_dct4(c);
    for (int i = 0; i < 16; ++i) {
      CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("transform is linear") {
  satpre_test::Rng rng(13);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  Block4 a, b, sum;
  for (int i = 0; i < 16; ++i) {
    a[i] = dist(rng);
    b[i] = dist(rng);
    sum[i] = a[i] + b[i];
  }
  Coeff4x4 ca = forward_dct4(a), cb = forward_dct4(b), cs = forward_dct4(sum);
  for (int i = 0; i < 16; ++i) {
    CHECK(cs.c[i] == doctest::Approx(ca.c[i] + cb.c[i]).epsilon(1e-12));
  }
}

TEST_CASE("macroblock transform keeps sub-blocks independent") {
  PixelBlock block;
  block.origin_x = 32;
  block.origin_y = 16;
  block.pixels.assign(256, 0.0f);
  block.pixels[static_cast<size_t>(5) * 16 + 9] = 200.0f;  // sub-block row 1, col 2
  MacroBlockCoeffs mb = macroblock_coeffs(block);
  CHECK(mb.origin_x == 32);
  CHECK(mb.origin_y == 16);
  int hot = 1 * 4 + 2;
  for (int sb = 0; sb < 16; ++sb) {
    double energy = 0.0;
    for (int i = 0; i < 16; ++i) energy += mb.coeffs[16 * sb + i] * mb.coeffs[16 * sb + i];
    if (sb == hot) {
      CHECK(energy == doctest::Approx(200.0 * 200.0).epsilon(1e-12));
    } else {
      CHECK(energy == 0.0);
    }
  }
  PixelBlock bad;
  bad.pixels.assign(64, 0.0f);
  CHECK_THROWS_AS(macroblock_coeffs(bad), InputError);
}

TEST_CASE("qp to step hits the anchor values") {
  CHECK(qp_to_step(4) == 1.0);
  CHECK(qp_to_step(10) == 2.0);
  CHECK(qp_to_step(22) == 8.0);
  CHECK(qp_to_step(12) == doctest::Approx(std::exp2(8.0 / 6.0)).epsilon(1e-15));
  for (int qp = 0; qp < 51; ++qp) {
    CHECK(qp_to_step(qp + 1) > qp_to_step(qp));
    CHECK(qp_to_step(qp + 6) == doctest::Approx(2.0 * qp_to_step(qp)).epsilon(1e-15));
  }
}

TEST_CASE("qp to lambda hits the anchor values") {
  CHECK(qp_to_lambda(12) == 0.85);
  CHECK(qp_to_lambda(18) == 3.4);
  CHECK(qp_to_lambda(30) == 54.4);
  CHECK(qp_to_lambda(15, 2.0) == doctest::Approx(2.0 * std::exp2(1.0)).epsilon(1e-15));
  for (int qp = 0; qp < 49; ++qp) {
    CHECK(qp_to_lambda(qp + 3) == doctest::Approx(2.0 * qp_to_lambda(qp)).epsilon(1e-14));
  }
}

TEST_CASE("qp grid validates membership and snaps to nearest") {
  QpGrid grid;  // 0..51
  CHECK(grid.min_qp() == 0);
  CHECK(grid.max_qp() == 51);
  CHECK(grid.contains(26));
  CHECK_FALSE(grid.contains(52));
  CHECK(grid.step(10) == 2.0);
  CHECK_THROWS_AS(grid.step(52), ConfigError);
  CHECK(grid.snap(-3) == 0);
  CHECK(grid.snap(60) == 51);
  CHECK(grid.snap(26) == 26);

  QpGrid sparse(std::vector<int>{10, 20, 30});
  CHECK(sparse.snap(14) == 10);
  CHECK(sparse.snap(15) == 20);  // ties go up
  CHECK(sparse.snap(16) == 20);
  CHECK_THROWS_AS(QpGrid(std::vector<int>{}), ConfigError);
  CHECK_THROWS_AS(QpGrid(std::vector<int>{3, 3}), ConfigError);
  CHECK_THROWS_AS(QpGrid(5, 4), ConfigError);
}

TEST_CASE("lambda to qp inverts the lambda map over the whole grid") {
  QpGrid grid;
  for (int qp = 0; qp <= 51; ++qp) {
    CHECK(lambda_to_qp(qp_to_lambda(qp), grid) == qp);
  }
  CHECK(lambda_to_qp(1.0, grid) == 13);
  CHECK(lambda_to_qp(1e12, grid) == 51);
  CHECK(lambda_to_qp(1e-12, grid) == 0);
  CHECK_THROWS_AS(lambda_to_qp(0.0, grid), ConfigError);
  CHECK_THROWS_AS(lambda_to_qp(-1.0, grid), ConfigError);
}

TEST_CASE("quantizer rounds half away from zero") {
  CHECK(quantize_coeff(1.5, 1.0) == 2);
  CHECK(quantize_coeff(-1.5, 1.0) == -2);
  CHECK(quantize_coeff(1.49, 1.0) == 1);
  CHECK(quantize_coeff(-2.5, 1.0) == -3);
  CHECK(quantize_coeff(7.0, 2.0) == 4);   // 3.5 rounds up
  CHECK(quantize_coeff(0.0, 0.5) == 0);
}

TEST_CASE("dequantize reconstructs within half a step") {
  satpre_test::Rng rng(14);
  std::uniform_real_distribution<double> dist(-500.0, 500.0);
  MacroBlockCoeffs mb;
  for (double& c : mb.coeffs) c = dist(rng);
  for (double step : {0.63, 2.0, 16.0}) {
    LevelBlock lev = quantize(mb, step);
    CHECK(lev.step == step);
    auto recon = dequantize(lev);
    for (int i = 0; i < kCoeffsPerMb; ++i) {
      CHECK(std::abs(recon[i] - mb.coeffs[i]) <= step / 2.0 + 1e-12);
      CHECK(recon[i] == lev.levels[i] * step);
    }
  }
  CHECK_THROWS_AS(quantize(mb, 0.0), ConfigError);
  CHECK_THROWS_AS(quantize(mb, -1.0), ConfigError);
}

TEST_CASE("expected quantization error follows the uniform model") {
  CHECK(expected_quant_error(1.0, 12) == 1.0);
  CHECK(expected_quant_error(2.0, 256) == doctest::Approx(256.0 * 4.0 / 12.0));
  CHECK(expected_quant_error(0.5, 0) == 0.0);
}
