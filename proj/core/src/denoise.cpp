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

#include "satpre/denoise.h"

#include <cmath>
#include <vector>

#include "satpre/error.h"

namespace satpre {

namespace {

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

// Separable convolution with edge replication, horizontal then vertical.
LumaPlane convolve_separable(const LumaPlane& plane,
                             const std::vector<double>& kernel) {
  int radius = static_cast<int>(kernel.size()) / 2;
  LumaPlane tmp = plane;
  for (int y = 0; y < plane.height; ++y) {
    for (int x = 0; x < plane.width; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * plane.at(clamp_index(x + k, plane.width), y);
      }
      tmp.at(x, y) = static_cast<float>(acc);
    }
  }
  LumaPlane out = plane;
  for (int y = 0; y < plane.height; ++y) {
    for (int x = 0; x < plane.width; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp.at(x, clamp_index(y + k, plane.height));
      }
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    sum += kernel[k + radius];
  }
  for (double& w : kernel) w /= sum;
  return kernel;
}

// Binomial row 2s normalized by 4^s: the smoothing taps of the deblocker.
std::vector<double> binomial_kernel(int strength) {
  std::vector<double> kernel{1.0};
  for (int i = 0; i < 2 * strength; ++i) {
    std::vector<double> next(kernel.size() + 1, 0.0);
    for (size_t j = 0; j < kernel.size(); ++j) {
      next[j] += 0.5 * kernel[j];
      next[j + 1] += 0.5 * kernel[j];
    }
    kernel = std::move(next);
  }
  return kernel;
}

// Low-pass across each 4-pixel block boundary. For a boundary between
// columns b-1 and b (b a positive multiple of 4), the two adjacent
// pixels are refiltered with the binomial kernel read from the original
// plane, edges replicated. Horizontal boundaries are handled the same
// way on the result of the vertical-boundary pass.
LumaPlane deblock_plane(const LumaPlane& plane, int strength) {
  std::vector<double> kernel = binomial_kernel(strength);
  int radius = strength;

  LumaPlane pass1 = plane;
  for (int b = 4; b < plane.width; b += 4) {
    for (int y = 0; y < plane.height; ++y) {
      for (int x = b - 1; x <= b; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          acc += kernel[k + radius] * plane.at(clamp_index(x + k, plane.width), y);
        }
        pass1.at(x, y) = static_cast<float>(acc);
      }
    }
  }
  LumaPlane out = pass1;
  for (int b = 4; b < plane.height; b += 4) {
    for (int y = b - 1; y <= b; ++y) {
      for (int x = 0; x < plane.width; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          acc += kernel[k + radius] * pass1.at(x, clamp_index(y + k, plane.height));
        }
        out.at(x, y) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

}  // namespace

DenoiserSpec DenoiserSpec::external_file() { return DenoiserSpec{}; }

DenoiserSpec DenoiserSpec::gaussian(double sigma) {
  if (!(sigma > 0.0)) {
    throw ConfigError("gaussian denoiser needs sigma > 0");
  }
  DenoiserSpec spec;
  spec.kind = Kind::kGaussian;
  spec.sigma = sigma;
  return spec;
}

DenoiserSpec DenoiserSpec::deblock(int strength) {
  if (strength < 1 || strength > 5) {
    throw ConfigError("deblock strength must be in 1..5, got " +
                      std::to_string(strength));
  }
  DenoiserSpec spec;
  spec.kind = Kind::kDeblock;
  spec.strength = strength;
  return spec;
}

DenoiserSpec DenoiserSpec::parse(const std::string& text) {
  if (text == "external") return external_file();
  size_t colon = text.find(':');
  std::string name = text.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (name == "gaussian") return gaussian(std::stod(arg));
    if (name == "deblock") return deblock(std::stoi(arg));
  } catch (const std::logic_error&) {
    throw ConfigError("bad denoiser parameter in '" + text + "'");
  }
  throw ConfigError("unknown denoiser '" + text +
                    "' (expected gaussian:<sigma> or deblock:<strength>)");
}

std::string DenoiserSpec::describe() const {
  switch (kind) {
    case Kind::kGaussian:
      return "gaussian:" + std::to_string(sigma);
    case Kind::kDeblock:
      return "deblock:" + std::to_string(strength);
    default:
      return "external";
  }
}

LumaPlane denoise_plane(const LumaPlane& plane, const DenoiserSpec& spec) {
  switch (spec.kind) {
    case DenoiserSpec::Kind::kGaussian:
      if (!(spec.sigma > 0.0)) {
        throw ConfigError("gaussian denoiser needs sigma > 0");
      }
      return convolve_separable(plane, gaussian_kernel(spec.sigma));
    case DenoiserSpec::Kind::kDeblock:
      if (spec.strength < 1 || spec.strength > 5) {
        throw ConfigError("deblock strength must be in 1..5");
      }
      return deblock_plane(plane, spec.strength);
    case DenoiserSpec::Kind::kExternalFile:
    default:
      return plane;  // the matched external frame is the reference
  }
}

double id_mse(const LumaPlane& u, const LumaPlane& z) {
  if (u.width != z.width || u.height != z.height) {
    throw InputError("id_mse: plane geometries differ (" + std::to_string(u.width) +
                     "x" + std::to_string(u.height) + " vs " +
                     std::to_string(z.width) + "x" + std::to_string(z.height) + ")");
  }
  double acc = 0.0;
  for (size_t i = 0; i < u.samples.size(); ++i) {
    double d = static_cast<double>(u.samples[i]) - z.samples[i];
    acc += d * d;
  }
  return u.samples.empty() ? 0.0 : acc / static_cast<double>(u.samples.size());
}

}  // namespace satpre
