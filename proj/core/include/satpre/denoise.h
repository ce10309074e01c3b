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

#ifndef SATPRE_DENOISE_H_
#define SATPRE_DENOISE_H_

#include <string>

#include "satpre/media_io.h"

namespace satpre {

// Built-in reference denoisers are deliberately plain stand-ins; real
// deployments supply an externally denoised sequence instead.
struct DenoiserSpec {
  enum class Kind { kExternalFile, kGaussian, kDeblock };

  Kind kind = Kind::kExternalFile;
  double sigma = 1.0;  // gaussian
  int strength = 2;    // deblock, 1..5

  static DenoiserSpec external_file();
  static DenoiserSpec gaussian(double sigma);
  static DenoiserSpec deblock(int strength);

  // "gaussian:1.5", "deblock:3", "external". Throws ConfigError.
  static DenoiserSpec parse(const std::string& text);
  std::string describe() const;
};

LumaPlane denoise_plane(const LumaPlane& plane, const DenoiserSpec& spec);

// Mean squared difference between two matching planes.
double id_mse(const LumaPlane& u, const LumaPlane& z);

}  // namespace satpre

#endif  // SATPRE_DENOISE_H_
