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

#ifndef SATPRE_MEDIA_IO_H_
#define SATPRE_MEDIA_IO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace satpre {

// Luma samples as floats so denoised planes keep fractional values.
// Decoded 8-bit sources populate values in [0, 255].
struct LumaPlane {
  int width = 0;
  int height = 0;
  std::vector<float> samples;  // row-major, width * height

  float at(int x, int y) const { return samples[static_cast<size_t>(y) * width + x]; }
  float& at(int x, int y) { return samples[static_cast<size_t>(y) * width + x]; }
};

enum class Subsampling { k420, k400 };

struct FrameRate {
  int num = 30;
  int den = 1;
};

struct VideoSequence {
  int width = 0;
  int height = 0;
  FrameRate frame_rate;
  int color_depth = 8;
  Subsampling subsampling = Subsampling::k420;
  std::vector<LumaPlane> frames;  // luma only

  // Raw pass-through payload so serialization is bit-exact for untouched
  // streams: original stream header, per-frame header lines, chroma bytes.
  std::string stream_header;                 // includes trailing '\n'
  std::vector<std::string> frame_headers;    // each includes trailing '\n'
  std::vector<std::vector<uint8_t>> chroma;  // raw chroma bytes per frame

  int frame_count() const { return static_cast<int>(frames.size()); }
};

// GOP partitioning of a sequence. A nullopt sampled_frame_offset means
// "middle of the GOP" (floor(len / 2)), including for a final partial GOP.
struct GopIndexing {
  int gop_length = 30;
  std::optional<int> sampled_frame_offset;
};

struct GopSample {
  int gop_index = 0;
  int frame_index = 0;  // absolute frame index in the sequence
};

// One sample per GOP; list length is ceil(frame_count / gop_length).
std::vector<GopSample> sample_gop_frames(const VideoSequence& seq,
                                         const GopIndexing& gop);

// Parses an 8-bit 4:2:0 or 4:0:0 Y4M stream held in memory. Other bit
// depths and samplings are rejected. Headers and chroma are retained
// verbatim so serialize_y4m() round-trips bit-exactly.
VideoSequence parse_y4m(std::span<const uint8_t> data);

std::vector<uint8_t> serialize_y4m(const VideoSequence& seq);

// Reads headerless planar frames (I420 layout for k420, luma-only for
// k400). Trailing bytes smaller than one frame are ignored; when
// `warning` is non-null a note about them is stored there.
VideoSequence read_raw_planar(std::span<const uint8_t> data, int width,
                              int height, Subsampling subsampling,
                              FrameRate frame_rate = FrameRate{},
                              std::string* warning = nullptr);

// File helpers used by the CLI; throw InputError on unreadable paths.
std::vector<uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const uint8_t> data);

// 16x16 pixel block cut from a plane. Blocks that overlap the right or
// bottom edge are completed by edge replication and flagged as padded.
inline constexpr int kMacroBlockSize = 16;

struct PixelBlock {
  int origin_x = 0;
  int origin_y = 0;
  bool padded = false;
  std::vector<float> pixels;  // row-major, block_size * block_size
};

std::vector<PixelBlock> partition_blocks(const LumaPlane& plane,
                                         int block_size = kMacroBlockSize);

}  // namespace satpre

#endif  // SATPRE_MEDIA_IO_H_
