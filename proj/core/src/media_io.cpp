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

#include "satpre/media_io.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <string_view>

#include "satpre/error.h"

namespace satpre {

namespace {

constexpr std::string_view kY4mMagic = "YUV4MPEG2";

size_t chroma_bytes_per_frame(int width, int height, Subsampling ss) {
  if (ss == Subsampling::k400) return 0;
  size_t cw = (static_cast<size_t>(width) + 1) / 2;
  size_t ch = (static_cast<size_t>(height) + 1) / 2;
  return 2 * cw * ch;
}

int parse_int_field(std::string_view text, size_t offset, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value <= 0) {
    throw InputError(std::string("y4m: bad ") + what + " field at byte offset " +
                     std::to_string(offset));
  }
  return value;
}

}  // namespace

std::vector<GopSample> sample_gop_frames(const VideoSequence& seq,
                                         const GopIndexing& gop) {
  if (gop.gop_length <= 0) {
    throw ConfigError("gop length must be positive, got " +
                      std::to_string(gop.gop_length));
  }
  if (gop.sampled_frame_offset &&
      (*gop.sampled_frame_offset < 0 ||
       *gop.sampled_frame_offset >= gop.gop_length)) {
    throw ConfigError("gop sample offset " +
                      std::to_string(*gop.sampled_frame_offset) +
                      " outside [0, " + std::to_string(gop.gop_length) + ")");
  }
  std::vector<GopSample> samples;
  int n = seq.frame_count();
  for (int start = 0, g = 0; start < n; start += gop.gop_length, ++g) {
    int len = std::min(gop.gop_length, n - start);
    int offset = gop.sampled_frame_offset ? std::min(*gop.sampled_frame_offset, len - 1)
                                          : len / 2;
    samples.push_back({g, start + offset});
  }
  return samples;
}

VideoSequence parse_y4m(std::span<const uint8_t> data) {
  std::string_view text(reinterpret_cast<const char*>(data.data()), data.size());
  size_t header_end = text.find('\n');
  if (header_end == std::string_view::npos) {
    throw InputError("y4m: no stream header terminator found in " +
                     std::to_string(data.size()) + " bytes");
  }
  std::string_view header = text.substr(0, header_end);
  if (header.substr(0, kY4mMagic.size()) != kY4mMagic) {
    throw InputError("y4m: missing YUV4MPEG2 magic at byte offset 0");
  }

  VideoSequence seq;
  seq.stream_header = std::string(text.substr(0, header_end + 1));

  bool have_w = false, have_h = false;
  std::string colorspace = "420";  // Y4M default when no C tag is present
  size_t pos = kY4mMagic.size();
  while (pos < header.size()) {
    if (header[pos] != ' ') {
      throw InputError("y4m: malformed header at byte offset " + std::to_string(pos));
    }
    ++pos;
    size_t end = header.find(' ', pos);
    if (end == std::string_view::npos) end = header.size();
    std::string_view tag = header.substr(pos, end - pos);
    if (tag.empty()) {
      throw InputError("y4m: empty header tag at byte offset " + std::to_string(pos));
    }
    char key = tag[0];
    std::string_view value = tag.substr(1);
    switch (key) {
      case 'W':
        seq.width = parse_int_field(value, pos, "width");
        have_w = true;
        break;
      case 'H':
        seq.height = parse_int_field(value, pos, "height");
        have_h = true;
        break;
      case 'F': {
        size_t colon = value.find(':');
        if (colon == std::string_view::npos) {
          throw InputError("y4m: bad frame-rate field at byte offset " +
                           std::to_string(pos));
        }
        seq.frame_rate.num = parse_int_field(value.substr(0, colon), pos, "frame-rate");
        seq.frame_rate.den = parse_int_field(value.substr(colon + 1), pos, "frame-rate");
        break;
      }
      case 'C':
        colorspace = std::string(value);
        break;
      default:
        break;  // I, A, X...: irrelevant here, preserved via stream_header
    }
    pos = end;
  }
  if (!have_w || !have_h) {
    throw InputError("y4m: header missing W or H tag");
  }

  if (colorspace == "mono") {
    seq.subsampling = Subsampling::k400;
  } else if (colorspace.rfind("420", 0) == 0) {
    seq.subsampling = Subsampling::k420;
    if (seq.width % 2 != 0 || seq.height % 2 != 0) {
      throw InputError("y4m: odd dimensions " + std::to_string(seq.width) + "x" +
                       std::to_string(seq.height) + " with 4:2:0 sampling");
    }
  } else {
    throw InputError("y4m: unsupported colorspace C" + colorspace +
                     " (only 8-bit 420 variants and mono are supported)");
  }

  size_t luma_bytes = static_cast<size_t>(seq.width) * seq.height;
  size_t chroma_bytes = chroma_bytes_per_frame(seq.width, seq.height, seq.subsampling);

  pos = header_end + 1;
  int frame_index = 0;
  while (pos < text.size()) {
    size_t line_end = text.find('\n', pos);
    if (line_end == std::string_view::npos) {
      throw InputError("y4m: truncated frame header at frame " +
                       std::to_string(frame_index));
    }
    std::string_view frame_line = text.substr(pos, line_end - pos);
    if (frame_line.substr(0, 5) != "FRAME") {
      throw InputError("y4m: expected FRAME marker at frame " +
                       std::to_string(frame_index) + ", byte offset " +
                       std::to_string(pos));
    }
    seq.frame_headers.emplace_back(text.substr(pos, line_end - pos + 1));
    pos = line_end + 1;
    if (text.size() - pos < luma_bytes + chroma_bytes) {
      throw InputError("y4m: truncated frame payload at frame " +
                       std::to_string(frame_index));
    }
    LumaPlane plane;
    plane.width = seq.width;
    plane.height = seq.height;
    plane.samples.resize(luma_bytes);
    for (size_t i = 0; i < luma_bytes; ++i) {
      plane.samples[i] = static_cast<float>(data[pos + i]);
    }
    seq.frames.push_back(std::move(plane));
    pos += luma_bytes;
    seq.chroma.emplace_back(data.begin() + pos, data.begin() + pos + chroma_bytes);
    pos += chroma_bytes;
    ++frame_index;
  }
  return seq;
}

std::vector<uint8_t> serialize_y4m(const VideoSequence& seq) {
  std::string header = seq.stream_header;
  if (header.empty()) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "YUV4MPEG2 W%d H%d F%d:%d Ip A1:1 C%s\n",
                  seq.width, seq.height, seq.frame_rate.num, seq.frame_rate.den,
                  seq.subsampling == Subsampling::k400 ? "mono" : "420");
    header = buf;
  }
  size_t luma_bytes = static_cast<size_t>(seq.width) * seq.height;
  std::vector<uint8_t> out(header.begin(), header.end());
  for (int f = 0; f < seq.frame_count(); ++f) {
    std::string frame_header = f < static_cast<int>(seq.frame_headers.size())
                                   ? seq.frame_headers[f]
                                   : std::string("FRAME\n");
    out.insert(out.end(), frame_header.begin(), frame_header.end());
    const LumaPlane& plane = seq.frames[f];
    if (plane.samples.size() != luma_bytes) {
      throw InputError("serialize: frame " + std::to_string(f) +
                       " luma size does not match sequence geometry");
    }
    for (float v : plane.samples) {
      float clamped = std::min(255.0f, std::max(0.0f, v));
      out.push_back(static_cast<uint8_t>(clamped + 0.5f));
    }
    if (f < static_cast<int>(seq.chroma.size())) {
      out.insert(out.end(), seq.chroma[f].begin(), seq.chroma[f].end());
    } else if (seq.subsampling == Subsampling::k420) {
      out.insert(out.end(), chroma_bytes_per_frame(seq.width, seq.height, seq.subsampling),
                 uint8_t{128});
    }
  }
  return out;
}

VideoSequence read_raw_planar(std::span<const uint8_t> data, int width,
                              int height, Subsampling subsampling,
                              FrameRate frame_rate, std::string* warning) {
  if (width <= 0 || height <= 0) {
    throw ConfigError("raw reader: dimensions must be positive, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  if (subsampling == Subsampling::k420 && (width % 2 != 0 || height % 2 != 0)) {
    throw ConfigError("raw reader: odd dimensions with 4:2:0 sampling");
  }
  size_t luma_bytes = static_cast<size_t>(width) * height;
  size_t chroma_bytes = chroma_bytes_per_frame(width, height, subsampling);
  size_t frame_bytes = luma_bytes + chroma_bytes;

  VideoSequence seq;
  seq.width = width;
  seq.height = height;
  seq.frame_rate = frame_rate;
  seq.subsampling = subsampling;

  size_t pos = 0;
  while (data.size() - pos >= frame_bytes) {
    LumaPlane plane;
    plane.width = width;
    plane.height = height;
    plane.samples.resize(luma_bytes);
    for (size_t i = 0; i < luma_bytes; ++i) {
      plane.samples[i] = static_cast<float>(data[pos + i]);
    }
    seq.frames.push_back(std::move(plane));
    pos += luma_bytes;
    seq.chroma.emplace_back(data.begin() + pos, data.begin() + pos + chroma_bytes);
    pos += chroma_bytes;
  }
  if (seq.frames.empty()) {
    throw InputError("raw reader: input holds " + std::to_string(data.size()) +
                     " bytes, less than one " + std::to_string(frame_bytes) +
                     "-byte frame");
  }
  size_t leftover = data.size() - pos;
  if (leftover > 0 && warning != nullptr) {
    *warning = "ignoring " + std::to_string(leftover) +
               " trailing bytes (not a whole frame)";
  }
  return seq;
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) {
    throw InputError("cannot open " + path);
  }
  std::fseek(f, 0, SEEK_END);
  long size = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  std::vector<uint8_t> data(size > 0 ? static_cast<size_t>(size) : 0);
  if (!data.empty() && std::fread(data.data(), 1, data.size(), f) != data.size()) {
    std::fclose(f);
    throw InputError("short read from " + path);
  }
  std::fclose(f);
  return data;
}

void write_file_bytes(const std::string& path, std::span<const uint8_t> data) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) {
    throw InputError("cannot open " + path + " for writing");
  }
  if (!data.empty() && std::fwrite(data.data(), 1, data.size(), f) != data.size()) {
    std::fclose(f);
    throw InputError("short write to " + path);
  }
  std::fclose(f);
}

std::vector<PixelBlock> partition_blocks(const LumaPlane& plane, int block_size) {
  if (block_size <= 0) {
    throw ConfigError("block size must be positive, got " + std::to_string(block_size));
  }
  if (plane.width <= 0 || plane.height <= 0 ||
      plane.samples.size() != static_cast<size_t>(plane.width) * plane.height) {
    throw InputError("partition: plane geometry does not match sample count");
  }
  std::vector<PixelBlock> blocks;
  for (int by = 0; by < plane.height; by += block_size) {
    for (int bx = 0; bx < plane.width; bx += block_size) {
      PixelBlock block;
      block.origin_x = bx;
      block.origin_y = by;
      block.padded = bx + block_size > plane.width || by + block_size > plane.height;
      block.pixels.resize(static_cast<size_t>(block_size) * block_size);
      for (int y = 0; y < block_size; ++y) {
        int sy = std::min(by + y, plane.height - 1);
        for (int x = 0; x < block_size; ++x) {
          int sx = std::min(bx + x, plane.width - 1);
          block.pixels[static_cast<size_t>(y) * block_size + x] = plane.at(sx, sy);
        }
      }
      blocks.push_back(std::move(block));
    }
  }
  return blocks;
}

}  // namespace satpre
