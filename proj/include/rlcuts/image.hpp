// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlcuts/math.hpp"

namespace rlcuts {

enum class ImageIoErrc {
  io_error,     // file cannot be opened, read, or written
  parse_error,  // malformed image payload
};

class ImageIoError : public std::runtime_error {
 public:
  ImageIoError(ImageIoErrc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ImageIoErrc code() const { return code_; }

 private:
  ImageIoErrc code_;
};

// Linear RGB raster, row-major with the top row first.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Vec3> pixels;

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(size_t(w) * size_t(h)) {}

  Vec3& at(int x, int y) { return pixels[size_t(y) * size_t(width) + size_t(x)]; }
  const Vec3& at(int x, int y) const {
    return pixels[size_t(y) * size_t(width) + size_t(x)];
  }
};

// Accumulation buffer: running sums plus sample counts. Workers own disjoint
// pixel ranges, so accumulation needs no synchronization.
struct Framebuffer {
  int width = 0;
  int height = 0;
  std::vector<Vec3> sum;
  std::vector<uint64_t> count;

  Framebuffer(int w, int h)
      : width(w), height(h), sum(size_t(w) * size_t(h)), count(size_t(w) * size_t(h)) {}

  void add_sample(int x, int y, const Vec3& value) {
    const size_t i = size_t(y) * size_t(width) + size_t(x);
    sum[i] += value;
    count[i] += 1;
  }

  Image resolve() const;
};

// Portable float map, RGB, float32, little-endian (negative scale), rows
// bottom-up per the format convention.
void write_pfm(const Image& image, const std::string& path);
Image read_pfm(const std::string& path);

// 8-bit preview with gamma 2.2 encoding; lossy, for eyeballing only.
void write_ppm(const Image& image, const std::string& path);

// Mean squared error over linear RGB, computed per channel then averaged.
// Throws std::invalid_argument on dimension mismatch.
double mse(const Image& a, const Image& b);

// mse(a, b) / mean(b^2); b is the reference.
double relative_mse(const Image& a, const Image& b);

}  // namespace rlcuts
