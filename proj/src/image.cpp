// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include "rlcuts/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace rlcuts {

namespace {

void byteswap_floats(std::vector<float>& values) {
  for (float& v : values) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    bits = __builtin_bswap32(bits);
    std::memcpy(&v, &bits, 4);
  }
}

uint8_t encode_srgb_byte(double c) {
  const double clamped = std::clamp(c, 0.0, 1.0);
  const double encoded = std::pow(clamped, 1.0 / 2.2);
  return uint8_t(std::lround(encoded * 255.0));
}

}  // namespace

Image Framebuffer::resolve() const {
  Image image(width, height);
  for (size_t i = 0; i < sum.size(); ++i) {
    image.pixels[i] = count[i] > 0 ? sum[i] / double(count[i]) : Vec3{};
  }
  return image;
}

void write_pfm(const Image& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError(ImageIoErrc::io_error, "cannot open for writing: " + path);
  out << "PF\n" << image.width << " " << image.height << "\n-1.0\n";
  std::vector<float> row(size_t(image.width) * 3);
  for (int y = image.height - 1; y >= 0; --y) {
    for (int x = 0; x < image.width; ++x) {
      const Vec3& p = image.at(x, y);
      row[size_t(x) * 3 + 0] = float(p.x);
      row[size_t(x) * 3 + 1] = float(p.y);
      row[size_t(x) * 3 + 2] = float(p.z);
    }
    if constexpr (std::endian::native == std::endian::big) byteswap_floats(row);
    out.write(reinterpret_cast<const char*>(row.data()),
              std::streamsize(row.size() * sizeof(float)));
  }
  if (!out) throw ImageIoError(ImageIoErrc::io_error, "write failed: " + path);
}

Image read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(ImageIoErrc::io_error, "cannot open for reading: " + path);
  std::string magic;
  int width = 0;
  int height = 0;
  double scale = 0;
  in >> magic >> width >> height >> scale;
  if (!in || magic != "PF") {
    throw ImageIoError(ImageIoErrc::parse_error, "not a color PFM file: " + path);
  }
  if (width <= 0 || height <= 0 || scale == 0) {
    throw ImageIoError(ImageIoErrc::parse_error, "bad PFM header: " + path);
  }
  in.get();  // single whitespace byte after the scale token
  Image image(width, height);
  std::vector<float> row(size_t(width) * 3);
  const bool file_little_endian = scale < 0;
  for (int y = height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()),
            std::streamsize(row.size() * sizeof(float)));
    if (!in) throw ImageIoError(ImageIoErrc::parse_error, "truncated PFM data: " + path);
    const bool host_little_endian = std::endian::native == std::endian::little;
    if (file_little_endian != host_little_endian) byteswap_floats(row);
    for (int x = 0; x < width; ++x) {
      image.at(x, y) = Vec3{double(row[size_t(x) * 3 + 0]), double(row[size_t(x) * 3 + 1]),
                            double(row[size_t(x) * 3 + 2])};
    }
  }
  const double magnitude = std::abs(scale);
  if (magnitude != 1.0) {
    for (Vec3& p : image.pixels) p = p * magnitude;
  }
  return image;
}

void write_ppm(const Image& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError(ImageIoErrc::io_error, "cannot open for writing: " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<uint8_t> row(size_t(image.width) * 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Vec3& p = image.at(x, y);
      row[size_t(x) * 3 + 0] = encode_srgb_byte(p.x);
      row[size_t(x) * 3 + 1] = encode_srgb_byte(p.y);
      row[size_t(x) * 3 + 2] = encode_srgb_byte(p.z);
    }
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
  }
  if (!out) throw ImageIoError(ImageIoErrc::io_error, "write failed: " + path);
}

double mse(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("mse: image dimensions disagree");
  }
  double total = 0;
  for (size_t i = 0; i < a.pixels.size(); ++i) {
    const Vec3 d = a.pixels[i] - b.pixels[i];
    total += d.x * d.x + d.y * d.y + d.z * d.z;
  }
  return total / (3.0 * double(a.pixels.size()));
}

double relative_mse(const Image& a, const Image& b) {
  const double error = mse(a, b);
  double reference = 0;
  for (const Vec3& p : b.pixels) {
    reference += p.x * p.x + p.y * p.y + p.z * p.z;
  }
  reference /= 3.0 * double(b.pixels.size());
  if (reference == 0) return error == 0 ? 0 : std::numeric_limits<double>::infinity();
  return error / reference;
}

}  // namespace rlcuts
