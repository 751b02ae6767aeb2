#include "tomolab/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tomolab {
namespace {

static_assert(std::endian::native == std::endian::little,
              "raw i/o assumes a little-endian host");

void write_f32(std::ostream& os, const double* src, size_t n) {
  std::vector<float> buf(n);
  for (size_t k = 0; k < n; ++k) buf[k] = static_cast<float>(src[k]);
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(n * sizeof(float)));
}

std::vector<float> read_f32(const std::filesystem::path& path, size_t n) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::vector<float> buf(n);
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  if (static_cast<size_t>(is.gcount()) != n * sizeof(float))
    throw std::runtime_error("short read on " + path.string());
  return buf;
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
  std::filesystem::path h = path;
  h += ".hdr";
  return h;
}

// returns pairs in file order
std::vector<std::pair<std::string, long>> read_header(const std::filesystem::path& path) {
  std::ifstream is(sidecar(path));
  if (!is) throw std::runtime_error("cannot open " + sidecar(path).string());
  std::vector<std::pair<std::string, long>> kv;
  std::string key;
  long val;
  while (is >> key >> val) kv.emplace_back(key, val);
  return kv;
}

long header_field(const std::vector<std::pair<std::string, long>>& kv,
                  const std::string& key, const std::filesystem::path& path) {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  throw std::runtime_error("missing header field '" + key + "' for " + path.string());
}

void write_pgm16(const double* src, int height, int width,
                 const std::filesystem::path& path) {
  const size_t n = static_cast<size_t>(height) * width;
  double lo = src[0], hi = src[0];
  for (size_t k = 1; k < n; ++k) {
    lo = std::min(lo, src[k]);
    hi = std::max(hi, src[k]);
  }
  const double span = hi - lo;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "P5\n" << width << " " << height << "\n65535\n";
  std::vector<unsigned char> row(static_cast<size_t>(width) * 2);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      double v = span > 0 ? (src[static_cast<size_t>(i) * width + j] - lo) / span : 0.0;
      auto q = static_cast<uint16_t>(std::lround(v * 65535.0));
      row[2 * j] = static_cast<unsigned char>(q >> 8);  // big-endian per PGM
      row[2 * j + 1] = static_cast<unsigned char>(q & 0xff);
    }
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size()));
  }
  if (!os) throw std::runtime_error("write failed on " + path.string());
}

}  // namespace

void save_image_raw(const ImageGrid& img, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_f32(os, img.data(), img.size());
  if (!os) throw std::runtime_error("write failed on " + path.string());
  std::ostringstream h;
  h << "width " << img.width() << "\nheight " << img.height() << "\n";
  write_text_file(sidecar(path), h.str());
}

ImageGrid load_image_raw(const std::filesystem::path& path) {
  auto kv = read_header(path);
  const long w = header_field(kv, "width", path);
  const long h = header_field(kv, "height", path);
  ImageGrid img(static_cast<int>(h), static_cast<int>(w));
  auto buf = read_f32(path, img.size());
  for (size_t k = 0; k < buf.size(); ++k) img[k] = buf[k];
  return img;
}

void save_sinogram_raw(const Sinogram& s, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_f32(os, s.data(), s.size());
  if (!os) throw std::runtime_error("write failed on " + path.string());
  std::ostringstream h;
  h << "angles " << s.views() << "\ncells " << s.cells() << "\n";
  write_text_file(sidecar(path), h.str());
}

Sinogram load_sinogram_raw(const std::filesystem::path& path) {
  auto kv = read_header(path);
  const long m = header_field(kv, "angles", path);
  const long n = header_field(kv, "cells", path);
  Sinogram s(static_cast<int>(m), static_cast<int>(n));
  auto buf = read_f32(path, s.size());
  for (size_t k = 0; k < buf.size(); ++k) s[k] = buf[k];
  return s;
}

void save_pgm16(const ImageGrid& img, const std::filesystem::path& path) {
  write_pgm16(img.data(), img.height(), img.width(), path);
}

void save_pgm16(const Sinogram& s, const std::filesystem::path& path) {
  write_pgm16(s.data(), s.views(), s.cells(), path);
}

ImageGrid load_pgm16(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  int width = 0, height = 0, maxval = 0;
  is >> magic >> width >> height >> maxval;
  if (magic != "P5" || maxval != 65535)
    throw std::runtime_error("not a 16-bit P5 PGM: " + path.string());
  is.get();  // single whitespace after maxval
  ImageGrid img(height, width);
  std::vector<unsigned char> row(static_cast<size_t>(width) * 2);
  for (int i = 0; i < height; ++i) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
    if (!is) throw std::runtime_error("short read on " + path.string());
    for (int j = 0; j < width; ++j)
      img(i, j) = static_cast<double>((row[2 * j] << 8) | row[2 * j + 1]);
  }
  return img;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed on " + path.string());
}

}  // namespace tomolab
