#pragma once

#include <filesystem>
#include <string>

#include "tomolab/array.hpp"

namespace tomolab {

// Raw serialization: little-endian float32, row-major, plus a sidecar text
// header at <path>.hdr. Images carry `width`/`height`, sinograms carry
// `angles`/`cells`. Round-trips are exact at float32 precision.
void save_image_raw(const ImageGrid& img, const std::filesystem::path& path);
ImageGrid load_image_raw(const std::filesystem::path& path);
void save_sinogram_raw(const Sinogram& s, const std::filesystem::path& path);
Sinogram load_sinogram_raw(const std::filesystem::path& path);

// 16-bit binary PGM (P5, maxval 65535, big-endian samples), min-max
// normalized. A constant array maps to all zeros.
void save_pgm16(const ImageGrid& img, const std::filesystem::path& path);
void save_pgm16(const Sinogram& s, const std::filesystem::path& path);
ImageGrid load_pgm16(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace tomolab
