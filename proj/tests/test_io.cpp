#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "tomolab/io.hpp"
#include "tomolab/rng.hpp"

using namespace tomolab;
using namespace tomolab::testing;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path d = fs::temp_directory_path() / "tomolab_io_tests";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("image raw round-trip is exact at float32") {
  SeededRng rng(21);
  ImageGrid img = random_image(7, 5, rng, -10.0, 10.0);
  for (size_t k = 0; k < img.size(); ++k)
    img[k] = static_cast<double>(static_cast<float>(img[k]));

  const fs::path p = temp_dir() / "img.raw";
  save_image_raw(img, p);
  ImageGrid back = load_image_raw(p);
  REQUIRE(back.height() == 7);
  REQUIRE(back.width() == 5);
  CHECK(max_abs_diff(back.vec(), img.vec()) == 0.0);

  CHECK(slurp(temp_dir() / "img.raw.hdr") == "width 5\nheight 7\n");
  CHECK(fs::file_size(p) == 7 * 5 * sizeof(float));
}

TEST_CASE("raw payload is little-endian float32 row-major") {
  ImageGrid img(1, 2);
  img(0, 0) = 1.0;
  img(0, 1) = -2.5;
  const fs::path p = temp_dir() / "le.raw";
  save_image_raw(img, p);
  const std::string bytes = slurp(p);
  REQUIRE(bytes.size() == 8);
  // 1.0f = 00 00 80 3f, -2.5f = 00 00 20 c0
  CHECK(static_cast<unsigned char>(bytes[2]) == 0x80);
  CHECK(static_cast<unsigned char>(bytes[3]) == 0x3f);
  CHECK(static_cast<unsigned char>(bytes[6]) == 0x20);
  CHECK(static_cast<unsigned char>(bytes[7]) == 0xc0);
}

TEST_CASE("sinogram raw round-trip and header") {
  SeededRng rng(22);
  Sinogram s = random_sinogram(Geometry{3, 4}, rng);
  for (size_t k = 0; k < s.size(); ++k)
    s[k] = static_cast<double>(static_cast<float>(s[k]));

  const fs::path p = temp_dir() / "sino.raw";
  save_sinogram_raw(s, p);
  Sinogram back = load_sinogram_raw(p);
  REQUIRE(back.views() == 3);
  REQUIRE(back.cells() == 4);
  CHECK(max_abs_diff(back.vec(), s.vec()) == 0.0);
  CHECK(slurp(temp_dir() / "sino.raw.hdr") == "angles 3\ncells 4\n");
}

TEST_CASE("loading errors are reported") {
  CHECK_THROWS_AS(load_image_raw(temp_dir() / "missing.raw"), std::runtime_error);

  // header present, payload truncated
  const fs::path p = temp_dir() / "short.raw";
  write_text_file(p, "xx");
  write_text_file(temp_dir() / "short.raw.hdr", "width 4\nheight 4\n");
  CHECK_THROWS_AS(load_image_raw(p), std::runtime_error);

  // image header offered to the sinogram loader
  ImageGrid img(2, 2, 1.0);
  const fs::path q = temp_dir() / "img2.raw";
  save_image_raw(img, q);
  CHECK_THROWS_AS(load_sinogram_raw(q), std::runtime_error);
}

TEST_CASE("pgm16 writes normalized big-endian P5") {
  ImageGrid img(2, 2);
  img(0, 0) = -1.0;  // -> 0
  img(0, 1) = 1.0;   // -> 65535
  img(1, 0) = 0.0;   // -> 32768 (rounded midpoint)
  img(1, 1) = 1.0;

  const fs::path p = temp_dir() / "img.pgm";
  save_pgm16(img, p);
  const std::string bytes = slurp(p);
  const std::string head = "P5\n2 2\n65535\n";
  REQUIRE(bytes.substr(0, head.size()) == head);
  const unsigned char* px = reinterpret_cast<const unsigned char*>(bytes.data() + head.size());
  CHECK(px[0] == 0x00);
  CHECK(px[1] == 0x00);
  CHECK(px[2] == 0xff);
  CHECK(px[3] == 0xff);
  CHECK((px[4] << 8 | px[5]) == 32768);

  ImageGrid back = load_pgm16(p);
  REQUIRE(back.height() == 2);
  CHECK(back(0, 0) == 0.0);
  CHECK(back(0, 1) == 65535.0);
  CHECK(back(1, 0) == 32768.0);
}

TEST_CASE("constant input maps to an all-zero pgm") {
  ImageGrid img(3, 3, 4.2);
  const fs::path p = temp_dir() / "const.pgm";
  save_pgm16(img, p);
  ImageGrid back = load_pgm16(p);
  for (size_t k = 0; k < back.size(); ++k) CHECK(back[k] == 0.0);
}

TEST_CASE("pgm16 accepts sinograms and rejects foreign formats") {
  Sinogram s(2, 3, 0.0);
  s(1, 2) = 1.0;
  const fs::path p = temp_dir() / "sino.pgm";
  save_pgm16(s, p);
  ImageGrid back = load_pgm16(p);
  CHECK(back.height() == 2);
  CHECK(back.width() == 3);
  CHECK(back(1, 2) == 65535.0);

  const fs::path bad = temp_dir() / "bad.pgm";
  write_text_file(bad, "P2\n2 2\n255\n0 0 0 0\n");
  CHECK_THROWS_AS(load_pgm16(bad), std::runtime_error);
}

}  // TEST_SUITE
