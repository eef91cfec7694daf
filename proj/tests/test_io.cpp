#include <array>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "smdr/errors.hpp"
#include "smdr/io.hpp"

using namespace smdr;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("smdr_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ZGrid random_grid(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> dim(1, 20);
  std::normal_distribution<double> v(0.0, 3.0);
  const std::size_t w = dim(rng), h = dim(rng);
  std::vector<double> values(w * h);
  for (auto& x : values) x = v(rng);
  return ZGrid(w, h, values);
}

}  // namespace

TEST_CASE("grid header layout") {
  const ZGrid z(2, 1, {1.0, -2.5});
  const std::string bytes = encode_grid(z);
  const std::string header = "{\"dtype\":\"f64\",\"endianness\":\"little\",\"height\":1,\"width\":2}\n";
  REQUIRE(bytes.size() == header.size() + 16);
  CHECK(bytes.substr(0, header.size()) == header);
  double first;
  std::memcpy(&first, bytes.data() + header.size(), 8);
  CHECK(first == 1.0);
}

TEST_CASE("grid round trip is bit exact") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const ZGrid z = random_grid(rng);
    const ZGrid back = decode_grid(encode_grid(z));
    CHECK(back.width == z.width);
    CHECK(back.height == z.height);
    CHECK(std::memcmp(back.values.data(), z.values.data(), 8 * z.size()) == 0);
  }
}

TEST_CASE("big-endian payloads are byte swapped") {
  const ZGrid z(1, 1, {3.25});
  std::string bytes = "{\"dtype\":\"f64\",\"endianness\":\"big\",\"height\":1,\"width\":1}\n";
  std::array<char, 8> raw;
  std::memcpy(raw.data(), &z.values[0], 8);
  for (int k = 7; k >= 0; --k) bytes.push_back(raw[k]);
  CHECK(decode_grid(bytes).values[0] == 3.25);
}

TEST_CASE("malformed grid files") {
  const std::string header = "{\"dtype\":\"f64\",\"endianness\":\"little\",\"height\":2,\"width\":2}\n";
  CHECK_THROWS_AS(decode_grid(""), Error);
  CHECK_THROWS_AS(decode_grid(header + std::string(24, '\0')), Error);
  try {
    decode_grid(header + std::string(40, '\0'));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
    CHECK(std::string(e.what()).find("dimension mismatch") != std::string::npos);
  }
  CHECK_THROWS_AS(decode_grid("{\"dtype\":\"f32\",\"endianness\":\"little\",\"height\":1,\"width\":1}\n" +
                              std::string(8, '\0')),
                  Error);
  CHECK_THROWS_AS(decode_grid("{not json}\n"), Error);
  double nan = std::numeric_limits<double>::quiet_NaN();
  std::string bad = "{\"dtype\":\"f64\",\"endianness\":\"little\",\"height\":1,\"width\":1}\n";
  bad.append(reinterpret_cast<const char*>(&nan), 8);
  CHECK_THROWS_AS(decode_grid(bad), Error);
}

TEST_CASE("CSV grids") {
  const ZGrid z = parse_csv_grid("1, 2.5,-3\n4,5,6\n");
  CHECK(z.width == 3);
  CHECK(z.height == 2);
  CHECK(z.values == std::vector<double>{1, 2.5, -3, 4, 5, 6});
  CHECK_THROWS_AS(parse_csv_grid("1,2\n3\n"), Error);
  CHECK_THROWS_AS(parse_csv_grid("1,x\n"), Error);
  CHECK_THROWS_AS(parse_csv_grid(""), Error);
}

TEST_CASE("grid files on disk") {
  const fs::path dir = scratch_dir("grid");
  const ZGrid z(3, 2, {0.5, 1, 2, 3, 4, 5});
  write_grid_file(dir / "z.grid", z);
  CHECK(read_grid_file(dir / "z.grid").values == z.values);
  write_file_atomic(dir / "z.csv", "1,2\n3,4\n");
  CHECK(read_grid_file(dir / "z.csv").width == 2);
  write_file_atomic(dir / "empty.grid", "");
  CHECK_THROWS_AS(read_grid_file(dir / "empty.grid"), Error);
  try {
    read_grid_file(dir / "missing.grid");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
    CHECK(std::string(e.what()).find("missing.grid") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("PGM round trip") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t w = 1 + rng() % 30, h = 1 + rng() % 30;
    std::vector<bool> mask(w * h);
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng() & 1;
    const GrayImage img = mask_to_image(mask, w, h);
    const GrayImage back = decode_pgm(encode_pgm(img));
    CHECK(back.width == w);
    CHECK(back.height == h);
    CHECK(image_to_mask(back) == mask);
  }
}

TEST_CASE("PGM header and polarity") {
  const GrayImage img = mask_to_image({true, false}, 2, 1);
  const std::string bytes = encode_pgm(img);
  CHECK(bytes.substr(0, 3) == "P5\n");
  CHECK(static_cast<unsigned char>(bytes[bytes.size() - 2]) == 0);
  CHECK(static_cast<unsigned char>(bytes[bytes.size() - 1]) == 255);
  const GrayImage blank = mask_to_image(std::vector<bool>(9, false), 3, 3);
  for (auto p : blank.pixels) CHECK(p == 255);
}

TEST_CASE("malformed PGM reports byte offsets") {
  for (const std::string bad : {std::string("P6\n2 1\n255\nab"), std::string("P5\n2 x\n255\nab"),
                                std::string("P5\n2 1\n255\na"), std::string("")}) {
    try {
      decode_pgm(bad);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Data);
      CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
  }
  // Comments are allowed in the header.
  const std::string commented("P5\n# made by hand\n2 1\n255\n\x00\xff", 28);
  CHECK(decode_pgm(commented).width == 2);
}

TEST_CASE("comparison palette") {
  const std::vector<bool> mask{true, false, true, false, true};
  const std::vector<bool> truth{true, true, false, false, true};
  const GrayImage img = render_comparison(mask, truth, 5, 1);
  CHECK(img.pixels == std::vector<std::uint8_t>{kTruePositive, kFalseNegative, kFalsePositive,
                                                kTrueNegative, kTruePositive});
  CHECK(kTruePositive == 0);
  CHECK(kFalseNegative == 85);
  CHECK(kFalsePositive == 170);
  CHECK(kTrueNegative == 255);
}

TEST_CASE("trace CSV") {
  const std::string csv = encode_trace_csv({1.0, 0.5, 0.1, 0.0});
  CHECK(csv == "j,bmdr\n0,1\n1,0.5\n2,0.10000000000000001\n3,0\n");
}

TEST_CASE("atomic writes leave no temporaries") {
  const fs::path dir = scratch_dir("atomic");
  write_file_atomic(dir / "a.txt", "first");
  write_file_atomic(dir / "a.txt", "second");
  CHECK(read_file(dir / "a.txt") == "second");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  CHECK_THROWS_AS(write_file_atomic(dir / "no" / "such" / "b.txt", "x"), Error);
  fs::remove_all(dir);
}
