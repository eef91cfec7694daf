#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "smdr/zgrid.hpp"

namespace smdr {

// Grid files: one JSON header line
//   {"dtype":"f64","endianness":"little","height":H,"width":W}
// followed by W*H raw 8-byte IEEE doubles, row-major.
std::string encode_grid(const ZGrid& z);
ZGrid decode_grid(std::string_view bytes);

// Comma-separated rows; each row is one grid row.
ZGrid parse_csv_grid(std::string_view text);

// Reads either format: a leading '{' selects the binary grid format.
ZGrid read_grid_file(const std::filesystem::path& path);
void write_grid_file(const std::filesystem::path& path, const ZGrid& z);

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

// Binary PGM (P5, maxval 255).
std::string encode_pgm(const GrayImage& img);
GrayImage decode_pgm(std::string_view bytes);

// Masks are stored with 0 (black) = selected, 255 = not selected; on read
// any pixel below 128 counts as selected.
GrayImage mask_to_image(const std::vector<bool>& mask, std::size_t width, std::size_t height);
std::vector<bool> image_to_mask(const GrayImage& img);

// Four-level comparison palette.
inline constexpr std::uint8_t kTruePositive = 0;
inline constexpr std::uint8_t kFalseNegative = 85;
inline constexpr std::uint8_t kFalsePositive = 170;
inline constexpr std::uint8_t kTrueNegative = 255;

GrayImage render_comparison(const std::vector<bool>& mask, const std::vector<bool>& truth,
                            std::size_t width, std::size_t height);

// "j,bmdr" rows, values with 17 significant digits.
std::string encode_trace_csv(const std::vector<double>& trace);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames over the destination.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

}  // namespace smdr
