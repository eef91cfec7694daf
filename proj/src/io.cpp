#include "smdr/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smdr/errors.hpp"

namespace smdr {

namespace {

std::uint64_t byteswap64(std::uint64_t v) {
  v = ((v & 0x00000000FFFFFFFFull) << 32) | ((v & 0xFFFFFFFF00000000ull) >> 32);
  v = ((v & 0x0000FFFF0000FFFFull) << 16) | ((v & 0xFFFF0000FFFF0000ull) >> 16);
  v = ((v & 0x00FF00FF00FF00FFull) << 8) | ((v & 0xFF00FF00FF00FF00ull) >> 8);
  return v;
}

void check_finite(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorKind::Data, "non-finite z value at index " + std::to_string(i));
    }
  }
}

[[noreturn]] void pgm_error(std::size_t offset, const std::string& what) {
  fail(ErrorKind::Data, "malformed PGM at byte offset " + std::to_string(offset) + ": " + what);
}

}  // namespace

std::string encode_grid(const ZGrid& z) {
  nlohmann::json header = {{"width", z.width},
                           {"height", z.height},
                           {"endianness", "little"},
                           {"dtype", "f64"}};
  std::string out = header.dump();
  out.push_back('\n');
  const std::size_t offset = out.size();
  out.resize(offset + 8 * z.values.size());
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(z.values[i]);
    if constexpr (std::endian::native == std::endian::big) bits = byteswap64(bits);
    std::memcpy(out.data() + offset + 8 * i, &bits, 8);
  }
  return out;
}

ZGrid decode_grid(std::string_view bytes) {
  if (bytes.empty()) fail(ErrorKind::Data, "empty grid input");
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos) fail(ErrorKind::Data, "grid header line is not terminated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, eol));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Data, std::string("grid header is not valid JSON: ") + e.what());
  }
  auto get_dim = [&](const char* key) -> std::size_t {
    if (!header.contains(key) || !header[key].is_number_unsigned() || header[key].get<std::size_t>() == 0) {
      fail(ErrorKind::Data, std::string("grid header: '") + key + "' must be a positive integer");
    }
    return header[key].get<std::size_t>();
  };
  const std::size_t width = get_dim("width");
  const std::size_t height = get_dim("height");
  if (header.value("dtype", std::string()) != "f64") {
    fail(ErrorKind::Data, "grid header: dtype must be \"f64\"");
  }
  const std::string endianness = header.value("endianness", std::string());
  if (endianness != "little" && endianness != "big") {
    fail(ErrorKind::Data, "grid header: endianness must be \"little\" or \"big\"");
  }
  const std::size_t payload = bytes.size() - eol - 1;
  if (payload != 8 * width * height) {
    fail(ErrorKind::Data, "dimension mismatch: header declares " + std::to_string(width) + "x" +
                              std::to_string(height) + " (" + std::to_string(8 * width * height) +
                              " bytes) but payload has " + std::to_string(payload) + " bytes");
  }
  const bool swap = (endianness == "big") != (std::endian::native == std::endian::big);
  std::vector<double> values(width * height);
  const char* data = bytes.data() + eol + 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, data + 8 * i, 8);
    if (swap) bits = byteswap64(bits);
    values[i] = std::bit_cast<double>(bits);
  }
  check_finite(values);
  return ZGrid(width, height, std::move(values));
}

ZGrid parse_csv_grid(std::string_view text) {
  std::vector<double> values;
  std::size_t width = 0, height = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    std::size_t cols = 0;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) comma = line.size();
      std::string_view field = line.substr(start, comma - start);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        fail(ErrorKind::Data, "CSV row " + std::to_string(height + 1) + ": cannot parse '" +
                                  std::string(field) + "'");
      }
      values.push_back(v);
      ++cols;
      start = comma + 1;
    }
    if (height == 0) {
      width = cols;
    } else if (cols != width) {
      fail(ErrorKind::Data, "CSV row " + std::to_string(height + 1) + " has " +
                                std::to_string(cols) + " columns, expected " + std::to_string(width));
    }
    ++height;
  }
  if (values.empty()) fail(ErrorKind::Data, "empty CSV grid");
  check_finite(values);
  return ZGrid(width, height, std::move(values));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "read error on '" + path.string() + "'");
  return ss.str();
}

ZGrid read_grid_file(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    if (bytes.empty()) fail(ErrorKind::Data, "file is empty");
    if (bytes.front() == '{') return decode_grid(bytes);
    return parse_csv_grid(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_grid_file(const std::filesystem::path& path, const ZGrid& z) {
  write_file_atomic(path, encode_grid(z));
}

std::string encode_pgm(const GrayImage& img) {
  require(img.pixels.size() == img.width * img.height, "image size mismatch");
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

GrayImage decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* what) -> std::size_t {
    skip_space();
    const std::size_t start = pos;
    std::size_t v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + static_cast<std::size_t>(bytes[pos] - '0');
      if (v > (1u << 30)) pgm_error(start, std::string(what) + " is too large");
      ++pos;
    }
    if (pos == start) pgm_error(start, std::string("expected ") + what);
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') pgm_error(0, "missing P5 magic");
  pos = 2;
  GrayImage img;
  img.width = read_uint("width");
  img.height = read_uint("height");
  const std::size_t maxval_at = pos;
  const std::size_t maxval = read_uint("maxval");
  if (img.width == 0 || img.height == 0) pgm_error(maxval_at, "zero image dimension");
  if (maxval == 0 || maxval > 255) pgm_error(maxval_at, "maxval must be in 1..255");
  if (pos >= bytes.size()) pgm_error(pos, "missing raster");
  ++pos;  // single whitespace after maxval
  const std::size_t need = img.width * img.height;
  if (bytes.size() - pos != need) {
    pgm_error(pos, "raster has " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                       std::to_string(need));
  }
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  if (maxval != 255) {
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(std::lround(p * 255.0 / maxval));
  }
  return img;
}

GrayImage mask_to_image(const std::vector<bool>& mask, std::size_t width, std::size_t height) {
  require(mask.size() == width * height, "mask size does not match dimensions");
  GrayImage img{width, height, std::vector<std::uint8_t>(mask.size())};
  for (std::size_t i = 0; i < mask.size(); ++i) img.pixels[i] = mask[i] ? 0 : 255;
  return img;
}

std::vector<bool> image_to_mask(const GrayImage& img) {
  std::vector<bool> mask(img.pixels.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = img.pixels[i] < 128;
  return mask;
}

GrayImage render_comparison(const std::vector<bool>& mask, const std::vector<bool>& truth,
                            std::size_t width, std::size_t height) {
  require(mask.size() == width * height && truth.size() == mask.size(),
          "mask and truth dimensions differ");
  GrayImage img{width, height, std::vector<std::uint8_t>(mask.size())};
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      img.pixels[i] = truth[i] ? kTruePositive : kFalsePositive;
    } else {
      img.pixels[i] = truth[i] ? kFalseNegative : kTrueNegative;
    }
  }
  return img;
}

std::string encode_trace_csv(const std::vector<double>& trace) {
  std::string out = "j,bmdr\n";
  char buf[64];
  for (std::size_t j = 0; j < trace.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", j, trace[j]);
    out += buf;
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open '" + tmp.string() + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      fail(ErrorKind::Io, "write error on '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot rename into '" + path.string() + "'");
  }
}

}  // namespace smdr
