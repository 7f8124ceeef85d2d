#include <png.h>
#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "wordsig/error.hpp"
#include "wordsig/qr.hpp"

namespace wordsig {

namespace {

void put_be32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_chunk(Bytes& out, const char (&type)[5], const Bytes& body) {
  put_be32(out, static_cast<std::uint32_t>(body.size()));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), body.begin(), body.end());
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + type_at, static_cast<uInt>(4 + body.size()));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

[[noreturn]] void unreadable(const std::string& what) { throw Error(ErrorCode::DecodeFailure, what); }

struct Gray {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  bool dark(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x] < 128; }
};

Gray decode_gray(ByteView png) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, png.data(), png.size()))
    unreadable(std::string("unreadable PNG: ") + image.message);
  image.format = PNG_FORMAT_GRAY;
  Gray g;
  g.width = static_cast<int>(image.width);
  g.height = static_cast<int>(image.height);
  g.pixels.resize(PNG_IMAGE_SIZE(image));
  // Transparent pixels composite onto white.
  png_color background{255, 255, 255};
  if (!png_image_finish_read(&image, &background, g.pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    unreadable("unreadable PNG: " + msg);
  }
  return g;
}

bool finder_at(const QrMatrix& m, int left, int top) {
  for (int dy = 0; dy < 7; ++dy) {
    for (int dx = 0; dx < 7; ++dx) {
      int ring = std::max(std::abs(dx - 3), std::abs(dy - 3));
      if (m.at(left + dx, top + dy) != (ring != 2)) return false;
    }
  }
  return true;
}

}  // namespace

Bytes render_png(const QrMatrix& matrix, int module_pixels, int quiet_zone) {
  if (module_pixels < 1) throw Error(ErrorCode::MalformedInput, "module_pixels must be at least 1");
  if (quiet_zone < 0) throw Error(ErrorCode::MalformedInput, "quiet zone must not be negative");
  const int modules = matrix.side() + 2 * quiet_zone;
  const auto px = static_cast<std::uint32_t>(modules * module_pixels);
  const std::size_t row_bytes = (px + 7) / 8;

  // Filter byte 0 then packed 1-bit samples; a set bit is white.
  Bytes raw;
  raw.reserve((row_bytes + 1) * px);
  Bytes row(row_bytes);
  for (int my = 0; my < modules; ++my) {
    std::fill(row.begin(), row.end(), 0);
    for (std::uint32_t x = 0; x < px; ++x) {
      int mx = static_cast<int>(x) / module_pixels - quiet_zone;
      int qy = my - quiet_zone;
      bool dark = mx >= 0 && mx < matrix.side() && qy >= 0 && qy < matrix.side() && matrix.at(mx, qy);
      if (!dark) row[x >> 3] |= static_cast<std::uint8_t>(0x80 >> (x & 7));
    }
    for (int rep = 0; rep < module_pixels; ++rep) {
      raw.push_back(0);
      raw.insert(raw.end(), row.begin(), row.end());
    }
  }

  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  Bytes z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw std::runtime_error("zlib compression failed");
  z.resize(zlen);

  Bytes out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  Bytes ihdr;
  put_be32(ihdr, px);
  put_be32(ihdr, px);
  ihdr.insert(ihdr.end(), {1, 0, 0, 0, 0});  // bit depth 1, grayscale, deflate, no filter, no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", {});
  return out;
}

QrMatrix read_png(ByteView png) {
  const Gray g = decode_gray(png);

  int min_x = g.width, min_y = g.height, max_x = -1, max_y = -1;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      if (!g.dark(x, y)) continue;
      min_x = std::min(min_x, x);
      min_y = std::min(min_y, y);
      max_x = std::max(max_x, x);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) unreadable("no finder patterns: image has no dark pixels");

  // The top edge of the top-left finder is a run of exactly 7 dark modules.
  int run = 0;
  while (min_x + run < g.width && g.dark(min_x + run, min_y)) ++run;
  if (run % 7 != 0) unreadable("no finder patterns: top-left finder edge not found");
  const int module_px = run / 7;

  const int width = max_x - min_x + 1;
  const int height = max_y - min_y + 1;
  if (width != height || width % module_px != 0) unreadable("no finder patterns: symbol is not square");
  const int side = width / module_px;
  if (side < 21 || side > 177 || (side - 17) % 4 != 0) unreadable("no finder patterns: bad symbol size");

  QrMatrix probe((side - 17) / 4, EcLevel::M);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      probe.set(x, y, g.dark(min_x + x * module_px + module_px / 2, min_y + y * module_px + module_px / 2));

  if (!finder_at(probe, 0, 0) || !finder_at(probe, side - 7, 0) || !finder_at(probe, 0, side - 7))
    unreadable("no finder patterns at the canonical corners");

  // Recover the level from the format information so the matrix round-trips;
  // an unreadable format area is left for qr_decode to report.
  EcLevel level = EcLevel::M;
  try {
    level = qr::read_ec_level(probe);
  } catch (const Error&) {
  }

  QrMatrix out(probe.version(), level);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) out.set(x, y, probe.at(x, y));
  return out;
}

}  // namespace wordsig
