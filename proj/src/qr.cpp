#include "wordsig/qr.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>

#include "wordsig/error.hpp"
#include "wordsig/reed_solomon.hpp"

namespace wordsig {

namespace {

// Indexed [level][version]; index 0 is unused.
constexpr std::int8_t kEccPerBlock[4][41] = {
    {-1, 7,  10, 15, 20, 26, 18, 20, 24, 30, 18, 20, 24, 26, 30, 22, 24, 28, 30, 28, 28,
     28, 28, 30, 30, 26, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30},
    {-1, 10, 16, 26, 18, 24, 16, 18, 22, 22, 26, 30, 22, 22, 24, 24, 28, 28, 26, 26, 26,
     26, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28},
    {-1, 13, 22, 18, 26, 18, 24, 18, 22, 20, 24, 28, 26, 24, 20, 30, 24, 28, 28, 26, 30,
     28, 30, 30, 30, 30, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30},
    {-1, 17, 28, 22, 16, 22, 28, 26, 26, 24, 28, 24, 28, 22, 24, 24, 30, 28, 28, 26, 28,
     30, 24, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30},
};

constexpr std::int8_t kNumBlocks[4][41] = {
    {-1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 4, 4, 4, 4, 4, 6, 6, 6, 6, 7, 8,
     8, 9, 9, 10, 12, 12, 12, 13, 14, 15, 16, 17, 18, 19, 19, 20, 21, 22, 24, 25},
    {-1, 1, 1, 1, 2, 2, 4, 4, 4, 5, 5, 5, 8, 9, 9, 10, 10, 11, 13, 14, 16,
     17, 17, 18, 20, 21, 23, 25, 26, 28, 29, 31, 33, 35, 37, 38, 40, 43, 45, 47, 49},
    {-1, 1, 1, 2, 2, 4, 4, 6, 6, 8, 8, 8, 10, 12, 16, 12, 17, 16, 18, 21, 20,
     23, 23, 25, 27, 29, 34, 34, 35, 38, 40, 43, 45, 48, 51, 53, 56, 59, 62, 65, 68},
    {-1, 1, 1, 2, 4, 4, 4, 5, 6, 8, 8, 11, 11, 16, 16, 18, 16, 19, 21, 25, 25,
     25, 34, 30, 32, 35, 37, 40, 42, 45, 48, 51, 54, 57, 60, 63, 66, 70, 74, 77, 81},
};

// Two-bit level indicator stored in the format information.
constexpr int format_bits_of(EcLevel level) {
  switch (level) {
    case EcLevel::L: return 1;
    case EcLevel::M: return 0;
    case EcLevel::Q: return 3;
    case EcLevel::H: return 2;
  }
  return 0;
}

constexpr EcLevel level_from_format_bits(int bits) {
  constexpr EcLevel table[4] = {EcLevel::M, EcLevel::L, EcLevel::H, EcLevel::Q};
  return table[bits & 3];
}

int idx(EcLevel level) { return static_cast<int>(level); }

[[noreturn]] void decode_failure(const std::string& what) { throw Error(ErrorCode::DecodeFailure, what); }

void check_version(int version) {
  if (version < qr::kMinVersion || version > qr::kMaxVersion) throw std::invalid_argument("QR version out of range");
}

int raw_data_modules(int version) {
  int result = (16 * version + 128) * version + 64;
  if (version >= 2) {
    int num_align = version / 7 + 2;
    result -= (25 * num_align - 10) * num_align - 55;
    if (version >= 7) result -= 36;
  }
  return result;
}

int data_codewords(int version, EcLevel level) {
  return raw_data_modules(version) / 8 - kEccPerBlock[idx(level)][version] * kNumBlocks[idx(level)][version];
}

int char_count_bits(int version) { return version <= 9 ? 8 : 16; }

std::vector<int> alignment_positions(int version) {
  if (version == 1) return {};
  int num_align = version / 7 + 2;
  int step = version == 32 ? 26 : (version * 4 + num_align * 2 + 1) / (2 * num_align - 2) * 2;
  std::vector<int> result;
  for (int i = 0, pos = version * 4 + 10; i < num_align - 1; ++i, pos -= step) result.insert(result.begin(), pos);
  result.insert(result.begin(), 6);
  return result;
}

std::uint32_t format_word(EcLevel level, int mask) {
  std::uint32_t data = static_cast<std::uint32_t>(format_bits_of(level) << 3 | mask);
  std::uint32_t rem = data;
  for (int i = 0; i < 10; ++i) rem = (rem << 1) ^ ((rem >> 9) * 0x537);
  return (data << 10 | rem) ^ 0x5412;
}

std::uint32_t version_word(int version) {
  std::uint32_t rem = static_cast<std::uint32_t>(version);
  for (int i = 0; i < 12; ++i) rem = (rem << 1) ^ ((rem >> 11) * 0x1f25);
  return static_cast<std::uint32_t>(version) << 12 | rem;
}

bool bit(std::uint32_t word, int i) { return (word >> i & 1) != 0; }

bool mask_bit(int mask, int x, int y) {
  switch (mask) {
    case 0: return (x + y) % 2 == 0;
    case 1: return y % 2 == 0;
    case 2: return x % 3 == 0;
    case 3: return (x + y) % 3 == 0;
    case 4: return (x / 3 + y / 2) % 2 == 0;
    case 5: return x * y % 2 + x * y % 3 == 0;
    case 6: return (x * y % 2 + x * y % 3) % 2 == 0;
    case 7: return ((x + y) % 2 + x * y % 3) % 2 == 0;
  }
  return false;
}

// Module coordinates of the two format-information copies, bit 0 first.
struct FormatPositions {
  std::array<std::pair<int, int>, 15> first;
  std::array<std::pair<int, int>, 15> second;
};

FormatPositions format_positions(int side) {
  FormatPositions p{};
  for (int i = 0; i <= 5; ++i) p.first[i] = {8, i};
  p.first[6] = {8, 7};
  p.first[7] = {8, 8};
  p.first[8] = {7, 8};
  for (int i = 9; i < 15; ++i) p.first[i] = {14 - i, 8};
  for (int i = 0; i < 8; ++i) p.second[i] = {side - 1 - i, 8};
  for (int i = 8; i < 15; ++i) p.second[i] = {8, side - 15 + i};
  return p;
}

// Builds function patterns into `m` and marks them in `reserved`.
class Canvas {
 public:
  Canvas(int version, EcLevel level)
      : matrix(version, level),
        reserved(static_cast<std::size_t>(matrix.side()), std::vector<bool>(static_cast<std::size_t>(matrix.side()))) {
    draw_function_patterns();
  }

  QrMatrix matrix;
  std::vector<std::vector<bool>> reserved;

  void set_function(int x, int y, bool dark) {
    matrix.set(x, y, dark);
    reserved[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = true;
  }

  bool is_function(int x, int y) const {
    return reserved[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
  }

  void draw_format(int mask) {
    const std::uint32_t word = format_word(matrix.ec_level(), mask);
    const auto pos = format_positions(matrix.side());
    for (int i = 0; i < 15; ++i) {
      set_function(pos.first[i].first, pos.first[i].second, bit(word, i));
      set_function(pos.second[i].first, pos.second[i].second, bit(word, i));
    }
    set_function(8, matrix.side() - 8, true);
  }

 private:
  void draw_function_patterns() {
    const int side = matrix.side();
    for (int i = 0; i < side; ++i) {
      set_function(6, i, i % 2 == 0);
      set_function(i, 6, i % 2 == 0);
    }
    draw_finder(3, 3);
    draw_finder(side - 4, 3);
    draw_finder(3, side - 4);

    const auto align = alignment_positions(matrix.version());
    const int n = static_cast<int>(align.size());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if ((i == 0 && j == 0) || (i == 0 && j == n - 1) || (i == n - 1 && j == 0)) continue;
        for (int dy = -2; dy <= 2; ++dy)
          for (int dx = -2; dx <= 2; ++dx)
            set_function(align[i] + dx, align[j] + dy, std::max(std::abs(dx), std::abs(dy)) != 1);
      }
    }

    draw_format(0);  // placeholder, redrawn once the mask is chosen

    if (matrix.version() >= 7) {
      const std::uint32_t word = version_word(matrix.version());
      for (int i = 0; i < 18; ++i) {
        int a = side - 11 + i % 3;
        int b = i / 3;
        set_function(a, b, bit(word, i));
        set_function(b, a, bit(word, i));
      }
    }
  }

  void draw_finder(int cx, int cy) {
    const int side = matrix.side();
    for (int dy = -4; dy <= 4; ++dy) {
      for (int dx = -4; dx <= 4; ++dx) {
        int x = cx + dx;
        int y = cy + dy;
        if (x < 0 || x >= side || y < 0 || y >= side) continue;
        int dist = std::max(std::abs(dx), std::abs(dy));
        set_function(x, y, dist != 2 && dist != 4);
      }
    }
  }
};

// Zig-zag traversal of the non-function modules, in codeword bit order.
template <typename Visit>
void for_each_data_module(const Canvas& canvas, Visit&& visit) {
  const int side = canvas.matrix.side();
  for (int right = side - 1; right >= 1; right -= 2) {
    if (right == 6) right = 5;
    for (int vert = 0; vert < side; ++vert) {
      for (int j = 0; j < 2; ++j) {
        int x = right - j;
        bool upward = ((right + 1) & 2) == 0;
        int y = upward ? side - 1 - vert : vert;
        if (!canvas.is_function(x, y)) visit(x, y);
      }
    }
  }
}

void apply_mask(Canvas& canvas, int mask) {
  const int side = canvas.matrix.side();
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      if (!canvas.is_function(x, y) && mask_bit(mask, x, y)) canvas.matrix.flip(x, y);
}

long penalty_score(const QrMatrix& m) {
  const int side = m.side();
  long score = 0;

  auto line_penalty = [&](auto&& module) {
    // Runs of five or more same-coloured modules.
    for (int a = 0; a < side; ++a) {
      int run = 0;
      bool colour = false;
      for (int b = 0; b < side; ++b) {
        bool c = module(a, b);
        if (b == 0 || c != colour) {
          colour = c;
          run = 1;
        } else if (++run == 5) {
          score += 3;
        } else if (run > 5) {
          ++score;
        }
      }
    }
    // 1:1:3:1:1 finder-like sequences with four light modules on one side.
    static constexpr std::array<bool, 11> kA = {true, false, true, true, true, false, true, false, false, false, false};
    static constexpr std::array<bool, 11> kB = {false, false, false, false, true, false, true, true, true, false, true};
    for (int a = 0; a < side; ++a) {
      for (int b = 0; b + 11 <= side; ++b) {
        bool match_a = true;
        bool match_b = true;
        for (int k = 0; k < 11 && (match_a || match_b); ++k) {
          bool c = module(a, b + k);
          match_a = match_a && c == kA[static_cast<std::size_t>(k)];
          match_b = match_b && c == kB[static_cast<std::size_t>(k)];
        }
        if (match_a) score += 40;
        if (match_b) score += 40;
      }
    }
  };
  line_penalty([&](int row, int col) { return m.at(col, row); });
  line_penalty([&](int col, int row) { return m.at(col, row); });

  for (int y = 0; y + 1 < side; ++y) {
    for (int x = 0; x + 1 < side; ++x) {
      bool c = m.at(x, y);
      if (c == m.at(x + 1, y) && c == m.at(x, y + 1) && c == m.at(x + 1, y + 1)) score += 3;
    }
  }

  long dark = 0;
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) dark += m.at(x, y) ? 1 : 0;
  const long total = static_cast<long>(side) * side;
  long k = (std::labs(dark * 20 - total * 10) + total - 1) / total - 1;
  score += k * 10;
  return score;
}

struct BlockLayout {
  int num_blocks;
  int ecc_len;
  int num_short;
  int short_len;  // total codewords in a short block
};

BlockLayout block_layout(int version, EcLevel level) {
  BlockLayout l{};
  l.num_blocks = kNumBlocks[idx(level)][version];
  l.ecc_len = kEccPerBlock[idx(level)][version];
  const int raw = raw_data_modules(version) / 8;
  l.num_short = l.num_blocks - raw % l.num_blocks;
  l.short_len = raw / l.num_blocks;
  return l;
}

std::vector<std::uint8_t> add_ecc_and_interleave(const std::vector<std::uint8_t>& data, int version,
                                                 EcLevel level) {
  const BlockLayout l = block_layout(version, level);
  std::vector<std::vector<std::uint8_t>> blocks;
  std::size_t k = 0;
  for (int i = 0; i < l.num_blocks; ++i) {
    std::size_t len = static_cast<std::size_t>(l.short_len - l.ecc_len + (i < l.num_short ? 0 : 1));
    std::vector<std::uint8_t> block(data.begin() + static_cast<std::ptrdiff_t>(k),
                                    data.begin() + static_cast<std::ptrdiff_t>(k + len));
    k += len;
    auto ecc = rs::encode(block, l.ecc_len);
    if (i < l.num_short) block.push_back(0);
    block.insert(block.end(), ecc.begin(), ecc.end());
    blocks.push_back(std::move(block));
  }
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < blocks[0].size(); ++i) {
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      if (i != static_cast<std::size_t>(l.short_len - l.ecc_len) || static_cast<int>(j) >= l.num_short)
        out.push_back(blocks[j][i]);
    }
  }
  return out;
}

class BitWriter {
 public:
  void append(std::uint32_t value, int count) {
    for (int i = count - 1; i >= 0; --i) bits_.push_back((value >> i & 1) != 0);
  }
  std::size_t size() const { return bits_.size(); }
  const std::vector<bool>& bits() const { return bits_; }

 private:
  std::vector<bool> bits_;
};

class BitReader {
 public:
  explicit BitReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() * 8 - pos_; }

  std::uint32_t read(int count) {
    if (static_cast<std::size_t>(count) > remaining()) decode_failure("QR bit stream ended early");
    std::uint32_t v = 0;
    for (int i = 0; i < count; ++i, ++pos_) v = v << 1 | ((bytes_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1);
    return v;
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

int popcount15(std::uint32_t v) { return __builtin_popcount(v & 0x7fff); }

std::uint32_t read_word(const QrMatrix& m, const std::array<std::pair<int, int>, 15>& pos) {
  std::uint32_t w = 0;
  for (int i = 0; i < 15; ++i)
    if (m.at(pos[i].first, pos[i].second)) w |= 1u << i;
  return w;
}

// Returns {level, mask}; BCH(15,5) corrects up to three bit errors per copy.
std::pair<EcLevel, int> read_format(const QrMatrix& m) {
  const auto pos = format_positions(m.side());
  const std::uint32_t a = read_word(m, pos.first);
  const std::uint32_t b = read_word(m, pos.second);
  int best = std::numeric_limits<int>::max();
  std::pair<EcLevel, int> result{EcLevel::M, 0};
  for (int level_bits = 0; level_bits < 4; ++level_bits) {
    for (int mask = 0; mask < 8; ++mask) {
      EcLevel level = level_from_format_bits(level_bits);
      std::uint32_t w = format_word(level, mask);
      int d = std::min(popcount15(w ^ a), popcount15(w ^ b));
      if (d < best) {
        best = d;
        result = {level, mask};
      }
    }
  }
  if (best > 3) decode_failure("format information unreadable");
  return result;
}

constexpr std::string_view kAlnum = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:";

std::string parse_segments(const std::vector<std::uint8_t>& data, int version) {
  BitReader in(data);
  std::string out;
  while (in.remaining() >= 4) {
    std::uint32_t mode = in.read(4);
    if (mode == 0) break;
    if (mode == 0x4) {
      std::uint32_t count = in.read(version <= 9 ? 8 : 16);
      for (std::uint32_t i = 0; i < count; ++i) out.push_back(static_cast<char>(in.read(8)));
    } else if (mode == 0x1) {
      std::uint32_t count = in.read(version <= 9 ? 10 : version <= 26 ? 12 : 14);
      for (; count >= 3; count -= 3) {
        std::uint32_t v = in.read(10);
        if (v > 999) decode_failure("bad numeric group");
        out += std::to_string(v / 100) + std::to_string(v / 10 % 10) + std::to_string(v % 10);
      }
      if (count == 2) {
        std::uint32_t v = in.read(7);
        if (v > 99) decode_failure("bad numeric group");
        out += std::to_string(v / 10) + std::to_string(v % 10);
      } else if (count == 1) {
        std::uint32_t v = in.read(4);
        if (v > 9) decode_failure("bad numeric group");
        out += std::to_string(v);
      }
    } else if (mode == 0x2) {
      std::uint32_t count = in.read(version <= 9 ? 9 : version <= 26 ? 11 : 13);
      for (; count >= 2; count -= 2) {
        std::uint32_t v = in.read(11);
        if (v >= 45 * 45) decode_failure("bad alphanumeric pair");
        out.push_back(kAlnum[v / 45]);
        out.push_back(kAlnum[v % 45]);
      }
      if (count == 1) {
        std::uint32_t v = in.read(6);
        if (v >= 45) decode_failure("bad alphanumeric character");
        out.push_back(kAlnum[v]);
      }
    } else {
      decode_failure("unsupported QR segment mode");
    }
  }
  return out;
}

}  // namespace

char to_char(EcLevel level) {
  constexpr char names[] = {'L', 'M', 'Q', 'H'};
  return names[idx(level)];
}

QrMatrix::QrMatrix(int version, EcLevel ec_level)
    : version_(version),
      ec_level_(ec_level),
      side_(qr::side_for_version(version)),
      bits_(static_cast<std::size_t>(side_) * side_, 0) {
  check_version(version);
}

namespace qr {

int byte_capacity(int version, EcLevel level) {
  check_version(version);
  return (data_codewords(version, level) * 8 - 4 - char_count_bits(version)) / 8;
}

int ecc_codewords_per_block(int version, EcLevel level) {
  check_version(version);
  return kEccPerBlock[idx(level)][version];
}

int num_blocks(int version, EcLevel level) {
  check_version(version);
  return kNumBlocks[idx(level)][version];
}

EcLevel read_ec_level(const QrMatrix& matrix) { return read_format(matrix).first; }

std::vector<std::vector<bool>> function_pattern_mask(int version) {
  return Canvas(version, EcLevel::M).reserved;
}

}  // namespace qr

QrMatrix qr_encode(std::string_view text, EcLevel ec_level) {
  int version = 0;
  for (int v = qr::kMinVersion; v <= qr::kMaxVersion; ++v) {
    if (static_cast<int>(text.size()) <= qr::byte_capacity(v, ec_level)) {
      version = v;
      break;
    }
  }
  if (version == 0)
    throw Error(ErrorCode::PayloadTooLarge, "payload of " + std::to_string(text.size()) +
                                                " bytes exceeds QR version 40 capacity");

  BitWriter bw;
  bw.append(0x4, 4);
  bw.append(static_cast<std::uint32_t>(text.size()), char_count_bits(version));
  for (char c : text) bw.append(static_cast<std::uint8_t>(c), 8);

  const std::size_t capacity_bits = static_cast<std::size_t>(data_codewords(version, ec_level)) * 8;
  bw.append(0, static_cast<int>(std::min<std::size_t>(4, capacity_bits - bw.size())));
  bw.append(0, static_cast<int>((8 - bw.size() % 8) % 8));

  std::vector<std::uint8_t> data(bw.size() / 8);
  for (std::size_t i = 0; i < bw.size(); ++i)
    if (bw.bits()[i]) data[i >> 3] |= static_cast<std::uint8_t>(1 << (7 - (i & 7)));
  for (std::uint8_t pad = 0xec; data.size() * 8 < capacity_bits; pad ^= 0xec ^ 0x11) data.push_back(pad);

  const auto codewords = add_ecc_and_interleave(data, version, ec_level);

  Canvas canvas(version, ec_level);
  std::size_t i = 0;
  for_each_data_module(canvas, [&](int x, int y) {
    bool dark = i < codewords.size() * 8 && ((codewords[i >> 3] >> (7 - (i & 7))) & 1) != 0;
    canvas.matrix.set(x, y, dark);
    ++i;
  });

  int best_mask = 0;
  long best_score = std::numeric_limits<long>::max();
  for (int mask = 0; mask < 8; ++mask) {
    apply_mask(canvas, mask);
    canvas.draw_format(mask);
    long score = penalty_score(canvas.matrix);
    if (score < best_score) {
      best_score = score;
      best_mask = mask;
    }
    apply_mask(canvas, mask);
  }
  apply_mask(canvas, best_mask);
  canvas.draw_format(best_mask);
  return canvas.matrix;
}

std::string qr_decode(const QrMatrix& matrix) {
  const int side = matrix.side();
  if (side < qr::side_for_version(qr::kMinVersion) || (side - 17) % 4 != 0)
    decode_failure("matrix side is not a QR size");
  const int version = (side - 17) / 4;
  const auto [level, mask] = read_format(matrix);

  Canvas canvas(version, level);
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(raw_data_modules(version) / 8));
  std::size_t i = 0;
  for_each_data_module(canvas, [&](int x, int y) {
    if (i < raw.size() * 8 && (matrix.at(x, y) != mask_bit(mask, x, y)))
      raw[i >> 3] |= static_cast<std::uint8_t>(1 << (7 - (i & 7)));
    ++i;
  });

  // De-interleave in the same order the encoder interleaved.
  const BlockLayout l = block_layout(version, level);
  const int short_data = l.short_len - l.ecc_len;
  std::vector<std::vector<std::uint8_t>> blocks(static_cast<std::size_t>(l.num_blocks));
  std::size_t k = 0;
  for (int pos = 0; pos <= l.short_len; ++pos) {
    for (int j = 0; j < l.num_blocks; ++j) {
      if (pos == short_data && j < l.num_short) continue;
      blocks[static_cast<std::size_t>(j)].push_back(raw[k++]);
    }
  }

  std::vector<std::uint8_t> data;
  for (int j = 0; j < l.num_blocks; ++j) {
    auto& block = blocks[static_cast<std::size_t>(j)];
    if (rs::decode(block, l.ecc_len) < 0) decode_failure("too many errors in QR block " + std::to_string(j));
    data.insert(data.end(), block.begin(), block.end() - l.ecc_len);
  }
  return parse_segments(data, version);
}

}  // namespace wordsig
