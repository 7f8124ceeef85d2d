#include "wordsig/reed_solomon.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <stdexcept>

namespace wordsig::rs {

namespace {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<int, 256> log{};

  constexpr Tables() {
    int x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = static_cast<std::uint8_t>(x);
      log[x] = i;
      x <<= 1;
      if (x & 0x100) x ^= 0x11d;
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
    log[0] = -1;
  }
};

constexpr Tables kTables;

std::uint8_t poly_eval_low_first(const std::vector<std::uint8_t>& poly, std::uint8_t x) {
  std::uint8_t y = 0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) y = static_cast<std::uint8_t>(gf_mul(y, x) ^ *it);
  return y;
}

std::vector<std::uint8_t> syndromes(std::span<const std::uint8_t> block, int ecc_len) {
  std::vector<std::uint8_t> s(static_cast<std::size_t>(ecc_len));
  for (int j = 0; j < ecc_len; ++j) {
    std::uint8_t root = gf_pow2(j);
    std::uint8_t acc = 0;
    for (auto c : block) acc = static_cast<std::uint8_t>(gf_mul(acc, root) ^ c);
    s[static_cast<std::size_t>(j)] = acc;
  }
  return s;
}

}  // namespace

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) noexcept {
  if (a == 0 || b == 0) return 0;
  return kTables.exp[kTables.log[a] + kTables.log[b]];
}

std::uint8_t gf_pow2(int exponent) noexcept {
  exponent %= 255;
  if (exponent < 0) exponent += 255;
  return kTables.exp[exponent];
}

std::uint8_t gf_inv(std::uint8_t a) {
  if (a == 0) throw std::domain_error("GF(256) inverse of zero");
  return kTables.exp[255 - kTables.log[a]];
}

std::vector<std::uint8_t> encode(std::span<const std::uint8_t> data, int ecc_len) {
  if (ecc_len < 1 || ecc_len > 254) throw std::invalid_argument("bad Reed-Solomon degree");

  // Generator coefficients, highest degree first with the leading 1 dropped.
  std::vector<std::uint8_t> gen(static_cast<std::size_t>(ecc_len));
  gen.back() = 1;
  std::uint8_t root = 1;
  for (int i = 0; i < ecc_len; ++i) {
    for (std::size_t j = 0; j < gen.size(); ++j) {
      gen[j] = gf_mul(gen[j], root);
      if (j + 1 < gen.size()) gen[j] ^= gen[j + 1];
    }
    root = gf_mul(root, 0x02);
  }

  std::vector<std::uint8_t> rem(static_cast<std::size_t>(ecc_len));
  for (auto b : data) {
    std::uint8_t factor = b ^ rem.front();
    rem.erase(rem.begin());
    rem.push_back(0);
    for (std::size_t i = 0; i < rem.size(); ++i) rem[i] ^= gf_mul(gen[i], factor);
  }
  return rem;
}

int decode(std::span<std::uint8_t> block, int ecc_len) {
  const int n = static_cast<int>(block.size());
  if (ecc_len < 1 || ecc_len >= n || n > 255) return -1;

  auto synd = syndromes(block, ecc_len);
  bool clean = true;
  for (auto s : synd) clean = clean && s == 0;
  if (clean) return 0;

  // Berlekamp-Massey: error locator, lowest degree first.
  std::vector<std::uint8_t> locator{1};
  std::vector<std::uint8_t> prev{1};
  int degree = 0;
  int shift = 1;
  std::uint8_t prev_disc = 1;
  for (int k = 0; k < ecc_len; ++k) {
    std::uint8_t disc = synd[static_cast<std::size_t>(k)];
    for (int i = 1; i <= degree && i < static_cast<int>(locator.size()); ++i)
      disc ^= gf_mul(locator[static_cast<std::size_t>(i)], synd[static_cast<std::size_t>(k - i)]);
    if (disc == 0) {
      ++shift;
      continue;
    }
    std::uint8_t coef = gf_mul(disc, gf_inv(prev_disc));
    std::vector<std::uint8_t> next = locator;
    if (next.size() < prev.size() + static_cast<std::size_t>(shift)) next.resize(prev.size() + shift, 0);
    for (std::size_t i = 0; i < prev.size(); ++i) next[i + shift] ^= gf_mul(coef, prev[i]);
    if (2 * degree <= k) {
      prev = locator;
      degree = k + 1 - degree;
      prev_disc = disc;
      shift = 1;
    } else {
      ++shift;
    }
    locator = std::move(next);
  }
  while (locator.size() > 1 && locator.back() == 0) locator.pop_back();
  if (static_cast<int>(locator.size()) - 1 != degree || 2 * degree > ecc_len) return -1;

  // Evaluator = S(x) * locator(x) mod x^ecc_len.
  std::vector<std::uint8_t> evaluator(static_cast<std::size_t>(ecc_len), 0);
  for (std::size_t i = 0; i < locator.size(); ++i)
    for (std::size_t j = 0; j < synd.size() && i + j < evaluator.size(); ++j)
      evaluator[i + j] ^= gf_mul(locator[i], synd[j]);

  std::vector<std::uint8_t> derivative;
  for (std::size_t k = 1; k < locator.size(); ++k) derivative.push_back(k % 2 == 1 ? locator[k] : 0);

  // Chien search over the byte positions; byte i sits at x^(n-1-i).
  std::vector<std::pair<int, std::uint8_t>> fixes;
  for (int i = 0; i < n; ++i) {
    const int power = n - 1 - i;
    const std::uint8_t x_inv = gf_pow2(-power);
    if (poly_eval_low_first(locator, x_inv) != 0) continue;
    std::uint8_t denom = poly_eval_low_first(derivative, x_inv);
    if (denom == 0) return -1;
    std::uint8_t magnitude =
        gf_mul(gf_pow2(power), gf_mul(poly_eval_low_first(evaluator, x_inv), gf_inv(denom)));
    fixes.emplace_back(i, magnitude);
  }
  if (static_cast<int>(fixes.size()) != degree) return -1;

  std::vector<std::uint8_t> corrected(block.begin(), block.end());
  for (auto [i, magnitude] : fixes) corrected[static_cast<std::size_t>(i)] ^= magnitude;
  for (auto s : syndromes(corrected, ecc_len))
    if (s != 0) return -1;
  std::copy(corrected.begin(), corrected.end(), block.begin());
  return degree;
}

}  // namespace wordsig::rs
