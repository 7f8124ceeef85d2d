#include "wordsig/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <memory>

#include "wordsig/error.hpp"

namespace wordsig {

namespace {

struct BnFree {
  void operator()(BIGNUM* p) const { BN_clear_free(p); }
};
struct BnCtxFree {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct PointFree {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
struct GroupFree {
  void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
};

using Bn = std::unique_ptr<BIGNUM, BnFree>;
using BnCtx = std::unique_ptr<BN_CTX, BnCtxFree>;
using Point = std::unique_ptr<EC_POINT, PointFree>;

Bn make_bn() {
  Bn bn(BN_new());
  if (!bn) throw std::bad_alloc();
  return bn;
}

Bn bn_from(ByteView b) {
  Bn bn(BN_bin2bn(b.data(), static_cast<int>(b.size()), nullptr));
  if (!bn) throw std::bad_alloc();
  return bn;
}

void bn_to32(const BIGNUM* bn, std::uint8_t* out) {
  BN_bn2binpad(bn, out, 32);
}

// The group is fully built before first use and only read afterwards.
struct Curve {
  std::unique_ptr<EC_GROUP, GroupFree> group;
  Bn order;
  Bn half_order;

  Curve() : group(EC_GROUP_new_by_curve_name(NID_secp256k1)), order(make_bn()), half_order(make_bn()) {
    if (!group) throw std::runtime_error("secp256k1 unavailable in libcrypto");
    EC_GROUP_get_order(group.get(), order.get(), nullptr);
    BN_rshift1(half_order.get(), order.get());
  }

  EC_GROUP* g() const { return group.get(); }
  const BIGNUM* n() const { return order.get(); }
};

const Curve& curve() {
  static const Curve c;
  return c;
}

PublicKey derive_public(const BIGNUM* d, BN_CTX* ctx) {
  const Curve& c = curve();
  Point p(EC_POINT_new(c.g()));
  EC_POINT_mul(c.g(), p.get(), d, nullptr, nullptr, ctx);
  PublicKey out{};
  EC_POINT_point2oct(c.g(), p.get(), POINT_CONVERSION_COMPRESSED, out.data(), out.size(), ctx);
  return out;
}

using Mac = std::array<std::uint8_t, 32>;

Mac hmac_sha256(const Mac& key, std::initializer_list<ByteView> parts) {
  Bytes data;
  for (auto p : parts) data.insert(data.end(), p.begin(), p.end());
  Mac out{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len);
  return out;
}

}  // namespace

Signature Signature::from_bytes(ByteView b) {
  if (b.size() != 64) throw Error(ErrorCode::MalformedInput, "signature must be 64 bytes");
  Signature s;
  std::copy(b.begin(), b.end(), s.bytes.begin());
  return s;
}

KeyPair KeyPair::from_private(ByteView scalar) {
  if (scalar.size() != 32) throw Error(ErrorCode::MalformedInput, "private scalar must be 32 bytes");
  const Curve& c = curve();
  Bn d = bn_from(scalar);
  if (BN_is_zero(d.get()) || BN_cmp(d.get(), c.n()) >= 0)
    throw Error(ErrorCode::MalformedInput, "private scalar out of range");
  BnCtx ctx(BN_CTX_new());
  KeyPair kp;
  std::copy(scalar.begin(), scalar.end(), kp.private_.begin());
  kp.public_ = derive_public(d.get(), ctx.get());
  return kp;
}

Digest sha256(ByteView data) {
  Digest out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

KeyPair generate_keypair(std::optional<std::array<std::uint8_t, 32>> entropy) {
  std::array<std::uint8_t, 32> seed{};
  if (entropy) {
    seed = *entropy;
  } else if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw std::runtime_error("system RNG failure");
  }
  const Curve& c = curve();
  BnCtx ctx(BN_CTX_new());
  for (;;) {
    Bn d = bn_from(seed);
    BN_nnmod(d.get(), d.get(), c.n(), ctx.get());
    if (!BN_is_zero(d.get())) {
      std::array<std::uint8_t, 32> scalar{};
      bn_to32(d.get(), scalar.data());
      return KeyPair::from_private(scalar);
    }
    seed = sha256(seed);
  }
}

Signature sign(ByteView message, const KeyPair& key) {
  const Curve& c = curve();
  BnCtx ctx(BN_CTX_new());
  const Digest h = sha256(message);

  Bn d = bn_from(key.private_scalar());
  Bn z = bn_from(h);
  BN_nnmod(z.get(), z.get(), c.n(), ctx.get());
  std::array<std::uint8_t, 32> h1{};
  bn_to32(z.get(), h1.data());

  // RFC 6979 section 3.2 with HMAC-SHA256; qlen == hlen == 256 so
  // bits2int is the identity on the 32-byte block.
  Mac v;
  v.fill(0x01);
  Mac k;
  k.fill(0x00);
  const std::uint8_t zero = 0x00;
  const std::uint8_t one = 0x01;
  k = hmac_sha256(k, {v, {&zero, 1}, key.private_scalar(), h1});
  v = hmac_sha256(k, {v});
  k = hmac_sha256(k, {v, {&one, 1}, key.private_scalar(), h1});
  v = hmac_sha256(k, {v});

  Bn nonce = make_bn();
  Bn r = make_bn();
  Bn s = make_bn();
  Bn x = make_bn();
  Point p(EC_POINT_new(c.g()));
  for (;;) {
    v = hmac_sha256(k, {v});
    BN_bin2bn(v.data(), static_cast<int>(v.size()), nonce.get());
    if (!BN_is_zero(nonce.get()) && BN_cmp(nonce.get(), c.n()) < 0) {
      EC_POINT_mul(c.g(), p.get(), nonce.get(), nullptr, nullptr, ctx.get());
      EC_POINT_get_affine_coordinates(c.g(), p.get(), x.get(), nullptr, ctx.get());
      BN_nnmod(r.get(), x.get(), c.n(), ctx.get());
      if (!BN_is_zero(r.get())) {
        // s = k^-1 (z + r d) mod n
        Bn rd = make_bn();
        BN_mod_mul(rd.get(), r.get(), d.get(), c.n(), ctx.get());
        BN_mod_add(s.get(), z.get(), rd.get(), c.n(), ctx.get());
        Bn kinv = make_bn();
        BN_mod_inverse(kinv.get(), nonce.get(), c.n(), ctx.get());
        BN_mod_mul(s.get(), s.get(), kinv.get(), c.n(), ctx.get());
        if (!BN_is_zero(s.get())) break;
      }
    }
    k = hmac_sha256(k, {v, {&zero, 1}});
    v = hmac_sha256(k, {v});
  }

  if (BN_cmp(s.get(), c.half_order.get()) > 0) BN_sub(s.get(), c.n(), s.get());

  Signature sig;
  bn_to32(r.get(), sig.bytes.data());
  bn_to32(s.get(), sig.bytes.data() + 32);
  return sig;
}

bool is_valid_public_point(ByteView public_point) {
  if (public_point.size() != 33) return false;
  if (public_point[0] != 0x02 && public_point[0] != 0x03) return false;
  const Curve& c = curve();
  BnCtx ctx(BN_CTX_new());
  Point q(EC_POINT_new(c.g()));
  return EC_POINT_oct2point(c.g(), q.get(), public_point.data(), public_point.size(), ctx.get()) == 1 &&
         EC_POINT_is_on_curve(c.g(), q.get(), ctx.get()) == 1;
}

bool verify(ByteView message, const Signature& sig, ByteView public_point) {
  if (public_point.size() != 33) return false;
  if (public_point[0] != 0x02 && public_point[0] != 0x03) return false;
  const Curve& c = curve();
  BnCtx ctx(BN_CTX_new());
  if (!ctx) return false;

  Point q(EC_POINT_new(c.g()));
  if (EC_POINT_oct2point(c.g(), q.get(), public_point.data(), public_point.size(), ctx.get()) != 1) return false;
  if (EC_POINT_is_on_curve(c.g(), q.get(), ctx.get()) != 1) return false;

  Bn r = bn_from(ByteView(sig.bytes).first(32));
  Bn s = bn_from(ByteView(sig.bytes).last(32));
  if (BN_is_zero(r.get()) || BN_cmp(r.get(), c.n()) >= 0) return false;
  if (BN_is_zero(s.get()) || BN_cmp(s.get(), c.half_order.get()) > 0) return false;

  const Digest h = sha256(message);
  Bn z = bn_from(h);
  BN_nnmod(z.get(), z.get(), c.n(), ctx.get());

  Bn w = make_bn();
  if (!BN_mod_inverse(w.get(), s.get(), c.n(), ctx.get())) return false;
  Bn u1 = make_bn();
  Bn u2 = make_bn();
  BN_mod_mul(u1.get(), z.get(), w.get(), c.n(), ctx.get());
  BN_mod_mul(u2.get(), r.get(), w.get(), c.n(), ctx.get());

  Point x(EC_POINT_new(c.g()));
  if (EC_POINT_mul(c.g(), x.get(), u1.get(), q.get(), u2.get(), ctx.get()) != 1) return false;
  if (EC_POINT_is_at_infinity(c.g(), x.get())) return false;

  Bn xr = make_bn();
  EC_POINT_get_affine_coordinates(c.g(), x.get(), xr.get(), nullptr, ctx.get());
  BN_nnmod(xr.get(), xr.get(), c.n(), ctx.get());
  return BN_cmp(xr.get(), r.get()) == 0;
}

Fingerprint fingerprint(ByteView public_point) {
  if (public_point.size() != 33) throw Error(ErrorCode::MalformedInput, "public key must be 33 bytes");
  return Fingerprint{sha256(public_point)};
}

}  // namespace wordsig
