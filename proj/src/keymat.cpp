#include "bido/keymat.hpp"

#include <algorithm>
#include <cstring>
#include <memory>

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>

#include "bido/error.hpp"
#include "bido/hash.hpp"

namespace bido {
namespace {

struct BnDeleter {
  void operator()(BIGNUM* bn) const { BN_clear_free(bn); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* ctx) const { BN_CTX_free(ctx); }
};
struct PointDeleter {
  void operator()(EC_POINT* p) const { EC_POINT_clear_free(p); }
};
struct GroupDeleter {
  void operator()(EC_GROUP* g) const { EC_GROUP_free(g); }
};
struct SigDeleter {
  void operator()(ECDSA_SIG* s) const { ECDSA_SIG_free(s); }
};
struct PkeyDeleter {
  void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
struct ParamBldDeleter {
  void operator()(OSSL_PARAM_BLD* b) const { OSSL_PARAM_BLD_free(b); }
};
struct ParamDeleter {
  void operator()(OSSL_PARAM* p) const { OSSL_PARAM_free(p); }
};

using Bn = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtx = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using EcPoint = std::unique_ptr<EC_POINT, PointDeleter>;

void check(int ok, const char* what) {
  if (ok != 1) throw Error(Errc::kInvalidArgument, std::string("OpenSSL: ") + what);
}

Bn secure_bn() {
  Bn bn(BN_secure_new());
  if (!bn) throw std::bad_alloc();
  return bn;
}

Bn bn_from(std::span<const std::uint8_t> be) {
  Bn bn = secure_bn();
  if (BN_bin2bn(be.data(), static_cast<int>(be.size()), bn.get()) == nullptr) {
    throw std::bad_alloc();
  }
  return bn;
}

void bn_to(const BIGNUM* bn, std::span<std::uint8_t, 32> out) {
  check(BN_bn2binpad(bn, out.data(), 32) == 32 ? 1 : 0, "BN_bn2binpad");
}

// Immutable P-256 parameters, built once.
struct Curve {
  std::unique_ptr<EC_GROUP, GroupDeleter> group;
  Bn order;
  Bn order_minus_one;
  Bn half_order;

  Curve() : group(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1)) {
    if (!group) throw std::bad_alloc();
    order.reset(BN_dup(EC_GROUP_get0_order(group.get())));
    order_minus_one.reset(BN_dup(order.get()));
    check(BN_sub_word(order_minus_one.get(), 1), "BN_sub_word");
    half_order.reset(BN_dup(order.get()));
    check(BN_rshift1(half_order.get(), order.get()), "BN_rshift1");
  }
};

const Curve& curve() {
  static const Curve c;
  return c;
}

PublicKey encode_point(const EC_POINT* p, BN_CTX* ctx) {
  PublicKey out{};
  const std::size_t n = EC_POINT_point2oct(curve().group.get(), p,
                                           POINT_CONVERSION_UNCOMPRESSED,
                                           out.data(), out.size(), ctx);
  if (n != kPublicKeySize) throw Error(Errc::kInvalidArgument, "point encoding failed");
  return out;
}

using Block = std::array<std::uint8_t, 32>;

Block hmac_sha256(const Block& key, std::initializer_list<std::span<const std::uint8_t>> parts) {
  SecureBytes msg;
  for (auto part : parts) msg.insert(msg.end(), part.begin(), part.end());
  Block out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(),
           msg.size(), out.data(), &len) == nullptr ||
      len != out.size()) {
    throw Error(Errc::kInvalidArgument, "HMAC-SHA256 failed");
  }
  return out;
}

// RFC 6979 HMAC-DRBG nonce stream for qlen = hlen = 256. `next()` yields
// successive candidates; the caller rejects those outside [1, n-1].
class NonceGenerator {
 public:
  NonceGenerator(std::span<const std::uint8_t, 32> x, std::span<const std::uint8_t, 32> h1) {
    v_.fill(0x01);
    k_.fill(0x00);
    const std::uint8_t zero = 0x00;
    const std::uint8_t one = 0x01;
    k_ = hmac_sha256(k_, {v_, std::span(&zero, 1), x, h1});
    v_ = hmac_sha256(k_, {v_});
    k_ = hmac_sha256(k_, {v_, std::span(&one, 1), x, h1});
    v_ = hmac_sha256(k_, {v_});
  }
  ~NonceGenerator() {
    secure_wipe(k_.data(), k_.size());
    secure_wipe(v_.data(), v_.size());
  }

  Bn next() {
    if (started_) {
      const std::uint8_t zero = 0x00;
      k_ = hmac_sha256(k_, {v_, std::span(&zero, 1)});
      v_ = hmac_sha256(k_, {v_});
    }
    started_ = true;
    v_ = hmac_sha256(k_, {v_});
    return bn_from(v_);
  }

 private:
  Block k_{};
  Block v_{};
  bool started_ = false;
};

std::unique_ptr<EVP_PKEY, PkeyDeleter> public_pkey(std::span<const std::uint8_t> pub) {
  std::unique_ptr<OSSL_PARAM_BLD, ParamBldDeleter> bld(OSSL_PARAM_BLD_new());
  if (!bld) throw std::bad_alloc();
  check(OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME,
                                        "prime256v1", 0),
        "push group");
  check(OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY,
                                         pub.data(), pub.size()),
        "push pub");
  std::unique_ptr<OSSL_PARAM, ParamDeleter> params(OSSL_PARAM_BLD_to_param(bld.get()));
  std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter> ctx(
      EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  if (!params || !ctx) throw std::bad_alloc();
  EVP_PKEY* raw = nullptr;
  if (EVP_PKEY_fromdata_init(ctx.get()) != 1 ||
      EVP_PKEY_fromdata(ctx.get(), &raw, EVP_PKEY_PUBLIC_KEY, params.get()) != 1) {
    throw Error(Errc::kMalformedPoint, "public key rejected");
  }
  return std::unique_ptr<EVP_PKEY, PkeyDeleter>(raw);
}

}  // namespace

std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

Signature Signature::from_bytes(std::span<const std::uint8_t> raw) {
  if (raw.size() != kSignatureSize) {
    throw Error(Errc::kInvalidArgument, "signature must be 64 bytes");
  }
  Signature sig;
  std::copy(raw.begin(), raw.end(), sig.bytes.begin());
  return sig;
}

KeyPair KeyPair::from_seed(const Digest& seed) {
  const Curve& c = curve();
  BnCtx ctx(BN_CTX_secure_new());
  if (!ctx) throw std::bad_alloc();

  Bn d = bn_from(seed.bytes());
  check(BN_nnmod(d.get(), d.get(), c.order_minus_one.get(), ctx.get()), "BN_nnmod");
  check(BN_add_word(d.get(), 1), "BN_add_word");

  KeyPair key;
  key.scalar_.resize(kScalarSize);
  bn_to(d.get(), std::span<std::uint8_t, 32>(key.scalar_.data(), 32));

  EcPoint q(EC_POINT_new(c.group.get()));
  if (!q) throw std::bad_alloc();
  check(EC_POINT_mul(c.group.get(), q.get(), d.get(), nullptr, nullptr, ctx.get()),
        "EC_POINT_mul");
  key.public_key_ = encode_point(q.get(), ctx.get());
  return key;
}

void KeyPair::zeroize() noexcept {
  bido::zeroize(scalar_);
  secure_wipe(public_key_.data(), public_key_.size());
  zeroized_ = true;
}

Signature sign(const KeyPair& key, std::span<const std::uint8_t> message) {
  if (key.zeroized()) throw Error(Errc::kKeyZeroized, "signing with a wiped key");
  const Curve& c = curve();
  const EC_GROUP* group = c.group.get();
  BnCtx ctx(BN_CTX_secure_new());
  if (!ctx) throw std::bad_alloc();

  const auto scalar = key.private_scalar().first<kScalarSize>();
  Bn d = bn_from(scalar);

  Digest h1 = sha256(message);
  Bn e = bn_from(h1.bytes());
  // bits2octets(h1): the digest reduced mod n, as 32 bytes.
  check(BN_nnmod(e.get(), e.get(), c.order.get(), ctx.get()), "BN_nnmod");
  std::array<std::uint8_t, 32> h1_octets{};
  bn_to(e.get(), h1_octets);

  NonceGenerator nonces(scalar, h1_octets);
  Bn r = secure_bn();
  Bn s = secure_bn();
  Bn k_inv = secure_bn();
  Bn tmp = secure_bn();
  EcPoint big_r(EC_POINT_new(group));
  if (!big_r) throw std::bad_alloc();

  for (;;) {
    Bn k = nonces.next();
    if (BN_is_zero(k.get()) || BN_cmp(k.get(), c.order.get()) >= 0) continue;

    check(EC_POINT_mul(group, big_r.get(), k.get(), nullptr, nullptr, ctx.get()),
          "EC_POINT_mul");
    check(EC_POINT_get_affine_coordinates(group, big_r.get(), r.get(), nullptr,
                                          ctx.get()),
          "get_affine_coordinates");
    check(BN_nnmod(r.get(), r.get(), c.order.get(), ctx.get()), "BN_nnmod");
    if (BN_is_zero(r.get())) continue;

    // s = k^-1 (e + r d) mod n
    check(BN_mod_mul(tmp.get(), r.get(), d.get(), c.order.get(), ctx.get()), "BN_mod_mul");
    check(BN_mod_add(tmp.get(), tmp.get(), e.get(), c.order.get(), ctx.get()), "BN_mod_add");
    if (BN_mod_inverse(k_inv.get(), k.get(), c.order.get(), ctx.get()) == nullptr) {
      throw Error(Errc::kInvalidArgument, "nonce not invertible");
    }
    check(BN_mod_mul(s.get(), k_inv.get(), tmp.get(), c.order.get(), ctx.get()),
          "BN_mod_mul");
    if (BN_is_zero(s.get())) continue;
    break;
  }

  if (BN_cmp(s.get(), c.half_order.get()) > 0) {
    check(BN_sub(s.get(), c.order.get(), s.get()), "BN_sub");
  }

  Signature sig;
  bn_to(r.get(), std::span(sig.bytes).first<32>());
  bn_to(s.get(), std::span(sig.bytes).last<32>());
  secure_wipe(h1_octets.data(), h1_octets.size());
  return sig;
}

bool verify(std::span<const std::uint8_t> public_key,
            std::span<const std::uint8_t> message, const Signature& sig) {
  const Curve& c = curve();
  if (public_key.size() != kPublicKeySize || public_key[0] != 0x04) {
    throw Error(Errc::kMalformedPoint, "expected a 65-byte uncompressed point");
  }
  {
    BnCtx ctx(BN_CTX_new());
    EcPoint p(EC_POINT_new(c.group.get()));
    if (!ctx || !p) throw std::bad_alloc();
    if (EC_POINT_oct2point(c.group.get(), p.get(), public_key.data(),
                           public_key.size(), ctx.get()) != 1 ||
        EC_POINT_is_on_curve(c.group.get(), p.get(), ctx.get()) != 1 ||
        EC_POINT_is_at_infinity(c.group.get(), p.get())) {
      throw Error(Errc::kMalformedPoint, "point is not on P-256");
    }
  }

  auto pkey = public_pkey(public_key);

  std::unique_ptr<ECDSA_SIG, SigDeleter> ecsig(ECDSA_SIG_new());
  if (!ecsig) throw std::bad_alloc();
  BIGNUM* r = BN_bin2bn(sig.r().data(), 32, nullptr);
  BIGNUM* s = BN_bin2bn(sig.s().data(), 32, nullptr);
  if (r == nullptr || s == nullptr || ECDSA_SIG_set0(ecsig.get(), r, s) != 1) {
    BN_free(r);
    BN_free(s);
    throw std::bad_alloc();
  }
  unsigned char* der = nullptr;
  const int der_len = i2d_ECDSA_SIG(ecsig.get(), &der);
  if (der_len <= 0) throw std::bad_alloc();
  std::unique_ptr<unsigned char, void (*)(unsigned char*)> der_owner(
      der, [](unsigned char* p) { OPENSSL_free(p); });

  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> md(EVP_MD_CTX_new());
  if (!md) throw std::bad_alloc();
  if (EVP_DigestVerifyInit(md.get(), nullptr, EVP_sha256(), nullptr, pkey.get()) != 1) {
    throw Error(Errc::kMalformedPoint, "cannot initialise verifier");
  }
  return EVP_DigestVerify(md.get(), der, static_cast<std::size_t>(der_len),
                          message.data(), message.size()) == 1;
}

std::vector<std::uint8_t> CredId::wire() const {
  std::vector<std::uint8_t> out(kCredIdPrefix.begin(), kCredIdPrefix.end());
  out.insert(out.end(), signed_vconst.bytes.begin(), signed_vconst.bytes.end());
  return out;
}

CredId make_cred_id(const KeyPair& key) {
  return CredId{sign(key, as_bytes(kVconst))};
}

bool has_bido_prefix(std::span<const std::uint8_t> cred) {
  const auto prefix = as_bytes(kCredIdPrefix);
  return cred.size() >= prefix.size() &&
         std::equal(prefix.begin(), prefix.end(), cred.begin());
}

Signature split_cred_id(std::span<const std::uint8_t> cred) {
  if (!has_bido_prefix(cred)) {
    throw Error(Errc::kNotBidoCredential, "credential lacks the BIDO1: prefix");
  }
  const auto rest = cred.subspan(kCredIdPrefix.size());
  if (rest.size() != kSignatureSize) {
    throw Error(Errc::kMalformedCredential,
                "expected 64 signature bytes after prefix, got " +
                    std::to_string(rest.size()));
  }
  return Signature::from_bytes(rest);
}

}  // namespace bido
