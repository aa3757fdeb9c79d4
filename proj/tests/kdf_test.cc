// Copyright 2026 The VitaLink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
////////////////////////////////////////////////////////////////////////////////

#include "vitalink/kdf.hpp"

#include <openssl/evp.h>
#include <openssl/kdf.h>

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "kat_vectors.hpp"
#include "vitalink/random.hpp"

namespace vitalink::kdf {
namespace {

std::string hex(const Digest& d) { return to_hex(d); }

TEST(Hash, Fips180KnownAnswers) {
  for (const auto& v : testing::sha256_vectors()) EXPECT_EQ(hex(hash(v.msg)), v.digest) << v.name;
}

TEST(Hash, IncrementalMatchesOneShot) {
  SystemRandom rng;
  Bytes msg = rng.bytes(1000);
  for (std::size_t split : {0u, 1u, 55u, 56u, 63u, 64u, 65u, 500u, 1000u}) {
    Sha256 h;
    h.update(ByteView(msg).first(split));
    h.update(ByteView(msg).subspan(split));
    EXPECT_EQ(h.finish(), hash(msg)) << split;
  }
  EXPECT_EQ(hash(msg), hash(msg));
}

TEST(Hash, MatchesOpenSslOnRandomLengths) {
  SystemRandom rng;
  for (std::size_t n = 0; n < 300; ++n) {
    Bytes msg = rng.bytes(n);
    Digest ref{};
    unsigned int len = 0;
    EVP_Digest(msg.data(), msg.size(), ref.data(), &len, EVP_sha256(), nullptr);
    EXPECT_EQ(hash(msg), ref);
  }
}

TEST(Hash, SingleBitChangeChangesDigest) {
  SystemRandom rng;
  std::mt19937 pick(5);
  for (int i = 0; i < 100; ++i) {
    Bytes msg = rng.bytes(1 + pick() % 200);
    Bytes flipped = msg;
    std::size_t bit = pick() % (msg.size() * 8);
    flipped[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    EXPECT_NE(hash(msg), hash(flipped));
  }
}

TEST(Hmac, Rfc4231Vectors) {
  for (const auto& c : testing::hmac_vectors()) {
    std::string mac = hex(hmac(c.key, c.data));
    EXPECT_EQ(mac.substr(0, c.mac.size()), c.mac) << c.name;
  }
}

TEST(Hmac, LongKeyEqualsHashedKey) {
  Bytes key(131, 0xaa);
  Digest kh = hash(key);
  Bytes msg = to_bytes("msg");
  EXPECT_EQ(hmac(key, msg), hmac(kh, msg));
}

TEST(Hmac, DistinctKeysGiveDistinctMacs) {
  SystemRandom rng;
  Bytes msg = rng.bytes(40);
  std::set<Digest> seen;
  for (int i = 0; i < 200; ++i) EXPECT_TRUE(seen.insert(hmac(rng.bytes(32), msg)).second);
}

TEST(Hkdf, Rfc5869Vectors) {
  for (const auto& c : testing::kHkdfVectors) {
    Digest prk = hkdf_extract(from_hex(c.salt), from_hex(c.ikm));
    EXPECT_EQ(hex(prk), c.prk);
    EXPECT_EQ(to_hex(hkdf_expand(prk, from_hex(c.info), c.len)), c.okm);
  }
}

TEST(Hkdf, EmptySaltIsZeroSalt) {
  Bytes ikm = to_bytes("shared secret");
  EXPECT_EQ(hkdf_extract({}, ikm), hkdf_extract(Bytes(32, 0), ikm));
  EXPECT_EQ(hkdf_extract({}, ikm), hkdf_extract({}, ikm));
}

TEST(Hkdf, ExpandLengthsAndPrefixConsistency) {
  Digest prk = hkdf_extract(to_bytes("salt"), to_bytes("ikm"));
  Bytes info = to_bytes("vl c2s key");
  Bytes longest = hkdf_expand(prk, info, 255 * 32);
  for (std::size_t n : {1u, 32u, 33u, 100u, 1000u}) {
    Bytes out = hkdf_expand(prk, info, n);
    ASSERT_EQ(out.size(), n);
    EXPECT_TRUE(std::equal(out.begin(), out.end(), longest.begin()));
  }
}

TEST(Hkdf, ExpandRejectsBadLengths) {
  Digest prk{};
  for (std::size_t n : {std::size_t{0}, std::size_t{255 * 32 + 1}}) {
    try {
      hkdf_expand(prk, {}, n);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidLength);
    }
  }
}

TEST(Hkdf, DistinctLabelsGiveUnrelatedOutputs) {
  Digest prk = hkdf_extract(to_bytes("salt"), to_bytes("ikm"));
  const std::string_view labels[] = {kLabelC2sKey, kLabelS2cKey, kLabelC2sSalt,
                                     kLabelS2cSalt, kLabelClientFin, kLabelServerFin};
  std::vector<Bytes> outs;
  for (auto l : labels) outs.push_back(hkdf_expand(prk, to_bytes(l), 32));
  for (std::size_t i = 0; i < outs.size(); ++i)
    for (std::size_t j = i + 1; j < outs.size(); ++j) {
      int same = 0;
      for (std::size_t k = 0; k < 32; ++k) same += outs[i][k] == outs[j][k];
      // Expected ~0.125 equal bytes; 6+ would be wildly improbable.
      EXPECT_LT(same, 6);
      EXPECT_NE(outs[i][0] == outs[j][0] && outs[i][1] == outs[j][1] && outs[i][2] == outs[j][2],
                true);
    }
}

TEST(Hkdf, MatchesOpenSslOnRandomInputs) {
  SystemRandom rng;
  std::mt19937 lens(9);
  for (int i = 0; i < 50; ++i) {
    Bytes salt = rng.bytes(lens() % 40), ikm = rng.bytes(1 + lens() % 40),
          info = rng.bytes(lens() % 40);
    std::size_t out_len = 1 + lens() % 200;
    Bytes ref(out_len);
    EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr);
    EVP_PKEY_derive_init(ctx);
    EVP_PKEY_CTX_set_hkdf_md(ctx, EVP_sha256());
    EVP_PKEY_CTX_set1_hkdf_salt(ctx, salt.data(), static_cast<int>(salt.size()));
    EVP_PKEY_CTX_set1_hkdf_key(ctx, ikm.data(), static_cast<int>(ikm.size()));
    EVP_PKEY_CTX_add1_hkdf_info(ctx, info.data(), static_cast<int>(info.size()));
    std::size_t got = out_len;
    ASSERT_EQ(EVP_PKEY_derive(ctx, ref.data(), &got), 1);
    EVP_PKEY_CTX_free(ctx);
    EXPECT_EQ(hkdf_expand(hkdf_extract(salt, ikm), info, out_len), ref);
  }
}

}  // namespace
}  // namespace vitalink::kdf
