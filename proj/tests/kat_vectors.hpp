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

#ifndef VITALINK_TESTS_KAT_VECTORS_HPP
#define VITALINK_TESTS_KAT_VECTORS_HPP

// Published known-answer vectors shared by the unit tests and the
// acceptance gate.

#include <cstdint>
#include <string>
#include <vector>

#include "vitalink/bytes.hpp"

namespace vitalink::testing {

struct AesBlockVector {
  const char* name;
  const char* key;
  const char* pt;
  const char* ct;
};

// FIPS-197 appendices B and C.1, then the AES-128 GFSbox and the first
// KeySbox entries of the AESAVS known-answer tests.
inline const AesBlockVector kAesBlockVectors[] = {
    {"fips197-b", "2b7e151628aed2a6abf7158809cf4f3c", "3243f6a8885a308d313198a2e0370734",
     "3925841d02dc09fbdc118597196a0b32"},
    {"fips197-c1", "000102030405060708090a0b0c0d0e0f", "00112233445566778899aabbccddeeff",
     "69c4e0d86a7b0430d8cdb78070b4c55a"},
    {"gfsbox-0", "00000000000000000000000000000000", "f34481ec3cc627bacd5dc3fb08f273e6",
     "0336763e966d92595a567cc9ce537f5e"},
    {"gfsbox-1", "00000000000000000000000000000000", "9798c4640bad75c7c3227db910174e72",
     "a9a1631bf4996954ebc093957b234589"},
    {"gfsbox-2", "00000000000000000000000000000000", "96ab5c2ff612d9dfaae8c31f30c42168",
     "ff4f8391a6a40ca5b25d23bedd44a597"},
    {"gfsbox-3", "00000000000000000000000000000000", "6a118a874519e64e9963798a503f1d35",
     "dc43be40be0e53712f7e2bf5ca707209"},
    {"gfsbox-4", "00000000000000000000000000000000", "cb9fceec81286ca3e989bd979b0cb284",
     "92beedab1895a94faa69b632e5cc47ce"},
    {"gfsbox-5", "00000000000000000000000000000000", "b26aeb1874e47ca8358ff22378f09144",
     "459264f4798f6a78bacb89c15ed3d601"},
    {"gfsbox-6", "00000000000000000000000000000000", "58c8e00b2631686d54eab84b91f0aca1",
     "08a4e2efec8a8e3312ca7460b9040bbf"},
    {"keysbox-0", "10a58869d74be5a374cf867cfb473859", "00000000000000000000000000000000",
     "6d251e6944b051e04eaa6fb4dbf78465"},
    {"keysbox-1", "caea65cdbb75e9169ecd22ebe6e54675", "00000000000000000000000000000000",
     "6e29201190152df4ee058139def610bb"},
    {"keysbox-2", "a2e2fa9baf7d20822ca9f0542f764a41", "00000000000000000000000000000000",
     "c3b44b95d9d2f25670eee9a0de099fa3"},
};

struct GcmVector {
  const char* name;
  const char* key;
  const char* nonce;
  const char* pt;
  const char* aad;
  const char* ct;
  const char* tag;
};

// Test cases 1-4 are the AES-128 cases of the original GCM submission; the
// remaining ones were generated with OpenSSL (via pyca/cryptography).
inline const GcmVector kGcmVectors[] = {
    {"tc1-empty", "00000000000000000000000000000000", "000000000000000000000000", "", "", "",
     "58e2fccefa7e3061367f1d57a4e7455a"},
    {"tc2-one-block", "00000000000000000000000000000000", "000000000000000000000000",
     "00000000000000000000000000000000", "", "0388dace60b6a392f328c2b971b2fe78",
     "ab6e47d42cec13bdf53a67b21257bddf"},
    {"tc3-four-blocks-no-aad", "feffe9928665731c6d6a8f9467308308", "cafebabefacedbaddecaf888",
     "d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a72"
     "1c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657ba637b391aafd255",
     "",
     "42831ec2217774244b7221b784d0d49ce3aa212f2c02a4e035c17e2329aca12e"
     "21d514b25466931c7d8f6a5aac84aa051ba30b396a0aac973d58e091473f5985",
     "4d5c2af327cd64a62cf35abd2ba6fab4"},
    {"tc4-partial-block-with-aad", "feffe9928665731c6d6a8f9467308308", "cafebabefacedbaddecaf888",
     "d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a72"
     "1c3c0c95956809532fcf0e2449a6b525b16aedf5aa0de657ba637b39",
     "feedfacedeadbeeffeedfacedeadbeefabaddad2",
     "42831ec2217774244b7221b784d0d49ce3aa212f2c02a4e035c17e2329aca12e"
     "21d514b25466931c7d8f6a5aac84aa051ba30b396a0aac973d58e091",
     "5bc94fbc3221a5db94fae95ae7121a47"},
    {"aad-only", "000102030405060708090a0b0c0d0e0f", "101112131415161718191a1b", "",
     "000102030405060708090a0b0c0d0e0f1011", "", "e77f3ad4a970efbb0883c68d4b725b7b"},
    {"50-byte-no-aad", "000102030405060708090a0b0c0d0e0f", "101112131415161718191a1b",
     "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f"
     "202122232425262728292a2b2c2d2e2f3031",
     "",
     "c42f01ac0b4ab0e81fd457fecb2ae5312aad669422e17da89dd2330a7b180fb2"
     "f2f8031ca583dd3bcb89ffe3f6fd7f34b989",
     "85c6cacdea62f4bc385d8aa98a6c4bdd"},
    {"33-byte-70-byte-aad", "2b7e151628aed2a6abf7158809cf4f3c", "000000000000000000000001",
     "6465666768696a6b6c6d6e6f707172737475767778797a7b7c7d7e7f8081828384",
     "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f"
     "202122232425262728292a2b2c2d2e2f303132333435363738393a3b3c3d3e3f"
     "404142434445",
     "c529b65c348828e6d985f7af8ae3bb2da521ef0ba6af6eb91c6ee72d551b482284",
     "38f9d81300bf677d77ef823d80ec105b"},
};

struct ShaVector {
  std::string name;
  Bytes msg;
  std::string digest;
};

// FIPS 180-2 examples for SHA-256.
inline std::vector<ShaVector> sha256_vectors() {
  return {
      {"empty", {}, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"},
      {"abc", to_bytes("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"},
      {"448-bit", to_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
       "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1"},
      {"896-bit",
       to_bytes("abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmnoijklmnopjklmnopq"
                "klmnopqrlmnopqrsmnopqrstnopqrstu"),
       "cf5b16a778af8380036ce59e7b0492370b249b11e8f07a51afac45037afee9d1"},
      {"million-a", Bytes(1000000, 'a'),
       "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0"},
  };
}

struct HmacVector {
  std::string name;
  Bytes key;
  Bytes data;
  // Case 5 publishes a 128-bit truncation; compare that many hex digits.
  std::string mac;
};

// RFC 4231 test cases 1-7, HMAC-SHA-256.
inline std::vector<HmacVector> hmac_vectors() {
  Bytes k4;
  for (int i = 1; i <= 25; ++i) k4.push_back(static_cast<std::uint8_t>(i));
  return {
      {"case1", Bytes(20, 0x0b), to_bytes("Hi There"),
       "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"},
      {"case2", to_bytes("Jefe"), to_bytes("what do ya want for nothing?"),
       "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843"},
      {"case3", Bytes(20, 0xaa), Bytes(50, 0xdd),
       "773ea91e36800e46854db8ebd09181a72959098b3ef8c122d9635514ced565fe"},
      {"case4", k4, Bytes(50, 0xcd),
       "82558a389a443c0ea4cc819899f2083a85f0faa3e578f8077a2e3ff46729665b"},
      {"case5", Bytes(20, 0x0c), to_bytes("Test With Truncation"), "a3b6167473100ee06e0c796c2955552b"},
      {"case6", Bytes(131, 0xaa), to_bytes("Test Using Larger Than Block-Size Key - Hash Key First"),
       "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54"},
      {"case7", Bytes(131, 0xaa),
       to_bytes("This is a test using a larger than block-size key and a larger than "
                "block-size data. The key needs to be hashed before being used by the HMAC "
                "algorithm."),
       "9b09ffa71b942fcb27635fbcd5b0e944bfdc63644f0713938a7f51535c3a35e2"},
  };
}

struct HkdfCase {
  const char* ikm;
  const char* salt;
  const char* info;
  std::size_t len;
  const char* prk;
  const char* okm;
};

// RFC 5869 appendix A, SHA-256 cases 1-3.
inline const HkdfCase kHkdfVectors[] = {
    {"0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b", "000102030405060708090a0b0c",
     "f0f1f2f3f4f5f6f7f8f9", 42,
     "077709362c2e32df0ddc3f0dc47bba6390b6c73bb50f9c3122ec844ad7c2b3e5",
     "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865"},
    {"000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f"
     "202122232425262728292a2b2c2d2e2f303132333435363738393a3b3c3d3e3f"
     "404142434445464748494a4b4c4d4e4f",
     "606162636465666768696a6b6c6d6e6f707172737475767778797a7b7c7d7e7f"
     "808182838485868788898a8b8c8d8e8f909192939495969798999a9b9c9d9e9f"
     "a0a1a2a3a4a5a6a7a8a9aaabacadaeaf",
     "b0b1b2b3b4b5b6b7b8b9babbbcbdbebfc0c1c2c3c4c5c6c7c8c9cacbcccdcecf"
     "d0d1d2d3d4d5d6d7d8d9dadbdcdddedfe0e1e2e3e4e5e6e7e8e9eaebecedeeef"
     "f0f1f2f3f4f5f6f7f8f9fafbfcfdfeff",
     82, "06a6b88c5853361a06104c9ceb35b45cef760014904671014a193f40c15fc244",
     "b11e398dc80327a1c8e7f78c596a49344f012eda2d4efad8a050cc4c19afa97c"
     "59045a99cac7827271cb41c65e590e09da3275600c2f09b8367793a9aca3db71"
     "cc30c58179ec3e87c14c01d5c1f3434f1d87"},
    {"0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b", "", "", 42,
     "19ef24a32c717b167f33a91d6f648bdf96596776afdb6377ac434c1c293ccb04",
     "8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d9d201395faa4b61a96c8"},
};

}  // namespace vitalink::testing

#endif  // VITALINK_TESTS_KAT_VECTORS_HPP
