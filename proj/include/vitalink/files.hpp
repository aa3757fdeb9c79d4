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

#ifndef VITALINK_FILES_HPP
#define VITALINK_FILES_HPP

// On-disk key material.
//   .vlk  raw private scalar, big-endian, scalar_len bytes. Not encrypted;
//         protect it with file permissions.
//   .vlp  public point encoding
//   .vlc  credential wire encoding

#include <sys/stat.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "vitalink/bytes.hpp"
#include "vitalink/credential.hpp"
#include "vitalink/curve.hpp"
#include "vitalink/error.hpp"
#include "vitalink/kdf.hpp"

namespace vitalink::files {

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Config, "cannot read " + path.string());
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, ByteView data, bool secret = false) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Config, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
  if (secret) ::chmod(path.c_str(), 0600);
}

// First 8 bytes of SHA-256 over the point encoding.
inline std::array<std::uint8_t, 8> fingerprint(const curve::CurvePoint& p,
                                               const curve::CurveSuite& suite) {
  kdf::Digest d = kdf::hash(curve::point_encode(p, suite));
  std::array<std::uint8_t, 8> fp;
  std::copy_n(d.begin(), fp.size(), fp.begin());
  return fp;
}

inline const curve::CurveSuite& suite_for_point_len(std::size_t len) {
  for (std::uint16_t id : {curve::kSuiteP256, curve::kSuiteToy}) {
    const auto& s = curve::suite_by_id(id);
    if (s.point_len() == len) return s;
  }
  throw Error(Errc::Config, "point length " + std::to_string(len) + " matches no suite");
}

inline curve::Scalar load_private_key(const std::filesystem::path& path,
                                      const curve::CurveSuite& suite) {
  Bytes raw = read_file(path);
  try {
    auto k = curve::Scalar::from_bytes(suite, raw);
    secure_zero(raw);
    return k;
  } catch (const std::out_of_range&) {
    secure_zero(raw);
    throw Error(Errc::Config, path.string() + " is not a " + std::string(suite.name) + " private key");
  }
}

inline curve::CurvePoint load_public_key(const std::filesystem::path& path,
                                         const curve::CurveSuite** suite_out = nullptr) {
  Bytes raw = read_file(path);
  const auto& suite = suite_for_point_len(raw.size());
  if (suite_out) *suite_out = &suite;
  try {
    return curve::point_decode(raw, suite);
  } catch (const Error& e) {
    throw Error(Errc::Config, path.string() + ": " + e.what());
  }
}

inline credential::Credential load_credential(const std::filesystem::path& path) {
  Bytes raw = read_file(path);
  try {
    return credential::credential_decode(raw);
  } catch (const Error& e) {
    throw Error(Errc::Config, path.string() + ": " + e.what());
  }
}

}  // namespace vitalink::files

#endif  // VITALINK_FILES_HPP
