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

#ifndef VITALINK_ERROR_HPP
#define VITALINK_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace vitalink {

// Every failure the stack can report. Names are stable: they appear in logs,
// device exit reports and the acceptance harness.
enum class Errc {
  // curve_group
  InvalidPeerKey,
  MalformedPoint,
  GenerationFailure,
  // aead
  AuthFailure,
  PayloadTooLarge,
  InvalidLength,
  // credential
  MalformedSignature,
  MalformedCredential,
  InvalidCredentialFields,
  // handshake
  UnsupportedSuite,
  MalformedHandshake,
  BadServerCredential,
  BadClientCredential,
  BadTranscriptSignature,
  BadFinishedMac,
  OutOfPhase,
  KeyCollision,
  // record layer / framing
  SequenceExhausted,
  MalformedFrame,
  BadMagic,
  BadVersion,
  OversizeFrame,
  Timeout,
  ConnectionClosed,
  PeerAbort,
  // telemetry
  MalformedReading,
  MalformedScript,
  // endpoints / io
  ConnectionRefused,
  Io,
  Config,
};

constexpr std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::InvalidPeerKey: return "InvalidPeerKey";
    case Errc::MalformedPoint: return "MalformedPoint";
    case Errc::GenerationFailure: return "GenerationFailure";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::InvalidLength: return "InvalidLength";
    case Errc::MalformedSignature: return "MalformedSignature";
    case Errc::MalformedCredential: return "MalformedCredential";
    case Errc::InvalidCredentialFields: return "InvalidCredentialFields";
    case Errc::UnsupportedSuite: return "UnsupportedSuite";
    case Errc::MalformedHandshake: return "MalformedHandshake";
    case Errc::BadServerCredential: return "BadServerCredential";
    case Errc::BadClientCredential: return "BadClientCredential";
    case Errc::BadTranscriptSignature: return "BadTranscriptSignature";
    case Errc::BadFinishedMac: return "BadFinishedMac";
    case Errc::OutOfPhase: return "OutOfPhase";
    case Errc::KeyCollision: return "KeyCollision";
    case Errc::SequenceExhausted: return "SequenceExhausted";
    case Errc::MalformedFrame: return "MalformedFrame";
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadVersion: return "BadVersion";
    case Errc::OversizeFrame: return "OversizeFrame";
    case Errc::Timeout: return "Timeout";
    case Errc::ConnectionClosed: return "ConnectionClosed";
    case Errc::PeerAbort: return "PeerAbort";
    case Errc::MalformedReading: return "MalformedReading";
    case Errc::MalformedScript: return "MalformedScript";
    case Errc::ConnectionRefused: return "ConnectionRefused";
    case Errc::Io: return "Io";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  explicit Error(Errc code)
      : std::runtime_error(std::string(to_string(code))), code_(code) {}
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace vitalink

#endif  // VITALINK_ERROR_HPP
