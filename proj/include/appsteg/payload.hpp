#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "appsteg/imaging.hpp"

namespace appsteg {

/// Spatial-domain stego apps covered by the workbench.
enum class AppId { StegMaster, DaVinci, MobiStego, PocketStego, StegM };

inline constexpr std::array<AppId, 5> kAllApps = {AppId::StegMaster, AppId::DaVinci,
                                                  AppId::MobiStego, AppId::PocketStego,
                                                  AppId::StegM};

std::string_view to_string(AppId app);
/// Accepts the canonical names ("StegMaster", ...) case-insensitively.
std::optional<AppId> parse_app(std::string_view name);

/// Fixed byte strings each app attaches to its payload. Only the lengths are
/// load-bearing for detection; the defaults are placeholders.
struct SignatureTable {
  Bytes stegmaster_open1;
  Bytes stegmaster_close1;
  Bytes stegmaster_open2;
  Bytes stegmaster_close2;
  Bytes davinci_sig;
  Bytes mobistego_start;
  Bytes mobistego_end;
  std::uint8_t pocketstego_terminator;

  static SignatureTable defaults();

  /// Throws std::invalid_argument if a string is empty or a length invariant
  /// (StegMaster leading 112 bits, DaVinci 64, MobiStego 24) is broken.
  void validate() const;

  bool operator==(const SignatureTable&) const = default;
};

class PayloadError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when no message length fits the requested rate.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered bit sequence, one bit per element, MSB-first within each byte.
class PayloadBits {
 public:
  PayloadBits() = default;
  explicit PayloadBits(std::vector<std::uint8_t> bits);

  static PayloadBits from_bytes(std::span<const std::uint8_t> bytes);

  void append_bit(bool bit) { bits_.push_back(bit ? 1 : 0); }
  void append_bytes(std::span<const std::uint8_t> bytes);
  void append_u32(std::uint32_t value);

  std::size_t len_bits() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  /// Packs bits [offset, offset + 8 * count) into bytes.
  Bytes bytes_at(std::size_t offset, std::size_t count) const;
  std::uint32_t u32_at(std::size_t offset) const;
  /// Whole bytes only; trailing bits that do not fill a byte are dropped.
  Bytes to_bytes() const { return bytes_at(0, bits_.size() / 8); }

  bool operator==(const PayloadBits&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct ParsedPayload {
  Bytes message;
  /// Present for apps that carry the password in plaintext.
  std::optional<Bytes> password;
};

PayloadBits build_payload(AppId app, std::span<const std::uint8_t> message,
                          std::span<const std::uint8_t> password, const SignatureTable& sigs);

/// Format-level inverse of build_payload. `bits` may run past the end of the
/// payload (e.g. a full-capacity extraction); trailing bits are ignored.
/// Returns nullopt when the bits do not follow the app's format.
std::optional<ParsedPayload> parse_payload(AppId app, const PayloadBits& bits,
                                           std::span<const std::uint8_t> password,
                                           const SignatureTable& sigs);

/// XOR with the keystream of prng_from_password(password). An involution.
Bytes xor_keystream(std::span<const std::uint8_t> data, std::span<const std::uint8_t> password);

std::size_t payload_len_bits(AppId app, std::size_t message_bytes, std::size_t password_bytes,
                             const SignatureTable& sigs);

struct RateSpec {
  double target = 0.0;
  double achieved = 0.0;
  std::size_t capacity_bits = 0;
  std::size_t payload_bits = 0;
  std::size_t message_bytes = 0;
};

/// Largest message whose payload stays within floor(target * capacity) bits.
RateSpec message_len_for_target(AppId app, std::size_t capacity_bits, double target_rate,
                                std::size_t password_bytes, const SignatureTable& sigs);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

}  // namespace appsteg
