#include "appsteg/payload.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "appsteg/prng.hpp"

namespace appsteg {

std::string_view to_string(AppId app) {
  switch (app) {
    case AppId::StegMaster: return "StegMaster";
    case AppId::DaVinci: return "DaVinci";
    case AppId::MobiStego: return "MobiStego";
    case AppId::PocketStego: return "PocketStego";
    case AppId::StegM: return "StegM";
  }
  return "?";
}

std::optional<AppId> parse_app(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string key = lower(name);
  for (AppId app : kAllApps)
    if (lower(to_string(app)) == key) return app;
  return std::nullopt;
}

SignatureTable SignatureTable::defaults() {
  return SignatureTable{
      .stegmaster_open1 = to_bytes("STGMST<"),
      .stegmaster_close1 = to_bytes(">STGMST"),
      .stegmaster_open2 = to_bytes("MSGBEG<"),
      .stegmaster_close2 = to_bytes(">MSGEND"),
      .davinci_sig = to_bytes("DAVINCI1"),
      .mobistego_start = to_bytes("@!#"),
      .mobistego_end = to_bytes("#!@"),
      .pocketstego_terminator = '#',
  };
}

void SignatureTable::validate() const {
  const std::pair<const Bytes*, const char*> all[] = {
      {&stegmaster_open1, "stegmaster.open1"}, {&stegmaster_close1, "stegmaster.close1"},
      {&stegmaster_open2, "stegmaster.open2"}, {&stegmaster_close2, "stegmaster.close2"},
      {&davinci_sig, "davinci.sig"},           {&mobistego_start, "mobistego.start"},
      {&mobistego_end, "mobistego.end"},
  };
  for (const auto& [bytes, name] : all)
    if (bytes->empty()) throw std::invalid_argument(std::string(name) + " must not be empty");
  if (8 * (stegmaster_open1.size() + stegmaster_close1.size()) != 112)
    throw std::invalid_argument("stegmaster open1+close1 must total 112 bits");
  if (8 * davinci_sig.size() != 64) throw std::invalid_argument("davinci.sig must be 64 bits");
  if (8 * mobistego_start.size() != 24)
    throw std::invalid_argument("mobistego.start must be 24 bits");
}

PayloadBits::PayloadBits(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

PayloadBits PayloadBits::from_bytes(std::span<const std::uint8_t> bytes) {
  PayloadBits out;
  out.append_bytes(bytes);
  return out;
}

void PayloadBits::append_bytes(std::span<const std::uint8_t> bytes) {
  bits_.reserve(bits_.size() + 8 * bytes.size());
  for (std::uint8_t byte : bytes)
    for (int k = 7; k >= 0; --k) bits_.push_back((byte >> k) & 1);
}

void PayloadBits::append_u32(std::uint32_t value) {
  for (int k = 31; k >= 0; --k) bits_.push_back((value >> k) & 1);
}

Bytes PayloadBits::bytes_at(std::size_t offset, std::size_t count) const {
  if (offset + 8 * count > bits_.size()) throw std::out_of_range("bytes_at past end of bits");
  Bytes out(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint8_t v = 0;
    for (std::size_t k = 0; k < 8; ++k) v = static_cast<std::uint8_t>((v << 1) | bits_[offset + 8 * i + k]);
    out[i] = v;
  }
  return out;
}

std::uint32_t PayloadBits::u32_at(std::size_t offset) const {
  if (offset + 32 > bits_.size()) throw std::out_of_range("u32_at past end of bits");
  std::uint32_t v = 0;
  for (std::size_t k = 0; k < 32; ++k) v = (v << 1) | bits_[offset + k];
  return v;
}

Bytes xor_keystream(std::span<const std::uint8_t> data, std::span<const std::uint8_t> password) {
  Prng prng = prng_from_password(password);
  Bytes out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i] ^ prng.next_byte();
  return out;
}

namespace {

bool contains(std::span<const std::uint8_t> hay, std::span<const std::uint8_t> needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::uint32_t bit_count32(std::size_t bytes) {
  if (bytes > std::numeric_limits<std::uint32_t>::max() / 8)
    throw PayloadError("segment too long for a 32-bit length field");
  return static_cast<std::uint32_t>(8 * bytes);
}

// Byte offset of the first occurrence of needle in hay at or after `from`.
std::optional<std::size_t> find_from(const Bytes& hay, const Bytes& needle, std::size_t from) {
  if (from > hay.size()) return std::nullopt;
  auto it = std::search(hay.begin() + static_cast<std::ptrdiff_t>(from), hay.end(), needle.begin(),
                        needle.end());
  if (it == hay.end()) return std::nullopt;
  return static_cast<std::size_t>(it - hay.begin());
}

bool starts_with(const Bytes& hay, std::size_t at, const Bytes& prefix) {
  return at + prefix.size() <= hay.size() &&
         std::equal(prefix.begin(), prefix.end(), hay.begin() + static_cast<std::ptrdiff_t>(at));
}

Bytes slice(const Bytes& b, std::size_t from, std::size_t to) {
  return Bytes(b.begin() + static_cast<std::ptrdiff_t>(from),
               b.begin() + static_cast<std::ptrdiff_t>(to));
}

std::optional<ParsedPayload> parse_stegmaster(const PayloadBits& bits,
                                              std::span<const std::uint8_t> password,
                                              const SignatureTable& sigs) {
  const Bytes bytes = bits.to_bytes();
  Bytes lead = sigs.stegmaster_open1;
  lead.insert(lead.end(), sigs.stegmaster_close1.begin(), sigs.stegmaster_close1.end());
  if (!starts_with(bytes, 0, lead)) return std::nullopt;

  std::optional<std::size_t> open2;
  // A known password pins the second pair; otherwise search for it.
  const Bytes pwd(password.begin(), password.end());
  if (!pwd.empty() && starts_with(bytes, lead.size(), pwd) &&
      starts_with(bytes, lead.size() + pwd.size(), sigs.stegmaster_open2))
    open2 = lead.size() + pwd.size();
  else
    open2 = find_from(bytes, sigs.stegmaster_open2, lead.size());
  if (!open2) return std::nullopt;

  const std::size_t msg_begin = *open2 + sigs.stegmaster_open2.size();
  const auto close2 = find_from(bytes, sigs.stegmaster_close2, msg_begin);
  if (!close2) return std::nullopt;
  return ParsedPayload{slice(bytes, msg_begin, *close2), slice(bytes, lead.size(), *open2)};
}

std::optional<ParsedPayload> parse_davinci(const PayloadBits& bits, const SignatureTable& sigs) {
  std::size_t at = 0;
  auto segment = [&](std::optional<std::size_t> expected_bits) -> std::optional<Bytes> {
    if (at + 32 > bits.len_bits()) return std::nullopt;
    const std::uint32_t len = bits.u32_at(at);
    if (expected_bits && len != *expected_bits) return std::nullopt;
    if (len % 8 != 0 || len > bits.len_bits() - at - 32) return std::nullopt;
    Bytes out = bits.bytes_at(at + 32, len / 8);
    at += 32 + len;
    return out;
  };
  const auto sig = segment(8 * sigs.davinci_sig.size());
  if (!sig || *sig != sigs.davinci_sig) return std::nullopt;
  auto pwd = segment(std::nullopt);
  if (!pwd) return std::nullopt;
  auto msg = segment(std::nullopt);
  if (!msg) return std::nullopt;
  return ParsedPayload{std::move(*msg), std::move(*pwd)};
}

std::optional<ParsedPayload> parse_mobistego(const PayloadBits& bits,
                                             std::span<const std::uint8_t> password,
                                             const SignatureTable& sigs) {
  const Bytes bytes = bits.to_bytes();
  if (!starts_with(bytes, 0, sigs.mobistego_start)) return std::nullopt;
  const auto end = find_from(bytes, sigs.mobistego_end, sigs.mobistego_start.size());
  if (!end) return std::nullopt;
  Bytes cipher = slice(bytes, sigs.mobistego_start.size(), *end);
  if (password.empty()) return ParsedPayload{std::move(cipher), std::nullopt};
  return ParsedPayload{xor_keystream(cipher, password), std::nullopt};
}

std::optional<ParsedPayload> parse_pocketstego(const PayloadBits& bits,
                                               const SignatureTable& sigs) {
  const Bytes bytes = bits.to_bytes();
  const auto it = std::find(bytes.begin(), bytes.end(), sigs.pocketstego_terminator);
  if (it == bytes.end()) return std::nullopt;
  return ParsedPayload{Bytes(bytes.begin(), it), std::nullopt};
}

std::optional<ParsedPayload> parse_stegm(const PayloadBits& bits,
                                         std::span<const std::uint8_t> password) {
  if (bits.len_bits() < 32) return std::nullopt;
  const std::uint32_t len = bits.u32_at(0);
  if (len % 8 != 0 || len > bits.len_bits() - 32) return std::nullopt;
  Bytes cipher = bits.bytes_at(32, len / 8);
  if (password.empty()) return ParsedPayload{std::move(cipher), std::nullopt};
  return ParsedPayload{xor_keystream(cipher, password), std::nullopt};
}

}  // namespace

PayloadBits build_payload(AppId app, std::span<const std::uint8_t> message,
                          std::span<const std::uint8_t> password, const SignatureTable& sigs) {
  PayloadBits out;
  switch (app) {
    case AppId::StegMaster:
      if (contains(message, sigs.stegmaster_close2))
        throw PayloadError("message contains the StegMaster close2 signature");
      if (contains(password, sigs.stegmaster_open2))
        throw PayloadError("password contains the StegMaster open2 signature");
      out.append_bytes(sigs.stegmaster_open1);
      out.append_bytes(sigs.stegmaster_close1);
      out.append_bytes(password);
      out.append_bytes(sigs.stegmaster_open2);
      out.append_bytes(message);
      out.append_bytes(sigs.stegmaster_close2);
      break;
    case AppId::DaVinci:
      out.append_u32(bit_count32(sigs.davinci_sig.size()));
      out.append_bytes(sigs.davinci_sig);
      out.append_u32(bit_count32(password.size()));
      out.append_bytes(password);
      out.append_u32(bit_count32(message.size()));
      out.append_bytes(message);
      break;
    case AppId::MobiStego:
      if (password.empty()) throw PayloadError("MobiStego requires a password");
      out.append_bytes(sigs.mobistego_start);
      out.append_bytes(xor_keystream(message, password));
      out.append_bytes(sigs.mobistego_end);
      break;
    case AppId::PocketStego:
      if (std::find(message.begin(), message.end(), sigs.pocketstego_terminator) != message.end())
        throw PayloadError("message contains the PocketStego terminator byte");
      out.append_bytes(message);
      out.append_bytes(std::span(&sigs.pocketstego_terminator, 1));
      break;
    case AppId::StegM:
      out.append_u32(bit_count32(message.size()));
      if (password.empty())
        out.append_bytes(message);
      else
        out.append_bytes(xor_keystream(message, password));
      break;
  }
  return out;
}

std::optional<ParsedPayload> parse_payload(AppId app, const PayloadBits& bits,
                                           std::span<const std::uint8_t> password,
                                           const SignatureTable& sigs) {
  switch (app) {
    case AppId::StegMaster: return parse_stegmaster(bits, password, sigs);
    case AppId::DaVinci: return parse_davinci(bits, sigs);
    case AppId::MobiStego: return parse_mobistego(bits, password, sigs);
    case AppId::PocketStego: return parse_pocketstego(bits, sigs);
    case AppId::StegM: return parse_stegm(bits, password);
  }
  return std::nullopt;
}

std::size_t payload_len_bits(AppId app, std::size_t message_bytes, std::size_t password_bytes,
                             const SignatureTable& sigs) {
  switch (app) {
    case AppId::StegMaster:
      return 8 * (sigs.stegmaster_open1.size() + sigs.stegmaster_close1.size() +
                  sigs.stegmaster_open2.size() + sigs.stegmaster_close2.size() + password_bytes +
                  message_bytes);
    case AppId::DaVinci:
      return 96 + 8 * (sigs.davinci_sig.size() + password_bytes + message_bytes);
    case AppId::MobiStego:
      return 8 * (sigs.mobistego_start.size() + sigs.mobistego_end.size() + message_bytes);
    case AppId::PocketStego: return 8 * message_bytes + 8;
    case AppId::StegM: return 32 + 8 * message_bytes;
  }
  return 0;
}

RateSpec message_len_for_target(AppId app, std::size_t capacity_bits, double target_rate,
                                std::size_t password_bytes, const SignatureTable& sigs) {
  if (!(target_rate > 0.0 && target_rate <= 1.0))
    throw PayloadError("target rate must lie in (0, 1]");
  if (capacity_bits == 0) throw CapacityError("zero capacity");
  // Tolerate representation error so that e.g. 0.05 * 2000 floors to 100.
  const double raw = target_rate * static_cast<double>(capacity_bits);
  const auto lp_max = static_cast<std::size_t>(std::floor(raw + 1e-9 * std::max(1.0, raw)));
  const std::size_t overhead = payload_len_bits(app, 0, password_bytes, sigs);
  if (lp_max < overhead + 8)
    throw CapacityError(std::string(to_string(app)) + ": " + std::to_string(lp_max) +
                        " payload bits allowed, at least " + std::to_string(overhead + 8) +
                        " needed for a one-byte message");
  RateSpec spec;
  spec.target = target_rate;
  spec.capacity_bits = capacity_bits;
  spec.message_bytes = (lp_max - overhead) / 8;
  spec.payload_bits = payload_len_bits(app, spec.message_bytes, password_bytes, sigs);
  spec.achieved = static_cast<double>(spec.payload_bits) / static_cast<double>(capacity_bits);
  return spec;
}

}  // namespace appsteg
