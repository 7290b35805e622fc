#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "appsteg/payload.hpp"

namespace appsteg {

// Plain-text signature overrides, one `<app>.<field> = "<bytes>"` per line.
// Values are double-quoted; `\xHH`, `\\`, `\"`, `\n`, `\r`, `\t` escapes are
// recognized. `#` starts a comment outside quotes. Unlisted keys keep their
// compiled-in defaults.
//
//   stegmaster.open1 = "STGMST<"
//   pocketstego.terminator = "\x23"
//
// Keys: stegmaster.{open1,close1,open2,close2}, davinci.sig,
// mobistego.{start,end}, pocketstego.terminator (exactly one byte).

SignatureTable parse_signature_config(std::istream& in);
SignatureTable load_signature_config(const std::filesystem::path& path);
std::string format_signature_config(const SignatureTable& sigs);

/// Decodes one quoted value (quotes included). Throws std::invalid_argument.
Bytes parse_quoted_bytes(std::string_view quoted);
std::string quote_bytes(std::span<const std::uint8_t> bytes);

}  // namespace appsteg
