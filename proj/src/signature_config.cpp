#include "appsteg/signature_config.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace appsteg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Strips a trailing comment that starts outside the quoted value.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

Bytes parse_quoted_bytes(std::string_view q) {
  if (q.size() < 2 || q.front() != '"' || q.back() != '"')
    throw std::invalid_argument("value must be double-quoted");
  Bytes out;
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    const char c = q[i];
    if (c == '"') throw std::invalid_argument("unescaped quote inside value");
    if (c != '\\') {
      out.push_back(static_cast<std::uint8_t>(c));
      continue;
    }
    if (++i + 1 >= q.size()) throw std::invalid_argument("dangling escape");
    switch (q[i]) {
      case '\\': out.push_back('\\'); break;
      case '"': out.push_back('"'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 't': out.push_back('\t'); break;
      case 'x': {
        if (i + 2 > q.size() - 2) throw std::invalid_argument("truncated \\x escape");
        const int hi = hex_digit(q[i + 1]), lo = hex_digit(q[i + 2]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("bad \\x escape");
        out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
        i += 2;
        break;
      }
      default: throw std::invalid_argument(std::string("unknown escape \\") + q[i]);
    }
  }
  return out;
}

std::string quote_bytes(std::span<const std::uint8_t> bytes) {
  static const char* hex = "0123456789abcdef";
  std::string out = "\"";
  for (std::uint8_t b : bytes) {
    if (b == '"' || b == '\\') {
      out += '\\';
      out += static_cast<char>(b);
    } else if (b >= 0x20 && b < 0x7f && b != '#') {
      out += static_cast<char>(b);
    } else {
      out += "\\x";
      out += hex[b >> 4];
      out += hex[b & 15];
    }
  }
  return out + "\"";
}

SignatureTable parse_signature_config(std::istream& in) {
  SignatureTable sigs = SignatureTable::defaults();
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    auto fail = [&](const std::string& what) {
      return std::invalid_argument("signature config line " + std::to_string(lineno) + ": " + what);
    };
    if (eq == std::string_view::npos) throw fail("expected key = \"value\"");
    const std::string key(trim(line.substr(0, eq)));
    Bytes value;
    try {
      value = parse_quoted_bytes(trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }

    if (key == "stegmaster.open1") sigs.stegmaster_open1 = value;
    else if (key == "stegmaster.close1") sigs.stegmaster_close1 = value;
    else if (key == "stegmaster.open2") sigs.stegmaster_open2 = value;
    else if (key == "stegmaster.close2") sigs.stegmaster_close2 = value;
    else if (key == "davinci.sig") sigs.davinci_sig = value;
    else if (key == "mobistego.start") sigs.mobistego_start = value;
    else if (key == "mobistego.end") sigs.mobistego_end = value;
    else if (key == "pocketstego.terminator") {
      if (value.size() != 1) throw fail("pocketstego.terminator must be exactly one byte");
      sigs.pocketstego_terminator = value[0];
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  sigs.validate();
  return sigs;
}

SignatureTable load_signature_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open signature config " + path.string());
  return parse_signature_config(in);
}

std::string format_signature_config(const SignatureTable& sigs) {
  std::ostringstream out;
  out << "stegmaster.open1 = " << quote_bytes(sigs.stegmaster_open1) << '\n'
      << "stegmaster.close1 = " << quote_bytes(sigs.stegmaster_close1) << '\n'
      << "stegmaster.open2 = " << quote_bytes(sigs.stegmaster_open2) << '\n'
      << "stegmaster.close2 = " << quote_bytes(sigs.stegmaster_close2) << '\n'
      << "davinci.sig = " << quote_bytes(sigs.davinci_sig) << '\n'
      << "mobistego.start = " << quote_bytes(sigs.mobistego_start) << '\n'
      << "mobistego.end = " << quote_bytes(sigs.mobistego_end) << '\n'
      << "pocketstego.terminator = "
      << quote_bytes(std::span(&sigs.pocketstego_terminator, 1)) << '\n';
  return out.str();
}

}  // namespace appsteg
