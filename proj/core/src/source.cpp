#include "iccscan/source.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace iccscan {

SourceFile load_source(const std::filesystem::path& path, std::string app_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw std::runtime_error("cannot read " + path.string());
  }
  return SourceFile{path, std::move(app_id), std::move(buffer).str()};
}

namespace {

// Length of the valid UTF-8 sequence starting at text[i], or 0 if invalid.
std::size_t valid_sequence_length(std::string_view text, std::size_t i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(text[k]);
  };
  const unsigned char lead = byte(i);
  if (lead < 0x80) {
    return 1;
  }
  std::size_t len = 0;
  unsigned char lo = 0x80;
  unsigned char hi = 0xBF;
  if (lead >= 0xC2 && lead <= 0xDF) {
    len = 2;
  } else if (lead == 0xE0) {
    len = 3;
    lo = 0xA0;
  } else if (lead >= 0xE1 && lead <= 0xEC) {
    len = 3;
  } else if (lead == 0xED) {
    len = 3;
    hi = 0x9F;
  } else if (lead >= 0xEE && lead <= 0xEF) {
    len = 3;
  } else if (lead == 0xF0) {
    len = 4;
    lo = 0x90;
  } else if (lead >= 0xF1 && lead <= 0xF3) {
    len = 4;
  } else if (lead == 0xF4) {
    len = 4;
    hi = 0x8F;
  } else {
    return 0;
  }
  if (i + len > text.size()) {
    return 0;
  }
  if (byte(i + 1) < lo || byte(i + 1) > hi) {
    return 0;
  }
  for (std::size_t k = 2; k < len; ++k) {
    if (byte(i + k) < 0x80 || byte(i + k) > 0xBF) {
      return 0;
    }
  }
  return len;
}

} // namespace

std::string sanitize_utf8(std::string_view text,
                          std::vector<Diagnostic>& diagnostics) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(text.size());
  int line = 1;
  int last_reported = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t len = valid_sequence_length(text, i);
    if (len == 0) {
      out.append(kReplacement);
      if (last_reported != line) {
        diagnostics.push_back(
            {line, "invalid UTF-8 sequence replaced with U+FFFD"});
        last_reported = line;
      }
      ++i;
      continue;
    }
    if (text[i] == '\n') {
      ++line;
    }
    out.append(text.substr(i, len));
    i += len;
  }
  return out;
}

} // namespace iccscan
