// Copyright 2026 The isnad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "isnad/text.hpp"

#include <openssl/evp.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <array>

#include "isnad/error.hpp"

namespace isnad::text {

namespace {

// Returns the length of the sequence starting at i, or 0 if invalid.
std::size_t utf8_sequence(std::string_view s, std::size_t i, char32_t& out) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    out = b0;
    return 1;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  out = cp;
  return len;
}

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const auto* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || norm == nullptr) {
    throw Error(ErrorKind::config, "ICU NFC normalizer unavailable");
  }
  return *norm;
}

bool in(char32_t c, char32_t lo, char32_t hi) { return c >= lo && c <= hi; }

}  // namespace

std::optional<std::size_t> find_invalid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  char32_t cp;
  while (i < bytes.size()) {
    const std::size_t n = utf8_sequence(bytes, i, cp);
    if (n == 0) return i;
    i += n;
  }
  return std::nullopt;
}

std::u32string to_u32(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  char32_t cp;
  while (i < utf8.size()) {
    const std::size_t n = utf8_sequence(utf8, i, cp);
    if (n == 0) {
      throw Error(ErrorKind::validation,
                  "invalid UTF-8 at byte offset " + std::to_string(i));
    }
    out.push_back(cp);
    i += n;
  }
  return out;
}

std::string to_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 2);
  for (char32_t c : cps) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::string nfc(std::string_view s) {
  const auto& norm = nfc_instance();
  UErrorCode status = U_ZERO_ERROR;
  const auto src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  if (norm.isNormalized(src, status) && U_SUCCESS(status)) return std::string(s);
  status = U_ZERO_ERROR;
  icu::UnicodeString dst;
  norm.normalize(src, dst, status);
  if (U_FAILURE(status)) throw Error(ErrorKind::validation, "NFC normalization failed");
  std::string out;
  dst.toUTF8String(out);
  return out;
}

std::u32string nfc(std::u32string_view s) { return to_u32(nfc(to_utf8(s))); }

bool is_diacritic(char32_t c) {
  return in(c, 0x0610, 0x061A) || in(c, 0x064B, 0x065F) || c == 0x0670 ||
         in(c, 0x06D6, 0x06DC) || in(c, 0x06DF, 0x06E4) || in(c, 0x06E7, 0x06E8) ||
         in(c, 0x06EA, 0x06ED) || in(c, 0x08D3, 0x08E1) || in(c, 0x08E3, 0x08FF);
}

bool is_arabic_letter(char32_t c) {
  return in(c, 0x0621, 0x063A) || in(c, 0x0641, 0x064A) || in(c, 0x066E, 0x066F) ||
         in(c, 0x0671, 0x06D3) || c == 0x06D5 || in(c, 0x06EE, 0x06EF) ||
         in(c, 0x06FA, 0x06FC) || c == 0x06FF || in(c, 0x0750, 0x077F) ||
         in(c, 0x08A0, 0x08C9);
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

bool is_sentence_delimiter(char32_t c) {
  return c == U'.' || c == U'!' || c == U'?' || c == U'؟' || c == U'۔';
}

bool is_digit(char32_t c) {
  return in(c, U'0', U'9') || in(c, 0x0660, 0x0669) || in(c, 0x06F0, 0x06F9);
}

bool is_punctuation(char32_t c) { return u_ispunct(static_cast<UChar32>(c)); }

std::u32string strip_diacritics(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (!is_diacritic(c)) out.push_back(c);
  }
  return out;
}

std::string strip_diacritics(std::string_view utf8) {
  return to_utf8(strip_diacritics(to_u32(utf8)));
}

std::u32string_view trim(std::u32string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::vector<std::u32string> words(std::u32string_view s) {
  std::vector<std::u32string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && is_punctuation(s[b])) ++b;
    while (e > b && is_punctuation(s[e - 1])) --e;
    if (e > b) out.emplace_back(s.substr(b, e - b));
    i = j;
  }
  return out;
}

std::vector<std::string> words(std::string_view utf8) {
  std::vector<std::string> out;
  for (const auto& w : words(to_u32(utf8))) out.push_back(to_utf8(w));
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::io, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

double arabic_letter_ratio(std::u32string_view s) {
  std::size_t letters = 0;
  std::size_t arabic = 0;
  for (char32_t c : s) {
    if (is_arabic_letter(c)) {
      ++arabic;
      ++letters;
    } else if (u_isalpha(static_cast<UChar32>(c))) {
      ++letters;
    }
  }
  return letters == 0 ? 0.0 : static_cast<double>(arabic) / static_cast<double>(letters);
}

}  // namespace isnad::text
