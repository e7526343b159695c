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

// Code-point level helpers shared by every stage. All offsets the pipeline
// stores are code-point offsets into UTF-32 views of normalized text.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace isnad::text {

/// Byte offset of the first invalid UTF-8 sequence, if any.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

/// Throws isnad::Error (validation) naming the byte offset on bad input.
std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view cps);

/// Unicode canonical composition (NFC).
std::u32string nfc(std::u32string_view s);
std::string nfc(std::string_view s);

constexpr char32_t kTatweel = U'ـ';

/// Harakat, tanwin, shadda, sukun, superscript alef, Quranic annotation marks.
bool is_diacritic(char32_t c);
/// Hamza, alef, ya ... (U+0621..U+064A plus extended Arabic-script letters).
bool is_arabic_letter(char32_t c);
bool is_space(char32_t c);
/// Sentence-final punctuation: . ! ? and the Arabic question mark / full stop.
bool is_sentence_delimiter(char32_t c);
/// ASCII, Arabic-Indic and Extended Arabic-Indic digits.
bool is_digit(char32_t c);
bool is_punctuation(char32_t c);

std::u32string strip_diacritics(std::u32string_view s);
std::string strip_diacritics(std::string_view utf8);

/// Whitespace-separated tokens with leading/trailing punctuation removed.
/// Tokens that are pure punctuation are dropped.
std::vector<std::u32string> words(std::u32string_view s);
std::vector<std::string> words(std::string_view utf8);

/// Trims Unicode whitespace on both ends.
std::u32string_view trim(std::u32string_view s);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Share of code points that are Arabic letters among all letters (0 if no
/// letters at all).
double arabic_letter_ratio(std::u32string_view s);

}  // namespace isnad::text
