#pragma once

#include <unicode/errorcode.h>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <string>
#include <string_view>

#include "ktl/util/error.hpp"

namespace ktl::text {

inline bool is_ascii(std::string_view s) noexcept {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

inline bool is_space(unsigned char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// NFC, lowercase, whitespace runs collapsed to one space, trimmed.
inline std::string normalize(std::string_view raw) {
  std::string folded;
  if (is_ascii(raw)) {
    folded.assign(raw);
    for (char& c : folded) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
  } else {
    icu::ErrorCode status;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (status.isFailure()) fail(ErrorKind::kValidation, "ICU NFC normalizer unavailable");
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    u.toLower(icu::Locale::getRoot());
    icu::UnicodeString n = nfc->normalize(u, status);
    if (status.isFailure()) fail(ErrorKind::kValidation, "invalid UTF-8 input to normalize");
    n.toUTF8String(folded);
  }

  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (char c : folded) {
    if (is_space(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace ktl::text
