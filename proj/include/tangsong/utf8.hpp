#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "tangsong/error.hpp"

namespace tangsong::utf8 {

/// Byte length of the sequence announced by a lead byte, or 0 when the byte
/// cannot start a sequence.
inline std::size_t sequence_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0) return 2;
    if ((lead & 0xF0) == 0xE0) return 3;
    if ((lead & 0xF8) == 0xF0) return 4;
    return 0;
}

/// Decodes the codepoint starting at byte offset `pos`. `len` receives the
/// encoded length. Throws on malformed input (bad lead, truncation, overlong
/// forms, surrogates, out-of-range values).
inline char32_t decode_at(std::string_view s, std::size_t pos, std::size_t& len) {
    const auto bad = [&](const char* what) -> char32_t {
        throw Error("invalid UTF-8 (" + std::string(what) + ") at byte " + std::to_string(pos));
    };
    const unsigned char lead = static_cast<unsigned char>(s[pos]);
    len = sequence_length(lead);
    if (len == 0) return bad("stray continuation byte");
    if (pos + len > s.size()) return bad("truncated sequence");
    if (len == 1) return lead;

    char32_t cp = lead & (0x7F >> len);
    for (std::size_t i = 1; i < len; ++i) {
        const unsigned char c = static_cast<unsigned char>(s[pos + i]);
        if ((c & 0xC0) != 0x80) return bad("missing continuation byte");
        cp = (cp << 6) | (c & 0x3F);
    }
    static constexpr char32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len]) return bad("overlong encoding");
    if (cp >= 0xD800 && cp <= 0xDFFF) return bad("surrogate codepoint");
    if (cp > 0x10FFFF) return bad("codepoint out of range");
    return cp;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::size_t encoded_length(char32_t cp) {
    if (cp < 0x80) return 1;
    if (cp < 0x800) return 2;
    if (cp < 0x10000) return 3;
    return 4;
}

inline std::string encode(std::u32string_view s) {
    std::string out;
    out.reserve(s.size() * 3);
    for (char32_t cp : s) append(out, cp);
    return out;
}

inline std::string encode(char32_t cp) {
    std::string out;
    append(out, cp);
    return out;
}

inline std::u32string decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t len = 0;
        out.push_back(decode_at(s, pos, len));
        pos += len;
    }
    return out;
}

/// Codepoint count of a UTF-8 string.
inline std::size_t length(std::string_view s) {
    std::size_t n = 0, pos = 0;
    while (pos < s.size()) {
        std::size_t len = 0;
        decode_at(s, pos, len);
        pos += len;
        ++n;
    }
    return n;
}

/// CJK ideographs proper: the unified blocks and their extensions plus the
/// compatibility blocks and U+3007. Kana, hangul, radicals, and CJK
/// punctuation are deliberately not included.
inline bool is_cjk_ideograph(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF)       // CJK Unified Ideographs
        || (cp >= 0x3400 && cp <= 0x4DBF)       // Extension A
        || (cp >= 0xF900 && cp <= 0xFAFF)       // Compatibility Ideographs
        || (cp >= 0x20000 && cp <= 0x2A6DF)     // Extension B
        || (cp >= 0x2A700 && cp <= 0x2EBEF)     // Extensions C-F
        || (cp >= 0x2F800 && cp <= 0x2FA1F)     // Compatibility Supplement
        || cp == 0x3007;                        // ideographic zero
}

} // namespace tangsong::utf8
