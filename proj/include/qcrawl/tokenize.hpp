#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qcrawl {

/// Lowercases ASCII letters and splits on every ASCII character that is not a
/// letter or digit. Multi-byte UTF-8 sequences count as word characters and
/// are kept verbatim (no case folding outside ASCII).
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> terms;
    std::string cur;
    for (unsigned char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
            cur.push_back(static_cast<char>(c));
        } else if (c >= 'A' && c <= 'Z') {
            cur.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (!cur.empty()) {
            terms.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) terms.push_back(std::move(cur));
    return terms;
}

} // namespace qcrawl
