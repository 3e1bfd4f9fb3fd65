#include "quip/text.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace quip {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_word_byte(char c) {
    auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) || c == '\'';
}

}  // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool icontains(std::string_view haystack, std::string_view needle) {
    return to_lower_ascii(haystack).find(to_lower_ascii(needle)) != std::string::npos;
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), is_space);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_byte(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_word_byte(text[j])) ++j;
        std::string_view raw = text.substr(i, j - i);
        while (!raw.empty() && raw.front() == '\'') raw.remove_prefix(1);
        while (!raw.empty() && raw.back() == '\'') raw.remove_suffix(1);
        bool has_letter = std::any_of(raw.begin(), raw.end(), [](char c) {
            auto u = static_cast<unsigned char>(c);
            return u >= 0x80 || std::isalpha(u);
        });
        if (has_letter) tokens.push_back(to_lower_ascii(raw));
        i = j;
    }
    return tokens;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

std::vector<std::string> split_lenient_list(std::string_view text) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    std::size_t start = 0;
    auto flush = [&](std::string_view piece) {
        std::string item = trim(piece);
        // "1. foo", "- foo", "* foo"
        std::size_t k = 0;
        while (k < item.size() && std::isdigit(static_cast<unsigned char>(item[k]))) ++k;
        if (k > 0 && k < item.size() && (item[k] == '.' || item[k] == ')')) item = trim(item.substr(k + 1));
        if (!item.empty() && (item.front() == '-' || item.front() == '*')) item = trim(item.substr(1));
        for (bool changed = true; changed;) {
            changed = false;
            while (!item.empty() && (item.back() == '.' || item.back() == ';')) {
                item.pop_back();
                changed = true;
            }
            if (item.size() >= 2 && (item.front() == '"' || item.front() == '\'') && item.back() == item.front()) {
                item = item.substr(1, item.size() - 2);
                changed = true;
            }
            item = trim(item);
        }
        if (item.empty()) return;
        if (seen.insert(to_lower_ascii(item)).second) out.push_back(std::move(item));
    };
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',' || text[i] == '\n') {
            flush(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return out;
}

}  // namespace quip
