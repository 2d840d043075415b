#include "crevtax/text.hpp"

#include <atomic>
#include <cctype>
#include <iostream>
#include <mutex>

namespace crevtax::text {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_alnum(unsigned char c) { return c >= 0x80 || std::isalnum(c) != 0; }

std::atomic<bool> g_warnings_enabled{true};
std::mutex g_warn_mutex;

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view trim_wrapping(std::string_view s) {
    auto wrapping = [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return u < 0x80 && (std::isspace(u) != 0 || std::ispunct(u) != 0);
    };
    while (!s.empty() && wrapping(s.front())) s.remove_prefix(1);
    while (!s.empty() && wrapping(s.back())) s.remove_suffix(1);
    return s;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = false;
    for (char c : s) {
        if (is_space(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return out;
}

std::string normalize_name(std::string_view s) { return to_lower(collapse_whitespace(trim(s))); }

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

std::size_t utf8_floor(std::string_view s, std::size_t pos) {
    if (pos >= s.size()) return s.size();
    while (pos > 0 && (static_cast<unsigned char>(s[pos]) & 0xC0) == 0x80) --pos;
    return pos;
}

bool is_word_boundary(std::string_view haystack, std::size_t begin, std::size_t end) {
    const bool left = begin == 0 || !is_alnum(static_cast<unsigned char>(haystack[begin - 1]));
    const bool right = end >= haystack.size() || !is_alnum(static_cast<unsigned char>(haystack[end]));
    return left && right;
}

void warn(std::string_view message) {
    if (!g_warnings_enabled.load(std::memory_order_relaxed)) return;
    std::lock_guard lock(g_warn_mutex);
    std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings_enabled.store(enabled, std::memory_order_relaxed); }

}  // namespace crevtax::text
