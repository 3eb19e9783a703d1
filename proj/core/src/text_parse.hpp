#pragma once

#include "cpals/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace cpals::detail {

struct Token {
    std::string_view text;
    std::size_t line;
    std::size_t column;
};

// Splits one line into whitespace-separated tokens with 1-based columns.
inline std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back({line.substr(start, i - start), line_no, start + 1});
    }
    return tokens;
}

template <class T>
T parse_number(const Token& tok, const char* what) {
    T value{};
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    // from_chars rejects a leading '+', which is legal in exported data.
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError(std::string("expected ") + what + ", got '" + std::string(tok.text) + "'",
                         tok.line, tok.column);
    return value;
}

inline bool read_line(std::istream& in, std::string& line, std::size_t& line_no) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

}  // namespace cpals::detail
