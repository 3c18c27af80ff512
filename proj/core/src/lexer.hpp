#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "solscan/source_file.hpp"

namespace solscan::ir::detail {

enum class TokenKind { Identifier, Number, String, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string_view text;
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] bool is(std::string_view s) const noexcept {
        return (kind == TokenKind::Punct || kind == TokenKind::Identifier) && text == s;
    }
};

/// Splits the file into tokens, dropping whitespace and comments. String
/// literals become a single token so their contents are never inspected.
/// The returned vector always ends with an End token. Throws ParseError for
/// unterminated comments or strings.
std::vector<Token> tokenize(const SourceFile& file);

/// Throws ParseError when (), [] or {} are not balanced.
void check_balance(const SourceFile& file, const std::vector<Token>& tokens);

}  // namespace solscan::ir::detail
