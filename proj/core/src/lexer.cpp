#include "lexer.hpp"

#include <array>
#include <cctype>

#include "solscan/error.hpp"

namespace solscan::ir::detail {
namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_part(char c) {
    return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

// Longest first.
constexpr std::array<std::string_view, 27> kPunctuators = {
    ">>>=", ">>>", ">>=", "<<=", "**=", "**", "==", "!=", "<=",
    ">=",   "&&",  "||",  "++",  "--",  "+=", "-=", "*=", "/=",
    "%=",   "|=",  "&=",  "^=",  "<<",  ">>", "=>", "->", ":=",
};

[[noreturn]] void fail(const SourceFile& file, std::size_t offset, const std::string& what) {
    const auto loc = file.location(offset);
    throw ParseError(what, loc.line, loc.column);
}

std::size_t scan_string(const SourceFile& file, std::size_t start) {
    const auto& text = file.text();
    const char quote = text[start];
    std::size_t i = start + 1;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\\') {
            i += 2;
            continue;
        }
        if (c == quote) {
            return i + 1;
        }
        if (c == '\n') {
            break;
        }
        ++i;
    }
    fail(file, start, "unterminated string literal");
}

}  // namespace

std::vector<Token> tokenize(const SourceFile& file) {
    const std::string& text = file.text();
    const std::string_view view(text);
    std::vector<Token> tokens;
    std::size_t i = 0;
    auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
        tokens.push_back(Token{kind, view.substr(begin, end - begin), begin, end});
    };

    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') {
                ++i;
            }
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            const auto close = text.find("*/", i + 2);
            if (close == std::string::npos) {
                fail(file, i, "unterminated block comment");
            }
            i = close + 2;
            continue;
        }
        if (c == '"' || c == '\'') {
            const auto end = scan_string(file, i);
            push(TokenKind::String, i, end);
            i = end;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < text.size() && ident_part(text[j])) {
                ++j;
            }
            const auto word = view.substr(i, j - i);
            if ((word == "hex" || word == "unicode") && j < text.size() &&
                (text[j] == '"' || text[j] == '\'')) {
                const auto end = scan_string(file, j);
                push(TokenKind::String, i, end);
                i = end;
                continue;
            }
            push(TokenKind::Identifier, i, j);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            if (c == '0' && i + 1 < text.size() && (text[i + 1] == 'x' || text[i + 1] == 'X')) {
                j += 2;
                while (j < text.size() && (std::isxdigit(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
                    ++j;
                }
            } else {
                while (j < text.size()) {
                    const char d = text[j];
                    if (std::isdigit(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                        ++j;
                    } else if ((d == 'e' || d == 'E') && j + 1 < text.size() &&
                               (std::isdigit(static_cast<unsigned char>(text[j + 1])) || text[j + 1] == '-')) {
                        j += 2;
                    } else {
                        break;
                    }
                }
            }
            push(TokenKind::Number, i, j);
            i = j;
            continue;
        }
        std::size_t len = 1;
        for (auto p : kPunctuators) {
            if (view.substr(i, p.size()) == p) {
                len = p.size();
                break;
            }
        }
        push(TokenKind::Punct, i, i + len);
        i += len;
    }
    tokens.push_back(Token{TokenKind::End, {}, text.size(), text.size()});
    return tokens;
}

void check_balance(const SourceFile& file, const std::vector<Token>& tokens) {
    std::vector<const Token*> open;
    for (const auto& tok : tokens) {
        if (tok.kind != TokenKind::Punct) {
            continue;
        }
        if (tok.text == "(" || tok.text == "[" || tok.text == "{") {
            open.push_back(&tok);
            continue;
        }
        char expected = 0;
        if (tok.text == ")") {
            expected = '(';
        } else if (tok.text == "]") {
            expected = '[';
        } else if (tok.text == "}") {
            expected = '{';
        } else {
            continue;
        }
        if (open.empty()) {
            fail(file, tok.begin, "unmatched '" + std::string(tok.text) + "'");
        }
        if (open.back()->text[0] != expected) {
            fail(file, open.back()->begin, "unbalanced '" + std::string(open.back()->text) + "'");
        }
        open.pop_back();
    }
    if (!open.empty()) {
        fail(file, open.back()->begin, "unbalanced '" + std::string(open.back()->text) + "' at end of input");
    }
}

}  // namespace solscan::ir::detail
