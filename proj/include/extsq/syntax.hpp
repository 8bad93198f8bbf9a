// Tokenizer shared by the text formats (algebra elements, module elements,
// tensor expressions).
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "extsq/milnor.hpp"

namespace extsq {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// coef * gen, as written in module element expressions ("Sq4 Sq2 k1").
struct ModuleTerm {
    AlgebraElement coef;
    std::string gen;
};

struct Token {
    enum class Kind { Sq, Ident, Number, Plus, LParen, RParen, Tensor, End };
    Kind kind = Kind::End;
    MilnorMonomial mono;  // Kind::Sq
    std::string text;     // Kind::Ident / Kind::Number
    std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view text);

// Recursive-descent helpers over a token stream.
class TokenStream {
public:
    explicit TokenStream(std::string_view text) : text_(text), tokens_(tokenize(text)) {}

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool accept(Token::Kind k);
    void expect(Token::Kind k, const char* what);
    bool at_end() const { return peek().kind == Token::Kind::End; }
    std::size_t position() const { return pos_; }
    void rewind(std::size_t p) { pos_ = p; }
    // Index of the token matching the '(' at position p.
    std::size_t matching_paren(std::size_t p) const;
    const Token& at(std::size_t p) const { return tokens_[p]; }
    [[noreturn]] void fail(const std::string& msg) const;

    // sum := product ('+' product)* ; product := factor+ ;
    // factor := Sq-token | '1' | '(' sum ')'.  Stops before identifiers.
    AlgebraElement parse_algebra_sum();
    // One or more factors multiplied together; unit when none are present.
    AlgebraElement parse_algebra_product();
    bool starts_algebra_factor() const;

    // term := product? (ident | '(' module-sum ')') ; joined by '+'.  A
    // coefficient in front of a parenthesized sum distributes over it.
    // Stops before a tensor sign, ')' or the end.
    std::vector<ModuleTerm> parse_module_sum();

private:
    std::string text_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace extsq
