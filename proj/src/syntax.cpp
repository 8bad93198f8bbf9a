#include "extsq/syntax.hpp"

#include <cctype>

namespace extsq {
namespace {

bool is_ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '{' || c == '}';
}

// Reads the exponent part after "Sq": 12, ^12, ^{12}, (0,4), ^{(0,4)}, ^{0,4}.
MilnorMonomial read_sq_exponents(std::string_view s, std::size_t& i)
{
    auto skip_ws = [&] {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
    };
    skip_ws();
    if (i < s.size() && s[i] == '^') {
        ++i;
        skip_ws();
    }
    int braces = 0;
    while (i < s.size() && s[i] == '{') {
        ++braces;
        ++i;
    }
    bool paren = false;
    if (i < s.size() && s[i] == '(') {
        paren = true;
        ++i;
    }
    std::vector<int> ex;
    while (true) {
        skip_ws();
        std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
            ++i;
        if (start == i)
            throw ParseError("expected exponent digits at offset " + std::to_string(start));
        ex.push_back(std::stoi(std::string(s.substr(start, i - start))));
        skip_ws();
        if (i < s.size() && s[i] == ',' && (paren || braces > 0)) {
            ++i;
            continue;
        }
        break;
    }
    if (paren) {
        if (i >= s.size() || s[i] != ')')
            throw ParseError("expected ')' in Sq exponent at offset " + std::to_string(i));
        ++i;
    }
    for (int b = 0; b < braces; ++b) {
        skip_ws();
        if (i >= s.size() || s[i] != '}')
            throw ParseError("expected '}' in Sq exponent at offset " + std::to_string(i));
        ++i;
    }
    return MilnorMonomial(ex);
}

}  // namespace

std::vector<Token> tokenize(std::string_view s)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token tok;
        tok.pos = i;
        if (c == '+') {
            tok.kind = Token::Kind::Plus;
            ++i;
        }
        else if (c == '(') {
            tok.kind = Token::Kind::LParen;
            ++i;
        }
        else if (c == ')') {
            tok.kind = Token::Kind::RParen;
            ++i;
        }
        else if (s.substr(i, 3) == "\xE2\x8A\x97") {  // U+2297
            tok.kind = Token::Kind::Tensor;
            i += 3;
        }
        else if (s.substr(i, 8) == "\\otimes ") {
            tok.kind = Token::Kind::Tensor;
            i += 7;
        }
        else if (s.substr(i, 7) == "\\otimes") {
            tok.kind = Token::Kind::Tensor;
            i += 7;
        }
        else if (s.substr(i, 2) == "Sq" && (i + 2 >= s.size() || !std::isalpha(static_cast<unsigned char>(s[i + 2])))) {
            i += 2;
            tok.kind = Token::Kind::Sq;
            tok.mono = read_sq_exponents(s, i);
        }
        else if (is_ident_char(c)) {
            std::size_t start = i;
            while (i < s.size() && is_ident_char(s[i]))
                ++i;
            tok.text = std::string(s.substr(start, i - start));
            bool digits = true;
            for (char d : tok.text)
                digits = digits && std::isdigit(static_cast<unsigned char>(d));
            tok.kind = digits ? Token::Kind::Number : Token::Kind::Ident;
        }
        else {
            throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " + std::to_string(i));
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.kind = Token::Kind::End;
    end.pos = s.size();
    out.push_back(end);
    return out;
}

const Token& TokenStream::peek(std::size_t ahead) const
{
    const std::size_t p = pos_ + ahead;
    return p < tokens_.size() ? tokens_[p] : tokens_.back();
}

const Token& TokenStream::next()
{
    const Token& t = peek();
    if (pos_ + 1 < tokens_.size())
        ++pos_;
    return t;
}

bool TokenStream::accept(Token::Kind k)
{
    if (peek().kind != k)
        return false;
    next();
    return true;
}

void TokenStream::expect(Token::Kind k, const char* what)
{
    if (!accept(k))
        fail(std::string("expected ") + what);
}

std::size_t TokenStream::matching_paren(std::size_t p) const
{
    int depth = 0;
    for (std::size_t q = p; q < tokens_.size(); ++q) {
        if (tokens_[q].kind == Token::Kind::LParen)
            ++depth;
        else if (tokens_[q].kind == Token::Kind::RParen && --depth == 0)
            return q;
    }
    fail("unbalanced parenthesis");
}

void TokenStream::fail(const std::string& msg) const
{
    throw ParseError(msg + " at offset " + std::to_string(peek().pos) + " in '" + text_ + "'");
}

bool TokenStream::starts_algebra_factor() const
{
    const Token& t = peek();
    if (t.kind == Token::Kind::Sq)
        return true;
    if (t.kind == Token::Kind::Number)
        return t.text == "1" || t.text == "0";
    if (t.kind == Token::Kind::LParen) {
        const std::size_t close = matching_paren(pos_);
        for (std::size_t q = pos_ + 1; q < close; ++q)
            if (tokens_[q].kind == Token::Kind::Ident || tokens_[q].kind == Token::Kind::Tensor)
                return false;
        return true;
    }
    return false;
}

AlgebraElement TokenStream::parse_algebra_product()
{
    AlgebraElement acc = AlgebraElement::unit();
    while (starts_algebra_factor()) {
        const Token& t = next();
        if (t.kind == Token::Kind::Sq) {
            acc = acc * AlgebraElement(t.mono);
        }
        else if (t.kind == Token::Kind::Number) {
            if (t.text == "0")
                acc = AlgebraElement::zero(acc.degree());
        }
        else {
            AlgebraElement inner = parse_algebra_sum();
            expect(Token::Kind::RParen, "')'");
            acc = acc * inner;
        }
    }
    return acc;
}

AlgebraElement TokenStream::parse_algebra_sum()
{
    if (!starts_algebra_factor())
        fail("expected an algebra element");
    AlgebraElement acc = parse_algebra_product();
    while (peek().kind == Token::Kind::Plus) {
        const std::size_t save = pos_;
        next();
        if (!starts_algebra_factor()) {
            rewind(save);
            break;
        }
        AlgebraElement term = parse_algebra_product();
        if (acc.is_zero() && acc.terms().empty() && term.degree() != acc.degree())
            acc = AlgebraElement::zero(term.degree());
        if (!term.is_zero() && term.degree() != acc.degree() && !acc.is_zero())
            fail("inhomogeneous sum");
        if (acc.is_zero())
            acc = term;
        else if (!term.is_zero())
            acc += term;
    }
    return acc;
}

std::vector<ModuleTerm> TokenStream::parse_module_sum()
{
    std::vector<ModuleTerm> out;
    while (true) {
        AlgebraElement coef = AlgebraElement::unit();
        if (starts_algebra_factor())
            coef = parse_algebra_product();
        if (peek().kind == Token::Kind::Ident) {
            out.push_back({coef, next().text});
        }
        else if (peek().kind == Token::Kind::LParen) {
            next();
            for (auto& t : parse_module_sum())
                out.push_back({coef * t.coef, std::move(t.gen)});
            expect(Token::Kind::RParen, "')'");
        }
        else if (coef.is_zero()) {
            // a literal 0 term contributes nothing
        }
        else {
            fail("expected a generator name");
        }
        if (!accept(Token::Kind::Plus))
            break;
    }
    return out;
}

}  // namespace extsq
