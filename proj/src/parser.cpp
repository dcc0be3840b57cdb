#include "usm/parser.hpp"

#include <cctype>

#include "usm/errors.hpp"

namespace usm {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) {
            fail(ErrorCode::Parse, "unexpected input at offset " + std::to_string(pos_),
                 static_cast<long>(pos_));
        }
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool eat(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void err(const std::string& what) {
        fail(ErrorCode::Parse, what + " at offset " + std::to_string(pos_),
             static_cast<long>(pos_));
    }

    Expr parse_sum() {
        Expr e = parse_term();
        for (;;) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                e = e + parse_term();
            } else if (c == '-') {
                ++pos_;
                e = e - parse_term();
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                e = e * parse_unary();
            } else if (c == '/') {
                ++pos_;
                Expr d = parse_unary();
                if (d.is_zero()) err("division by zero");
                e = e / d;
            } else {
                return e;
            }
        }
    }

    Expr parse_unary() {
        if (peek() == '-') {
            ++pos_;
            return -parse_unary();
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (peek() == '^') {
            ++pos_;
            std::size_t at = pos_;
            Expr e = parse_unary(); // right associative, allows x^-2 and x^(1/2)
            auto g = e.as_gaussian();
            if (!g) {
                fail(ErrorCode::Parse,
                     "exponent must be an exact Gaussian rational at offset " + std::to_string(at),
                     static_cast<long>(at));
            }
            if (base.is_zero() && g->re.signum() <= 0) err("zero to a non-positive power");
            return Expr::power(std::move(base), *g);
        }
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) err("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            if (!eat(')')) err("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        err("unexpected character");
    }

    Expr parse_number() {
        std::size_t start = pos_;
        bool seen_dot = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '.' && !seen_dot) {
                seen_dot = true;
                ++pos_;
            } else {
                break;
            }
        }
        auto r = Rational::from_string(text_.substr(start, pos_ - start));
        if (!r) {
            fail(ErrorCode::Parse, "bad number at offset " + std::to_string(start),
                 static_cast<long>(start));
        }
        return Expr::constant(std::move(*r));
    }

    Expr parse_name() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string name(text_.substr(start, pos_ - start));
        if (peek() == '(') {
            ++pos_;
            Expr arg = parse_sum();
            if (!eat(')')) err("expected ')'");
            if (name == "sqrt") return Expr::sqrt(std::move(arg));
            if (name == "abs") return Expr::abs(std::move(arg));
            if (auto f = fn_from_name(name)) return Expr::call(*f, std::move(arg));
            fail(ErrorCode::UnknownFunction,
                 "unknown function '" + name + "' at offset " + std::to_string(start),
                 static_cast<long>(start));
        }
        if (name == "pi") return Expr::pi();
        if (name == "i") return Expr::imaginary();
        return Expr::variable(std::move(name));
    }
};

} // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

} // namespace usm
