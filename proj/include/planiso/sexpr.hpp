#ifndef PLANISO_SEXPR_HPP_
#define PLANISO_SEXPR_HPP_

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "util.hpp"

namespace planiso {

// Minimal s-expression reader for PDDL. Symbols are case-folded to lower
// case (PDDL is case insensitive); `;` starts a comment to end of line.
struct SExpr {
    bool is_list = false;
    std::string atom;
    std::vector<SExpr> items;
    int line = 0;
    int col = 0;

    bool is_symbol(std::string_view s) const { return !is_list && atom == s; }

    const SExpr& at(size_t i) const {
        if (!is_list || i >= items.size())
            throw parse_error(line, col, "expected list element " + std::to_string(i));
        return items[i];
    }

    std::string head() const {
        if (is_list && !items.empty() && !items[0].is_list)
            return items[0].atom;
        return "";
    }
};

namespace detail {

class SexprReader {
  public:
    explicit SexprReader(std::string_view text) : text_(text) {}

    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        skip_ws();
        while (!eof()) {
            out.push_back(read());
            skip_ws();
        }
        return out;
    }

  private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == ';') {
                while (!eof() && peek() != '\n')
                    advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        skip_ws();
        if (eof())
            throw parse_error(line_, col_, "unexpected end of input");
        SExpr node;
        node.line = line_;
        node.col = col_;
        if (peek() == '(') {
            advance();
            node.is_list = true;
            skip_ws();
            while (!eof() && peek() != ')') {
                node.items.push_back(read());
                skip_ws();
            }
            if (eof())
                throw parse_error(node.line, node.col, "unbalanced '('");
            advance(); // ')'
            return node;
        }
        if (peek() == ')')
            throw parse_error(line_, col_, "unexpected ')'");
        std::string atom;
        while (!eof() && peek() != '(' && peek() != ')' && peek() != ';' &&
               !std::isspace(static_cast<unsigned char>(peek()))) {
            atom.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(peek()))));
            advance();
        }
        node.atom = std::move(atom);
        return node;
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace detail

inline std::vector<SExpr> parse_sexprs(std::string_view text) {
    return detail::SexprReader(text).read_all();
}

inline SExpr parse_single_sexpr(std::string_view text) {
    auto all = parse_sexprs(text);
    if (all.size() != 1)
        throw Error(ErrorKind::parse, "expected exactly one top-level s-expression, got " + std::to_string(all.size()));
    return std::move(all[0]);
}

} // namespace planiso

#endif // PLANISO_SEXPR_HPP_
