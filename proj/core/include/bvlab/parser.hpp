#pragma once

#include "bvlab/polynomial.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>

namespace bvlab {

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& m, int line, int col)
        : std::runtime_error(m + " at line " + std::to_string(line) + ", column " +
                             std::to_string(col)),
          line(line), col(col) {}
    int line, col;
};

class UnknownSymbol : public std::runtime_error {
public:
    explicit UnknownSymbol(const std::string& m) : std::runtime_error(m) {}
};

class IndexRangeMismatch : public std::runtime_error {
public:
    explicit IndexRangeMismatch(const std::string& m) : std::runtime_error(m) {}
};

/// Lexical token stream with positions.
struct Token {
    enum Kind { Ident, Int, Punct, End } kind = End;
    std::string text;
    long value = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src);
    const Token& peek(int ahead = 0) const;
    Token next();
    bool accept(const std::string& punct_or_ident);
    void expect(const std::string& punct_or_ident);
    [[noreturn]] void fail(const std::string& msg) const;

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

/// Parsing environment: declared index names, numeric tensors, macros and
/// parameter values, on top of the symbol registry in the Context.
struct ParseEnv {
    Context* ctx = nullptr;
    std::map<std::string, int> index_ranges;      // name -> range
    std::set<std::string> spacetime_indices;      // declared with range `dim`
    std::map<std::string, Scalar> params;         // numeric parameters
    // numeric tensors: name -> (slot count, evaluator)
    std::map<std::string, std::pair<int, std::function<Scalar(const std::vector<int>&)>>>
        tensors;
    struct Macro {
        std::vector<std::string> slots;
        std::string body; // reparsed on expansion with slot indices bound
    };
    std::map<std::string, Macro> macros;

    void install_builtin_tensors();
};

/// Parses an expression with implicit summation over repeated declared
/// indices (one diagonal metric factor per repeated spacetime pair unless an
/// explicit eta slot supplies it). `pattern` names are left free and bound
/// from the outside.
Polynomial parse_expression(const std::string& text, ParseEnv& env,
                            const std::map<std::string, int>& pattern = {});

/// Free index names of an expression (after contraction), for pattern
/// statements such as transforms.
std::set<std::string> free_indices(const std::string& text, ParseEnv& env);

} // namespace bvlab
