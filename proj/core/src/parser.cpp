#include "bvlab/parser.hpp"
#include "bvlab/jets.hpp"

#include <cctype>
#include <memory>

namespace bvlab {

Lexer::Lexer(const std::string& src) {
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Token::Kind k, std::string t, long v, int l, int c) {
        Token tok;
        tok.kind = k;
        tok.text = std::move(t);
        tok.value = v;
        tok.line = l;
        tok.col = c;
        toks_.push_back(std::move(tok));
    };
    while (i < src.size()) {
        char ch = src[i];
        if (ch == '\n') { ++line; col = 1; ++i; continue; }
        if (std::isspace(static_cast<unsigned char>(ch))) { ++col; ++i; continue; }
        if (ch == '#') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        int l = line, c = col;
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::string id;
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                id += src[i++];
            }
            push(Token::Ident, id, 0, l, c);
            col += static_cast<int>(id.size());
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            long v = 0;
            std::string t;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                v = v * 10 + (src[i] - '0');
                t += src[i];
                ++i;
            }
            push(Token::Int, t, v, l, c);
            col += static_cast<int>(t.size());
            continue;
        }
        static const std::string punct = "+-*/^()[]{},;:=";
        if (punct.find(ch) != std::string::npos) {
            push(Token::Punct, std::string(1, ch), 0, l, c);
            ++i; ++col;
            continue;
        }
        throw SyntaxError(std::string("unexpected character '") + ch + "'", line, col);
    }
    Token end;
    end.kind = Token::End;
    end.line = line;
    end.col = col;
    toks_.push_back(end);
}

const Token& Lexer::peek(int ahead) const {
    std::size_t k = pos_ + ahead;
    if (k >= toks_.size()) k = toks_.size() - 1;
    return toks_[k];
}

Token Lexer::next() {
    Token t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
}

bool Lexer::accept(const std::string& s) {
    const Token& t = peek();
    if ((t.kind == Token::Punct || t.kind == Token::Ident) && t.text == s) {
        next();
        return true;
    }
    return false;
}

void Lexer::expect(const std::string& s) {
    if (!accept(s)) fail("expected '" + s + "'");
}

void Lexer::fail(const std::string& msg) const {
    const Token& t = peek();
    throw SyntaxError(msg + (t.kind == Token::End ? " (at end of input)"
                                                  : " (got '" + t.text + "')"),
                      t.line, t.col);
}

void ParseEnv::install_builtin_tensors() {
    Context* c = ctx;
    tensors["eta"] = {2, [c](const std::vector<int>& iv) -> Scalar {
                          return iv[0] == iv[1] ? Scalar(c->metric[iv[0]]) : Scalar(0);
                      }};
    tensors["epsilon"] = {3, [](const std::vector<int>& iv) -> Scalar {
                              int a = iv[0], b = iv[1], cc = iv[2];
                              int s = (b - a) * (cc - a) * (cc - b);
                              if (s == 0) return Scalar(0);
                              int v = (s > 0) ? 1 : -1;
                              // normalised so that epsilon(0,1,2) = 1
                              return Scalar(Rat(v));
                          }};
}

namespace {

struct IndexExpr {
    bool is_name = false;
    int value = 0;
    std::string name;
};

struct Node;
using NodeP = std::shared_ptr<Node>;

struct Node {
    enum K { Num, Sym, Deriv, Add, Mul, Div, Neg, Pow } k = Num;
    Scalar num;
    std::string name;
    bool af = false;
    std::vector<IndexExpr> idx;
    NodeP a, b;
    int power = 1;
};

class ExprParser {
public:
    ExprParser(Lexer& lx, ParseEnv& env) : lx_(lx), env_(env) {}

    NodeP parse() { return parse_add(); }

private:
    NodeP parse_add() {
        NodeP n = parse_term();
        for (;;) {
            if (lx_.accept("+")) {
                auto r = std::make_shared<Node>();
                r->k = Node::Add;
                r->a = n;
                r->b = parse_term();
                n = r;
            } else if (lx_.accept("-")) {
                auto neg = std::make_shared<Node>();
                neg->k = Node::Neg;
                neg->a = parse_term();
                auto r = std::make_shared<Node>();
                r->k = Node::Add;
                r->a = n;
                r->b = neg;
                n = r;
            } else {
                return n;
            }
        }
    }

    NodeP parse_term() {
        NodeP n = parse_unary();
        for (;;) {
            if (lx_.accept("*")) {
                auto r = std::make_shared<Node>();
                r->k = Node::Mul;
                r->a = n;
                r->b = parse_unary();
                n = r;
            } else if (lx_.accept("/")) {
                auto r = std::make_shared<Node>();
                r->k = Node::Div;
                r->a = n;
                r->b = parse_unary();
                n = r;
            } else {
                return n;
            }
        }
    }

    NodeP parse_unary() {
        if (lx_.accept("-")) {
            auto r = std::make_shared<Node>();
            r->k = Node::Neg;
            r->a = parse_unary();
            return r;
        }
        return parse_pow();
    }

    NodeP parse_pow() {
        NodeP n = parse_primary();
        if (lx_.accept("^")) {
            const Token& t = lx_.peek();
            if (t.kind != Token::Int) lx_.fail("expected integer exponent");
            lx_.next();
            auto r = std::make_shared<Node>();
            r->k = Node::Pow;
            r->a = n;
            r->power = static_cast<int>(t.value);
            if (r->power < 0) lx_.fail("negative exponents are not supported");
            n = r;
        }
        return n;
    }

    IndexExpr parse_index() {
        const Token& t = lx_.peek();
        IndexExpr ie;
        if (t.kind == Token::Int) {
            lx_.next();
            ie.value = static_cast<int>(t.value);
            return ie;
        }
        if (t.kind == Token::Ident) {
            lx_.next();
            ie.is_name = true;
            ie.name = t.text;
            return ie;
        }
        lx_.fail("expected index");
    }

    std::vector<IndexExpr> parse_index_list() {
        std::vector<IndexExpr> idx;
        if (lx_.accept("[")) {
            do {
                idx.push_back(parse_index());
            } while (lx_.accept(","));
            lx_.expect("]");
        }
        return idx;
    }

    NodeP parse_primary() {
        const Token& t = lx_.peek();
        if (t.kind == Token::Int) {
            lx_.next();
            auto r = std::make_shared<Node>();
            r->k = Node::Num;
            r->num = Scalar(Rat(t.value));
            return r;
        }
        if (t.kind == Token::Punct && t.text == "(") {
            lx_.next();
            NodeP n = parse_add();
            lx_.expect(")");
            return n;
        }
        if (t.kind == Token::Ident) {
            if (t.text == "i" && !(lx_.peek(1).kind == Token::Punct && lx_.peek(1).text == "[")) {
                lx_.next();
                auto r = std::make_shared<Node>();
                r->k = Node::Num;
                r->num = Scalar::i();
                return r;
            }
            if (t.text == "d" && lx_.peek(1).kind == Token::Punct && lx_.peek(1).text == "(") {
                lx_.next();
                lx_.expect("(");
                auto r = std::make_shared<Node>();
                r->k = Node::Deriv;
                r->a = parse_add();
                if (!lx_.accept(",")) lx_.fail("d(...) needs at least one direction");
                do {
                    r->idx.push_back(parse_index());
                } while (lx_.accept(","));
                lx_.expect(")");
                return r;
            }
            if (t.text == "af" && lx_.peek(1).kind == Token::Punct && lx_.peek(1).text == "(") {
                lx_.next();
                lx_.expect("(");
                const Token& nm = lx_.peek();
                if (nm.kind != Token::Ident) lx_.fail("af(...) needs a symbol name");
                lx_.next();
                lx_.expect(")");
                auto r = std::make_shared<Node>();
                r->k = Node::Sym;
                r->name = nm.text;
                r->af = true;
                r->idx = parse_index_list();
                return r;
            }
            lx_.next();
            auto r = std::make_shared<Node>();
            r->k = Node::Sym;
            r->name = t.text;
            r->idx = parse_index_list();
            return r;
        }
        lx_.fail("expected expression");
    }

    Lexer& lx_;
    ParseEnv& env_;
};

// ---- flattening into sums of ordered atom products ----

struct Atom {
    enum K { Var, Tensor, Deriv } k = Var;
    std::string name;
    bool af = false;
    std::vector<IndexExpr> idx;
    // Deriv payload
    struct FlatTermBox;
    std::shared_ptr<FlatTermBox> inner;
    std::vector<IndexExpr> dirs;
};

struct FlatTerm {
    Scalar coeff{1};
    std::vector<Atom> atoms;
};

struct Atom::FlatTermBox {
    std::vector<FlatTerm> terms;
};

class Elaborator {
public:
    Elaborator(ParseEnv& env, const std::map<std::string, int>& pattern)
        : env_(env), pattern_(pattern) {}

    Polynomial run(const NodeP& root) {
        std::vector<FlatTerm> flat = flatten(root);
        Polynomial out;
        for (auto& term : flat) out += elaborate_term(term);
        return out;
    }

    std::set<std::string> collect_free(const NodeP& root) {
        std::set<std::string> names;
        for (auto& term : flatten(root)) {
            std::map<std::string, int> counts;
            std::map<std::string, bool> on_eta;
            count_indices(term, counts, on_eta);
            for (auto& [n, c] : counts)
                if (c == 1) names.insert(n);
        }
        return names;
    }

private:
    std::vector<FlatTerm> flatten(const NodeP& n) {
        switch (n->k) {
            case Node::Num: {
                FlatTerm t;
                t.coeff = n->num;
                return {t};
            }
            case Node::Add: {
                auto a = flatten(n->a);
                auto b = flatten(n->b);
                a.insert(a.end(), b.begin(), b.end());
                return a;
            }
            case Node::Neg: {
                auto a = flatten(n->a);
                for (auto& t : a) t.coeff = -t.coeff;
                return a;
            }
            case Node::Mul: {
                auto a = flatten(n->a);
                auto b = flatten(n->b);
                std::vector<FlatTerm> out;
                for (auto& x : a)
                    for (auto& y : b) {
                        FlatTerm t;
                        t.coeff = x.coeff * y.coeff;
                        t.atoms = x.atoms;
                        t.atoms.insert(t.atoms.end(), y.atoms.begin(), y.atoms.end());
                        out.push_back(std::move(t));
                    }
                return out;
            }
            case Node::Div: {
                auto b = flatten(n->b);
                Scalar denom(0);
                for (auto& t : b) {
                    if (!t.atoms.empty())
                        throw IndexRangeMismatch("division by a non-constant expression");
                    denom += t.coeff;
                }
                if (denom.is_zero()) throw IndexRangeMismatch("division by zero");
                auto a = flatten(n->a);
                for (auto& t : a) t.coeff = t.coeff / denom;
                return a;
            }
            case Node::Pow: {
                // indices contracted inside the base are renamed fresh per
                // copy; indices appearing once pair across the copies
                std::map<std::string, int> occ;
                count_node_indices(n->a, occ);
                std::vector<FlatTerm> acc{FlatTerm{}};
                for (int k = 0; k < n->power; ++k) {
                    NodeP copy = clone_node(n->a);
                    std::map<std::string, IndexExpr> binding;
                    for (auto& [name, cnt] : occ) {
                        if (cnt < 2 || pattern_.count(name)) continue;
                        std::string fresh = name + "#p" + std::to_string(fresh_counter_++);
                        auto rit = env_.index_ranges.find(name);
                        if (rit != env_.index_ranges.end()) {
                            env_.index_ranges[fresh] = rit->second;
                            if (env_.spacetime_indices.count(name))
                                env_.spacetime_indices.insert(fresh);
                        }
                        IndexExpr r;
                        r.is_name = true;
                        r.name = fresh;
                        binding[name] = r;
                    }
                    if (!binding.empty()) rename_bound(copy, binding);
                    auto base = flatten(copy);
                    std::vector<FlatTerm> out;
                    for (auto& x : acc)
                        for (auto& y : base) {
                            FlatTerm t;
                            t.coeff = x.coeff * y.coeff;
                            t.atoms = x.atoms;
                            t.atoms.insert(t.atoms.end(), y.atoms.begin(), y.atoms.end());
                            out.push_back(std::move(t));
                        }
                    acc = std::move(out);
                }
                return acc;
            }
            case Node::Deriv: {
                auto inner = flatten(n->a);
                std::vector<FlatTerm> out;
                for (auto& t : inner) {
                    FlatTerm wrap;
                    Atom d;
                    d.k = Atom::Deriv;
                    d.inner = std::make_shared<Atom::FlatTermBox>();
                    d.inner->terms.push_back(t);
                    d.dirs = n->idx;
                    wrap.atoms.push_back(std::move(d));
                    out.push_back(std::move(wrap));
                }
                return out;
            }
            case Node::Sym: {
                // parameters, tensors, macros or registry symbols
                if (!n->af && n->idx.empty()) {
                    auto pit = env_.params.find(n->name);
                    if (pit != env_.params.end()) {
                        FlatTerm t;
                        t.coeff = pit->second;
                        return {t};
                    }
                }
                if (!n->af) {
                    auto mit = env_.macros.find(n->name);
                    if (mit != env_.macros.end()) return expand_macro(*mit, n->idx);
                }
                FlatTerm t;
                Atom a;
                a.k = (!n->af && env_.tensors.count(n->name)) ? Atom::Tensor : Atom::Var;
                a.name = n->name;
                a.af = n->af;
                a.idx = n->idx;
                t.atoms.push_back(std::move(a));
                return {t};
            }
        }
        throw std::logic_error("flatten: unreachable");
    }

    std::vector<FlatTerm> expand_macro(
        const std::pair<const std::string, ParseEnv::Macro>& mac,
        const std::vector<IndexExpr>& call_idx) {
        const auto& [name, body] = mac;
        if (call_idx.size() != body.slots.size())
            throw IndexRangeMismatch("macro " + name + " expects " +
                                     std::to_string(body.slots.size()) + " indices");
        Lexer lx(body.body);
        ExprParser p(lx, env_);
        NodeP ast = p.parse();
        if (lx.peek().kind != Token::End) lx.fail("trailing input in macro body");
        // bind slot names, rename internal names fresh
        std::map<std::string, IndexExpr> binding;
        for (std::size_t k = 0; k < body.slots.size(); ++k)
            binding[body.slots[k]] = call_idx[k];
        rename_indices(ast, binding);
        return flatten(ast);
    }

    static NodeP clone_node(const NodeP& n) {
        auto r = std::make_shared<Node>(*n);
        if (n->a) r->a = clone_node(n->a);
        if (n->b) r->b = clone_node(n->b);
        return r;
    }

    static void count_node_indices(const NodeP& n, std::map<std::string, int>& occ) {
        for (auto& ie : n->idx)
            if (ie.is_name) ++occ[ie.name];
        if (n->a) count_node_indices(n->a, occ);
        if (n->b) count_node_indices(n->b, occ);
    }

    /// Renames only the names present in the binding (no fresh generation).
    void rename_bound(const NodeP& n, const std::map<std::string, IndexExpr>& binding) {
        for (auto& ie : n->idx) {
            if (!ie.is_name) continue;
            auto it = binding.find(ie.name);
            if (it != binding.end()) ie = it->second;
        }
        if (n->a) rename_bound(n->a, binding);
        if (n->b) rename_bound(n->b, binding);
    }

    void rename_indices(const NodeP& n, std::map<std::string, IndexExpr>& binding) {
        auto fix = [&](std::vector<IndexExpr>& idx) {
            for (auto& ie : idx) {
                if (!ie.is_name) continue;
                auto it = binding.find(ie.name);
                if (it == binding.end()) {
                    // internal summation name: rename fresh to avoid capture
                    std::string fresh = ie.name + "#" + std::to_string(fresh_counter_++);
                    auto rit = env_.index_ranges.find(ie.name);
                    if (rit != env_.index_ranges.end()) {
                        env_.index_ranges[fresh] = rit->second;
                        if (env_.spacetime_indices.count(ie.name))
                            env_.spacetime_indices.insert(fresh);
                    }
                    IndexExpr r;
                    r.is_name = true;
                    r.name = fresh;
                    binding[ie.name] = r;
                    ie = r;
                } else {
                    ie = it->second;
                }
            }
        };
        fix(n->idx);
        if (n->a) rename_indices(n->a, binding);
        if (n->b) rename_indices(n->b, binding);
    }

    void count_indices(const FlatTerm& t, std::map<std::string, int>& counts,
                       std::map<std::string, bool>& on_eta) {
        for (auto& a : t.atoms) {
            if (a.k == Atom::Deriv) {
                for (auto& ie : a.dirs)
                    if (ie.is_name && !pattern_.count(ie.name)) {
                        ++counts[ie.name];
                        on_eta[ie.name] = on_eta[ie.name] || false;
                    }
                for (auto& it : a.inner->terms) count_indices(it, counts, on_eta);
            } else {
                for (auto& ie : a.idx)
                    if (ie.is_name && !pattern_.count(ie.name)) {
                        ++counts[ie.name];
                        if (a.k == Atom::Tensor && a.name == "eta") on_eta[ie.name] = true;
                        else on_eta[ie.name] = on_eta[ie.name] || false;
                    }
            }
        }
    }

    int resolve(const IndexExpr& ie, const std::map<std::string, int>& bind) {
        if (!ie.is_name) return ie.value;
        auto pit = pattern_.find(ie.name);
        if (pit != pattern_.end()) return pit->second;
        auto it = bind.find(ie.name);
        if (it == bind.end()) throw IndexRangeMismatch("unbound index " + ie.name);
        return it->second;
    }

    Polynomial elaborate_atoms(const FlatTerm& t, const std::map<std::string, int>& bind) {
        Polynomial r{t.coeff};
        for (auto& a : t.atoms) {
            if (a.k == Atom::Tensor) {
                std::vector<int> iv;
                for (auto& ie : a.idx) iv.push_back(resolve(ie, bind));
                auto& [arity, fn] = env_.tensors.at(a.name);
                if (static_cast<int>(iv.size()) != arity)
                    throw IndexRangeMismatch("tensor " + a.name + " expects " +
                                             std::to_string(arity) + " indices");
                Scalar v = fn(iv);
                if (v.is_zero()) return {};
                r = r * v;
            } else if (a.k == Atom::Var) {
                auto sid = env_.ctx->find_symbol(a.name);
                if (!sid) throw UnknownSymbol("unknown symbol " + a.name);
                std::vector<int> iv;
                for (auto& ie : a.idx) iv.push_back(resolve(ie, bind));
                const SymbolInfo& sym = env_.ctx->symbol(*sid);
                if (iv.size() != sym.index_ranges.size())
                    throw IndexRangeMismatch("symbol " + a.name + " expects " +
                                             std::to_string(sym.index_ranges.size()) +
                                             " indices");
                for (std::size_t k = 0; k < iv.size(); ++k)
                    if (iv[k] < 0 || iv[k] >= sym.index_ranges[k])
                        throw IndexRangeMismatch("index out of range for " + a.name);
                r = mul(r, Polynomial::variable(env_.ctx->var(*sid, a.af, iv, {})));
            } else {
                Polynomial inner;
                for (auto& it : a.inner->terms) inner += elaborate_atoms(it, bind);
                for (auto& ie : a.dirs) {
                    int mu = resolve(ie, bind);
                    if (mu < 0 || mu >= env_.ctx->dim)
                        throw IndexRangeMismatch("derivative direction out of range");
                    inner = total_derivative_unchecked(*env_.ctx, inner, mu);
                }
                r = mul(r, inner);
            }
            if (r.is_zero()) return r;
        }
        return r;
    }

    Polynomial elaborate_term(const FlatTerm& t) {
        std::map<std::string, int> counts;
        std::map<std::string, bool> on_eta;
        count_indices(t, counts, on_eta);
        std::vector<std::string> names;
        for (auto& [n, c] : counts) {
            if (c == 1)
                throw IndexRangeMismatch("free index '" + n + "' (appears once)");
            if (c > 2)
                throw IndexRangeMismatch("index '" + n + "' appears " + std::to_string(c) +
                                         " times");
            if (!env_.index_ranges.count(n))
                throw UnknownSymbol("undeclared index " + n);
            names.push_back(n);
        }
        Polynomial out;
        std::map<std::string, int> bind;
        std::function<void(std::size_t, Scalar)> rec = [&](std::size_t k, Scalar weight) {
            if (k == names.size()) {
                Polynomial p = elaborate_atoms(t, bind);
                out += p * weight;
                return;
            }
            const std::string& n = names[k];
            int range = env_.index_ranges.at(n);
            bool metric = env_.spacetime_indices.count(n) && !on_eta[n];
            for (int v = 0; v < range; ++v) {
                bind[n] = v;
                Scalar w = weight;
                if (metric) w *= Scalar(env_.ctx->metric[v]);
                rec(k + 1, w);
            }
            bind.erase(n);
        };
        rec(0, Scalar(1));
        return out;
    }

    ParseEnv& env_;
    std::map<std::string, int> pattern_;
    int fresh_counter_ = 0;
};

} // namespace

Polynomial parse_expression(const std::string& text, ParseEnv& env,
                            const std::map<std::string, int>& pattern) {
    Lexer lx(text);
    ExprParser p(lx, env);
    NodeP ast = p.parse();
    if (lx.peek().kind != Token::End) lx.fail("trailing input");
    Elaborator el(env, pattern);
    return el.run(ast);
}

std::set<std::string> free_indices(const std::string& text, ParseEnv& env) {
    Lexer lx(text);
    ExprParser p(lx, env);
    NodeP ast = p.parse();
    Elaborator el(env, {});
    return el.collect_free(ast);
}

} // namespace bvlab
