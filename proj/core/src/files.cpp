#include "bvlab/files.hpp"

#include <fstream>
#include <sstream>

namespace bvlab {

namespace {

std::vector<std::string> split_statements(const std::string& text) {
    std::string clean;
    bool comment = false;
    for (char c : text) {
        if (c == '#') comment = true;
        if (c == '\n') comment = false;
        if (!comment) clean += c;
    }
    std::vector<std::string> stmts;
    std::string cur;
    for (char c : clean) {
        if (c == ';') {
            stmts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    for (char c : cur)
        if (!std::isspace(static_cast<unsigned char>(c)))
            throw SyntaxError("missing ';' after final statement", 0, 0);
    return stmts;
}

bool blank(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

std::string head_keyword(Lexer& lx) {
    const Token& t = lx.peek();
    if (t.kind != Token::Ident) lx.fail("expected statement keyword");
    return lx.next().text;
}

struct DeclHead {
    std::string name;
    std::vector<std::string> index_names;
};

DeclHead parse_decl_head(Lexer& lx) {
    DeclHead h;
    const Token& t = lx.peek();
    if (t.kind != Token::Ident) lx.fail("expected name");
    h.name = lx.next().text;
    if (lx.accept("[")) {
        do {
            const Token& n = lx.peek();
            if (n.kind != Token::Ident) lx.fail("expected index name");
            h.index_names.push_back(lx.next().text);
        } while (lx.accept(","));
        lx.expect("]");
    }
    return h;
}

struct Options {
    int parity = -1; // -1 unset
    int ghost = 0;
    bool ghost_set = false;
    bool spacetime = true;
};

Options parse_options(Lexer& lx) {
    Options o;
    if (!lx.accept(":")) return o;
    do {
        const Token& t = lx.peek();
        if (t.kind != Token::Ident) lx.fail("expected option");
        std::string key = lx.next().text;
        if (key == "boson") o.parity = 0;
        else if (key == "fermion") o.parity = 1;
        else if (key == "constant") o.spacetime = false;
        else if (key == "ghost") {
            lx.expect("=");
            bool neg = lx.accept("-");
            const Token& v = lx.peek();
            if (v.kind != Token::Int) lx.fail("expected ghost number");
            lx.next();
            o.ghost = static_cast<int>(neg ? -v.value : v.value);
            o.ghost_set = true;
        } else {
            lx.fail("unknown option " + key);
        }
    } while (lx.accept(","));
    return o;
}

Rat parse_rat(Lexer& lx) {
    bool neg = lx.accept("-");
    const Token& t = lx.peek();
    if (t.kind != Token::Int) lx.fail("expected rational");
    long num = lx.next().value;
    long den = 1;
    if (lx.accept("/")) {
        const Token& d = lx.peek();
        if (d.kind != Token::Int) lx.fail("expected denominator");
        den = lx.next().value;
    }
    Rat r(num, den);
    r.canonicalize();
    return neg ? Rat(-r) : r;
}

RatMat parse_matrix(Lexer& lx) {
    RatMat m;
    lx.expect("[");
    do {
        lx.expect("[");
        std::vector<Rat> row;
        do {
            row.push_back(parse_rat(lx));
        } while (lx.accept(","));
        lx.expect("]");
        m.push_back(std::move(row));
    } while (lx.accept(","));
    lx.expect("]");
    return m;
}

std::vector<int> resolve_ranges(const ParseEnv& env, const std::vector<std::string>& names) {
    std::vector<int> ranges;
    for (auto& n : names) {
        auto it = env.index_ranges.find(n);
        if (it == env.index_ranges.end()) throw UnknownSymbol("undeclared index " + n);
        ranges.push_back(it->second);
    }
    return ranges;
}

void declare_field(Context& ctx, ParseEnv& env, TheorySpec& spec, const std::string& stmt,
                   Role role, int def_parity, int def_ghost, bool spacetime_default) {
    Lexer lx(stmt);
    head_keyword(lx);
    DeclHead h = parse_decl_head(lx);
    Options o = parse_options(lx);
    SymbolInfo s;
    s.name = h.name;
    s.role = role;
    s.grading.parity = o.parity >= 0 ? o.parity : def_parity;
    s.grading.ghost = o.ghost_set ? o.ghost : def_ghost;
    s.index_ranges = resolve_ranges(env, h.index_names);
    s.spacetime = spacetime_default && o.spacetime;
    s.has_antifield = true;
    spec.fields.push_back(ctx.declare(s));
}

/// Enumerates all assignments of the pattern names of a component family.
void for_each_component(const ParseEnv& env, const std::vector<std::string>& names,
                        const std::function<void(const std::map<std::string, int>&)>& fn) {
    std::vector<int> ranges = resolve_ranges(env, names);
    std::map<std::string, int> bind;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == names.size()) {
            fn(bind);
            return;
        }
        for (int v = 0; v < ranges[k]; ++v) {
            bind.at(names[k]) = v;
            rec(k + 1);
        }
    };
    for (auto& n : names) bind[n] = 0;
    rec(0);
}

} // namespace

TheoryFile load_theory(Context& ctx, const std::string& text) {
    TheoryFile tf;
    tf.env.ctx = &ctx;
    tf.env.install_builtin_tensors();
    Polynomial action;
    bool have_action = false, have_s0 = false;
    std::optional<Polynomial> explicit_ext;
    struct Pending {
        std::string kind, head, body;
    };
    std::vector<Pending> pending; // transforms, K, gauge fermion, splits, observables

    for (const std::string& stmt : split_statements(text)) {
        if (blank(stmt)) continue;
        Lexer lx(stmt);
        std::string kw = lx.peek().text;
        if (kw == "theory") {
            head_keyword(lx);
            tf.name = lx.next().text;
        } else if (kw == "dim") {
            head_keyword(lx);
            const Token& t = lx.peek();
            if (t.kind != Token::Int) lx.fail("expected dimension");
            ctx.set_dim(static_cast<int>(lx.next().value));
        } else if (kw == "index") {
            head_keyword(lx);
            const Token& n = lx.peek();
            if (n.kind != Token::Ident) lx.fail("expected index name");
            std::string name = lx.next().text;
            lx.expect(":");
            if (lx.accept("dim")) {
                tf.env.index_ranges[name] = ctx.dim;
                tf.env.spacetime_indices.insert(name);
            } else {
                const Token& r = lx.peek();
                if (r.kind != Token::Int) lx.fail("expected range");
                tf.env.index_ranges[name] = static_cast<int>(lx.next().value);
            }
        } else if (kw == "constant" || kw == "coupling") {
            head_keyword(lx);
            const Token& n = lx.peek();
            if (n.kind != Token::Ident) lx.fail("expected name");
            SymbolInfo s;
            s.name = lx.next().text;
            s.role = Role::Coupling;
            s.spacetime = false;
            s.has_antifield = false;
            SymId id = ctx.declare(s);
            if (kw == "coupling") tf.spec.couplings.push_back(id);
        } else if (kw == "param") {
            std::size_t eq = stmt.find('=');
            if (eq == std::string::npos) lx.fail("param needs '='");
            Lexer hl(stmt.substr(0, eq));
            head_keyword(hl);
            std::string name = hl.next().text;
            Polynomial v = parse_expression(stmt.substr(eq + 1), tf.env);
            if (v.max_degree() != 0)
                throw IndexRangeMismatch("param " + name + " must be a constant");
            tf.env.params[name] = v.constant_term();
        } else if (kw == "structure") {
            std::size_t eq = stmt.find('=');
            if (eq == std::string::npos) lx.fail("structure needs '='");
            Lexer hl(stmt.substr(0, eq));
            head_keyword(hl);
            DeclHead h = parse_decl_head(hl);
            Lexer rl(stmt.substr(eq + 1));
            std::string which = rl.next().text;
            if (which != "epsilon")
                throw UnknownSymbol("unknown structure tensor " + which);
            if (h.index_names.size() != 3)
                throw IndexRangeMismatch("structure constants need three indices");
            std::vector<int> ranges = resolve_ranges(tf.env, h.index_names);
            if (ranges[0] != 3 || ranges[1] != 3 || ranges[2] != 3)
                throw IndexRangeMismatch("epsilon structure constants need range 3");
            tf.env.tensors[h.name] = tf.env.tensors.at("epsilon");
        } else if (kw == "define") {
            std::size_t eq = stmt.find('=');
            if (eq == std::string::npos) lx.fail("define needs '='");
            Lexer hl(stmt.substr(0, eq));
            head_keyword(hl);
            DeclHead h = parse_decl_head(hl);
            tf.env.macros[h.name] = {h.index_names, stmt.substr(eq + 1)};
        } else if (kw == "field") {
            declare_field(ctx, tf.env, tf.spec, stmt, Role::Field, 0, 0, true);
        } else if (kw == "ghost") {
            declare_field(ctx, tf.env, tf.spec, stmt, Role::Ghost, 1, 1, true);
        } else if (kw == "antighost") {
            declare_field(ctx, tf.env, tf.spec, stmt, Role::Antighost, 1, -1, true);
        } else if (kw == "aux") {
            declare_field(ctx, tf.env, tf.spec, stmt, Role::Auxiliary, 0, 0, true);
        } else if (kw == "constghost") {
            declare_field(ctx, tf.env, tf.spec, stmt, Role::ConstantGhost, 1, 1, false);
        } else if (kw == "pair") {
            head_keyword(lx);
            std::string ag = lx.next().text, aux = lx.next().text;
            auto agid = ctx.find_symbol(ag);
            auto auxid = ctx.find_symbol(aux);
            if (!agid || !auxid) throw UnknownSymbol("unknown pair symbols");
            tf.spec.trivial_pairs.emplace_back(*agid, *auxid);
        } else if (kw == "action" || kw == "extension" || kw == "gauge_fermion" ||
                   kw == "transform" || kw == "K" || kw == "observable" ||
                   kw == "split_pair" || kw == "split_closed") {
            // defer until all declarations are in place
            Pending p;
            p.kind = kw;
            p.body = stmt;
            pending.push_back(std::move(p));
        } else {
            lx.fail("unknown statement " + kw);
        }
    }

    for (auto& p : pending) {
        const std::string& stmt = p.body;
        if (p.kind == "action" || p.kind == "extension" || p.kind == "gauge_fermion" ||
            p.kind == "observable") {
            std::size_t eq = stmt.find('=');
            if (eq == std::string::npos)
                throw SyntaxError(p.kind + " needs '='", 0, 0);
            Lexer hl(stmt.substr(0, eq));
            head_keyword(hl);
            std::string name = hl.next().text;
            Polynomial v = parse_expression(stmt.substr(eq + 1), tf.env);
            if (p.kind == "action") {
                if (name == "S") {
                    action += v;
                    have_action = true;
                } else if (name == "S0") {
                    tf.spec.S0 += v;
                    have_s0 = true;
                } else if (name == "Sint") {
                    tf.spec.Sint += v;
                } else {
                    throw UnknownSymbol("action must be S, S0 or Sint");
                }
            } else if (p.kind == "extension") {
                explicit_ext = v;
            } else if (p.kind == "gauge_fermion") {
                tf.gauge_fermion = v;
            } else {
                tf.observables[name] = v;
            }
        } else if (p.kind == "transform" || p.kind == "K") {
            std::size_t eq = stmt.find('=');
            if (eq == std::string::npos) throw SyntaxError(p.kind + " needs '='", 0, 0);
            Lexer hl(stmt.substr(0, eq));
            head_keyword(hl);
            DeclHead h = parse_decl_head(hl);
            auto sid = ctx.find_symbol(h.name);
            if (!sid) throw UnknownSymbol("unknown symbol " + h.name);
            std::string rhs = stmt.substr(eq + 1);
            for_each_component(tf.env, h.index_names,
                               [&](const std::map<std::string, int>& bind) {
                                   Polynomial v = parse_expression(rhs, tf.env, bind);
                                   std::vector<int> iv;
                                   for (auto& n : h.index_names) iv.push_back(bind.at(n));
                                   FieldComponent fc{*sid, false, iv};
                                   if (p.kind == "transform") tf.spec.delta_c[fc] = v;
                                   else tf.spec.Kmap[fc] = v;
                               });
        } else if (p.kind == "split_pair") {
            std::size_t comma = std::string::npos;
            int depth = 0;
            for (std::size_t k = 0; k < stmt.size(); ++k) {
                char c = stmt[k];
                if (c == '(' || c == '[') ++depth;
                if (c == ')' || c == ']') --depth;
                if (c == ',' && depth == 0) { comma = k; break; }
            }
            if (comma == std::string::npos)
                throw SyntaxError("split_pair needs 'u , v'", 0, 0);
            std::string utext = stmt.substr(stmt.find("split_pair") + 10, comma -
                                            (stmt.find("split_pair") + 10));
            std::string vtext = stmt.substr(comma + 1);
            std::set<std::string> fu = free_indices(utext, tf.env);
            std::set<std::string> fv = free_indices(vtext, tf.env);
            fu.insert(fv.begin(), fv.end());
            std::vector<std::string> names(fu.begin(), fu.end());
            if (!tf.split) tf.split.emplace();
            for_each_component(tf.env, names, [&](const std::map<std::string, int>& bind) {
                Polynomial u = parse_expression(utext, tf.env, bind);
                Polynomial v = parse_expression(vtext, tf.env, bind);
                tf.split->pairs.emplace_back(std::move(u), std::move(v));
            });
        } else if (p.kind == "split_closed") {
            std::string wtext = stmt.substr(stmt.find("split_closed") + 12);
            std::set<std::string> fw = free_indices(wtext, tf.env);
            std::vector<std::string> names(fw.begin(), fw.end());
            if (!tf.split) tf.split.emplace();
            for_each_component(tf.env, names, [&](const std::map<std::string, int>& bind) {
                tf.split->closed.push_back(parse_expression(wtext, tf.env, bind));
            });
        }
    }

    if (have_action) {
        // split the declared action into free and interacting parts by the
        // polynomial degree in jet-carrying variables
        for (auto& [m, c] : action.terms()) {
            int deg = 0;
            for (auto& [v, e] : m.factors) {
                Role r = ctx.symbol(ctx.info(v).sym).role;
                if (r != Role::Coupling && r != Role::Parameter) deg += e;
            }
            if (deg <= 2) tf.spec.S0.add_term(m, c);
            else tf.spec.Sint.add_term(m, c);
        }
    }
    if (!have_action && !have_s0 && tf.spec.S0.is_zero() && tf.spec.Sint.is_zero())
        throw SyntaxError("theory file declares no action", 0, 0);

    if (explicit_ext) tf.spec.Sext = *explicit_ext;
    else if (!tf.spec.delta_c.empty()) tf.spec.Sext = minimal_extension(ctx, tf.spec);

    tf.spec.name = tf.name;

    // validate the structure-constant Jacobi identity when epsilon is used
    // (trivially true for the shipped Levi-Civita tensor, checked anyway)
    for (auto& [name, t] : tf.env.tensors) {
        if (name == "eta" || name == "epsilon") continue;
        auto& [arity, fn] = t;
        if (arity != 3) continue;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c)
                    for (int d = 0; d < 3; ++d) {
                        Scalar acc(0);
                        for (int s = 0; s < 3; ++s)
                            acc += fn({a, b, s}) * fn({c, d, s}) - fn({a, c, s}) * fn({b, d, s}) +
                                   fn({a, d, s}) * fn({b, c, s});
                        if (!acc.is_zero())
                            throw IndexRangeMismatch("structure constants violate Jacobi");
                    }
    }

    auto g0 = tf.spec.S0.grading(ctx);
    if (!tf.spec.S0.is_zero() && (!g0 || g0->parity != 0 || g0->ghost != 0))
        throw MixedGrading("S0 must be bosonic with ghost number 0");
    auto gi = tf.spec.Sint.grading(ctx);
    if (!tf.spec.Sint.is_zero() && (!gi || gi->parity != 0 || gi->ghost != 0))
        throw MixedGrading("Sint must be bosonic with ghost number 0");
    auto ge = tf.spec.Sext.grading(ctx);
    if (!tf.spec.Sext.is_zero() && (!ge || ge->parity != 0 || ge->ghost != 0))
        throw MixedGrading("Sext must be bosonic with ghost number 0");
    return tf;
}

ModeFile load_modes(Context& ctx, const std::string& text) {
    ModeFile mf;
    bool with_af = false;
    std::vector<std::string> names;
    std::vector<int> parities, ghosts, blocks;
    std::map<std::string, RatMat> matrices;
    for (const std::string& stmt : split_statements(text)) {
        if (blank(stmt)) continue;
        Lexer lx(stmt);
        std::string kw = lx.peek().text;
        if (kw == "modes") {
            head_keyword(lx);
            mf.name = lx.next().text;
        } else if (kw == "mode") {
            head_keyword(lx);
            const Token& n = lx.peek();
            if (n.kind != Token::Ident) lx.fail("expected mode name");
            names.push_back(lx.next().text);
            Options o = parse_options(lx);
            parities.push_back(o.parity >= 0 ? o.parity : 0);
            ghosts.push_back(o.ghost_set ? o.ghost : 0);
            blocks.push_back(0);
        } else if (kw == "sector") {
            head_keyword(lx);
            std::string nm = lx.next().text;
            const Token& v = lx.peek();
            if (v.kind != Token::Int) lx.fail("expected sector id");
            long id = lx.next().value;
            bool found = false;
            for (std::size_t k = 0; k < names.size(); ++k)
                if (names[k] == nm) { blocks[k] = static_cast<int>(id); found = true; }
            if (!found) throw UnknownSymbol("sector: unknown mode " + nm);
        } else if (kw == "antifields") {
            head_keyword(lx);
            std::string v = lx.next().text;
            with_af = (v == "yes");
        } else if (kw == "matrix") {
            head_keyword(lx);
            std::string nm = lx.next().text;
            lx.expect("=");
            matrices[nm] = parse_matrix(lx);
        } else {
            lx.fail("unknown statement " + kw);
        }
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
        SymbolInfo s;
        s.name = names[k];
        s.role = Role::Mode;
        s.grading = {parities[k], ghosts[k], 0};
        s.spacetime = false;
        s.has_antifield = with_af;
        SymId id = ctx.declare(s);
        mf.system.modes.push_back(ctx.var(id));
        if (with_af) mf.system.antifields.push_back(ctx.var(id, true));
    }
    mf.system.blocks = blocks;
    auto take = [&](const char* nm) -> std::optional<RatMat> {
        auto it = matrices.find(nm);
        if (it == matrices.end()) return std::nullopt;
        return it->second;
    };
    if (auto g = take("Gret")) mf.system.Gret = *g;
    else throw CompatibilityViolation("mode file must supply Gret");
    if (auto w = take("W")) mf.system.W = *w;
    else mf.system.W.assign(names.size(), std::vector<Rat>(names.size(), Rat(0)));
    if (auto d = take("Delta")) mf.system.Delta = *d;
    mf.system.P = take("P");
    mf.system.Q = take("Q");
    mf.system.finalize(ctx);
    return mf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace bvlab
