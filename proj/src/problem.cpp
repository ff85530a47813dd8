#include "tvckit/problem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tvckit/lexer.hpp"

namespace tvckit {

PerturbationSpec PerturbationSpec::step(int t0, std::vector<double> level) {
    return {StepPerturbation{t0, std::move(level)}};
}

PerturbationSpec PerturbationSpec::expression(std::vector<Expr> components) {
    return {ExprPerturbation{std::move(components)}};
}

PerturbationSpec PerturbationSpec::scaled(double alpha) { return {ScaledPerturbation{alpha}}; }

PerturbationSpec PerturbationSpec::zero() {
    return expression({Expr::constant(0.0)});
}

std::optional<double> ProblemSpec::param(std::string_view name) const {
    for (std::size_t k = 0; k < param_names.size(); ++k) {
        if (param_names[k] == name) return param_values[k];
    }
    return std::nullopt;
}

void ProblemSpec::set_param(std::string_view name, double value) {
    for (std::size_t k = 0; k < param_names.size(); ++k) {
        if (param_names[k] == name) {
            param_values[k] = value;
            return;
        }
    }
    throw Error(ErrorKind::Semantic, "unknown parameter '" + std::string(name) + "'");
}

const PerturbationSpec& ProblemSpec::perturbation(std::string_view name) const {
    for (const auto& p : perturbations) {
        if (p.name == name) return p.spec;
    }
    throw Error(ErrorKind::Semantic, "no perturbation named '" + std::string(name) + "'");
}

std::optional<double> ProblemSpec::pinned(int time, int component) const {
    for (const auto& p : pins) {
        if (p.time == time && p.component == component) return p.value;
    }
    return std::nullopt;
}

bool ProblemSpec::pins_complete() const {
    for (int t = 0; t + 1 < order; ++t) {
        for (int i = 0; i < dim(); ++i) {
            if (!pinned(t, i)) return false;
        }
    }
    return true;
}

std::string format_real(double value) {
    char buf[64];
    const double mag = std::fabs(value);
    const auto fmt = (mag == 0.0 || (mag >= 1e-5 && mag < 1e15)) ? std::chars_format::fixed
                                                                 : std::chars_format::general;
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, fmt);
    if (ec != std::errc()) return std::to_string(value);
    return std::string(buf, ptr);
}

namespace {

bool reserved(std::string_view name) { return name == "t" || name == "ln" || name == "exp"; }

int index_of(const std::vector<std::string>& names, std::string_view name) {
    const auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

/// Recursive-descent parser over one line's worth of tokens.
class Parser {
public:
    Parser(std::span<const Token> tokens, SourcePos end_pos)
        : tokens_(tokens), end_pos_(end_pos) {}

    bool at_end() const { return i_ >= tokens_.size(); }
    std::size_t offset() const { return i_; }

    const Token* peek(std::size_t ahead = 0) const {
        return i_ + ahead < tokens_.size() ? &tokens_[i_ + ahead] : nullptr;
    }

    bool check(TokenKind kind) const { return !at_end() && tokens_[i_].kind == kind; }

    bool check_ident(std::string_view text) const {
        return check(TokenKind::Ident) && tokens_[i_].text == text;
    }

    SourcePos here() const { return at_end() ? end_pos_ : tokens_[i_].pos; }

    const Token& advance() { return tokens_[i_++]; }

    bool accept(TokenKind kind) {
        if (!check(kind)) return false;
        ++i_;
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        std::string found = at_end() ? "end of line" : "'" + tokens_[i_].text + "'";
        throw Error(ErrorKind::Syntax, "expected " + what + ", found " + found, here());
    }

    const Token& expect(TokenKind kind, const char* what = nullptr) {
        if (!check(kind)) fail(what ? what : to_string(kind));
        return advance();
    }

    const Token& expect_ident(std::string_view text) {
        if (!check_ident(text)) fail("'" + std::string(text) + "'");
        return advance();
    }

    void expect_end() {
        if (!at_end()) fail("end of line");
    }

    void close_paren(const Token& open) {
        if (check(TokenKind::RParen)) {
            advance();
            return;
        }
        if (at_end()) {
            throw Error(ErrorKind::Syntax, "unbalanced parenthesis: '(' is never closed",
                        open.pos);
        }
        fail("')'");
    }

    /// Signed real literal, as used in parameter and init values.
    double signed_real(const char* what) {
        bool negative = false;
        if (accept(TokenKind::Minus)) {
            negative = true;
        } else {
            accept(TokenKind::Plus);
        }
        if (!check(TokenKind::Integer) && !check(TokenKind::Real)) fail(what);
        const double v = advance().number;
        return negative ? -v : v;
    }

    int integer(const char* what) {
        if (!check(TokenKind::Integer)) fail(what);
        const Token& tok = advance();
        if (tok.number > 1e9) {
            throw Error(ErrorKind::Semantic, "integer '" + tok.text + "' is too large", tok.pos);
        }
        return static_cast<int>(tok.number);
    }

    Expr expression(const ExprScope& scope) {
        scope_ = &scope;
        return expr();
    }

private:
    Expr expr() {
        Expr lhs = term();
        while (check(TokenKind::Plus) || check(TokenKind::Minus)) {
            const Token& op = advance();
            Expr rhs = term();
            lhs = Expr::binary(op.kind == TokenKind::Plus ? NodeKind::Add : NodeKind::Sub,
                               std::move(lhs), std::move(rhs), op.pos);
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = unary();
        while (check(TokenKind::Star) || check(TokenKind::Slash)) {
            const Token& op = advance();
            Expr rhs = unary();
            lhs = Expr::binary(op.kind == TokenKind::Star ? NodeKind::Mul : NodeKind::Div,
                               std::move(lhs), std::move(rhs), op.pos);
        }
        return lhs;
    }

    Expr unary() {
        if (check(TokenKind::Minus)) {
            const Token& op = advance();
            return Expr::unary(NodeKind::Neg, unary(), op.pos);
        }
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (check(TokenKind::Caret)) {
            const Token& op = advance();
            // right associative: a^b^c is a^(b^c)
            return Expr::binary(NodeKind::Pow, std::move(base), unary(), op.pos);
        }
        return base;
    }

    Expr atom() {
        if (check(TokenKind::Integer) || check(TokenKind::Real)) {
            const Token& tok = advance();
            return Expr::constant(tok.number, tok.pos);
        }
        if (check(TokenKind::LParen)) {
            const Token& open = advance();
            Expr inner = expr();
            close_paren(open);
            return inner;
        }
        if (check(TokenKind::Ident)) return identifier();
        fail("an expression");
    }

    Expr identifier() {
        const Token& id = advance();
        const bool call = check(TokenKind::LParen);
        if (id.text == "ln" || id.text == "exp") {
            if (!call) fail("'(' after " + id.text);
            const Token& open = advance();
            Expr arg = expr();
            close_paren(open);
            return Expr::unary(id.text == "ln" ? NodeKind::Ln : NodeKind::Exp, std::move(arg),
                               id.pos);
        }
        if (id.text == "t") {
            if (call) {
                throw Error(ErrorKind::Semantic, "'t' is the time symbol, not a variable",
                            id.pos);
            }
            return Expr::time(id.pos);
        }
        const int var = index_of(scope_->vars, id.text);
        if (call) {
            if (var < 0) {
                throw Error(ErrorKind::Semantic, "undeclared variable '" + id.text + "'",
                            id.pos);
            }
            if (!scope_->allow_vars) {
                throw Error(ErrorKind::Semantic,
                            "variable '" + id.text + "' is not allowed in this expression",
                            id.pos);
            }
            const Token& open = advance();
            expect_ident("t");
            int lag = 0;
            if (check(TokenKind::Plus)) {
                advance();
                lag = integer("integer lag offset");
            } else if (check(TokenKind::Minus)) {
                throw Error(ErrorKind::Semantic, "negative lag offsets are not allowed",
                            here());
            }
            close_paren(open);
            return Expr::var(id.text, var, lag, id.pos);
        }
        if (var >= 0) {
            throw Error(ErrorKind::Semantic,
                        "variable '" + id.text + "' needs a time argument such as " + id.text +
                            "(t)",
                        id.pos);
        }
        const int param = index_of(scope_->params, id.text);
        if (param < 0) {
            throw Error(ErrorKind::Semantic, "undeclared parameter '" + id.text + "'", id.pos);
        }
        return Expr::param(id.text, param, id.pos);
    }

    std::span<const Token> tokens_;
    SourcePos end_pos_;
    std::size_t i_ = 0;
    const ExprScope* scope_ = nullptr;
};

SourcePos end_of(std::span<const Token> line, SourcePos fallback) {
    if (line.empty()) return fallback;
    SourcePos p = line.back().pos;
    p.column += static_cast<int>(line.back().text.size());
    return p;
}

struct Line {
    std::span<const Token> tokens;
    SourcePos end;
};

std::vector<Line> split_lines(const std::vector<Token>& tokens) {
    std::vector<Line> lines;
    std::size_t begin = 0;
    for (std::size_t k = 0; k <= tokens.size(); ++k) {
        if (k == tokens.size() || tokens[k].kind == TokenKind::Newline) {
            if (k > begin) {
                std::span<const Token> span(tokens.data() + begin, k - begin);
                SourcePos fallback = k < tokens.size() ? tokens[k].pos : SourcePos{};
                lines.push_back({span, end_of(span, fallback)});
            }
            begin = k + 1;
        }
    }
    return lines;
}

void check_name(const Token& tok, const char* what) {
    if (reserved(tok.text)) {
        throw Error(ErrorKind::Semantic,
                    std::string(what) + " name '" + tok.text + "' is reserved", tok.pos);
    }
}

PerturbationSpec parse_perturbation(Parser& p, const ExprScope& scope) {
    if (!p.check(TokenKind::Ident)) p.fail("step, expr or scaled");
    const Token& kind = p.advance();
    const Token& open = p.expect(TokenKind::LParen);
    PerturbationSpec out;
    if (kind.text == "step") {
        p.expect_ident("t0");
        p.expect(TokenKind::Equals);
        const SourcePos t0_pos = p.here();
        const int t0 = p.integer("integer activation time");
        if (t0 < 1) throw Error(ErrorKind::Semantic, "step activation time must be >= 1", t0_pos);
        p.expect(TokenKind::Comma);
        p.expect_ident("level");
        p.expect(TokenKind::Equals);
        std::vector<double> level;
        if (p.accept(TokenKind::LBracket)) {
            level.push_back(p.signed_real("level value"));
            while (p.accept(TokenKind::Comma)) level.push_back(p.signed_real("level value"));
            p.expect(TokenKind::RBracket);
        } else {
            level.push_back(p.signed_real("level value"));
        }
        out = PerturbationSpec::step(t0, std::move(level));
    } else if (kind.text == "expr") {
        std::vector<Expr> comps;
        comps.push_back(p.expression(scope));
        while (p.accept(TokenKind::Comma)) comps.push_back(p.expression(scope));
        out = PerturbationSpec::expression(std::move(comps));
    } else if (kind.text == "scaled") {
        p.expect_ident("alpha");
        p.expect(TokenKind::Equals);
        const SourcePos a_pos = p.here();
        const double alpha = p.signed_real("scale factor");
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw Error(ErrorKind::Semantic, "scaled perturbation needs 0 < alpha < 1", a_pos);
        }
        out = PerturbationSpec::scaled(alpha);
    } else {
        throw Error(ErrorKind::Syntax,
                    "unknown perturbation kind '" + kind.text + "' (expected step, expr or scaled)",
                    kind.pos);
    }
    p.close_paren(open);
    return out;
}

}  // namespace

Expr parse_expression(std::string_view source, const ExprScope& scope) {
    const auto tokens = tokenize(source);
    for (const auto& tok : tokens) {
        if (tok.kind == TokenKind::Newline) {
            throw Error(ErrorKind::Syntax, "expression must fit on one line", tok.pos);
        }
    }
    Parser p(tokens, end_of(tokens, SourcePos{}));
    Expr e = p.expression(scope);
    p.expect_end();
    return e;
}

ProblemSpec parse_problem(std::string_view source) {
    const auto tokens = tokenize(source);
    const auto lines = split_lines(tokens);

    std::optional<std::pair<int, SourcePos>> declared_order;
    const Line* vars_line = nullptr;
    const Line* utility_line = nullptr;
    std::vector<const Line*> params_lines;
    std::vector<const Line*> init_lines;
    std::vector<const Line*> perturb_lines;

    for (const auto& line : lines) {
        const Token& head = line.tokens.front();
        if (head.kind != TokenKind::Ident) {
            throw Error(ErrorKind::Syntax, "expected a declaration keyword", head.pos);
        }
        auto once = [&](const Line*& slot) {
            if (slot) {
                throw Error(ErrorKind::Semantic, "duplicate '" + head.text + "' declaration",
                            head.pos);
            }
            slot = &line;
        };
        if (head.text == "order") {
            if (declared_order) {
                throw Error(ErrorKind::Semantic, "duplicate 'order' declaration", head.pos);
            }
            Parser p(line.tokens, line.end);
            p.advance();
            p.expect_ident("N");
            p.expect(TokenKind::Equals);
            const SourcePos pos = p.here();
            const int n = p.integer("integer order");
            p.expect_end();
            if (n < 1) throw Error(ErrorKind::Semantic, "order must be >= 1", pos);
            declared_order = {n, pos};
        } else if (head.text == "vars") {
            once(vars_line);
        } else if (head.text == "params") {
            params_lines.push_back(&line);
        } else if (head.text == "utility") {
            once(utility_line);
        } else if (head.text == "init") {
            init_lines.push_back(&line);
        } else if (head.text == "perturb") {
            perturb_lines.push_back(&line);
        } else {
            throw Error(ErrorKind::Syntax, "unknown declaration '" + head.text + "'", head.pos);
        }
    }

    ProblemSpec spec;
    if (vars_line) {
        Parser p(vars_line->tokens, vars_line->end);
        p.advance();
        spec.vars.clear();
        do {
            const Token& name = p.expect(TokenKind::Ident, "variable name");
            check_name(name, "variable");
            if (index_of(spec.vars, name.text) >= 0) {
                throw Error(ErrorKind::Semantic, "duplicate variable '" + name.text + "'",
                            name.pos);
            }
            spec.vars.push_back(name.text);
        } while (p.accept(TokenKind::Comma));
        p.expect_end();
    }

    for (const Line* line : params_lines) {
        Parser p(line->tokens, line->end);
        p.advance();
        while (!p.at_end()) {
            const Token& name = p.expect(TokenKind::Ident, "parameter name");
            check_name(name, "parameter");
            if (index_of(spec.param_names, name.text) >= 0) {
                throw Error(ErrorKind::Semantic, "duplicate parameter '" + name.text + "'",
                            name.pos);
            }
            if (index_of(spec.vars, name.text) >= 0) {
                throw Error(ErrorKind::Semantic,
                            "parameter '" + name.text + "' shadows a variable", name.pos);
            }
            p.expect(TokenKind::Equals);
            spec.param_names.push_back(name.text);
            spec.param_values.push_back(p.signed_real("parameter value"));
            p.accept(TokenKind::Comma);
        }
    }

    if (!utility_line) {
        throw Error(ErrorKind::Semantic, "missing 'utility U = <expr>' declaration",
                    lines.empty() ? SourcePos{} : lines.front().tokens.front().pos);
    }
    const ExprScope scope{spec.vars, spec.param_names, true};
    {
        Parser p(utility_line->tokens, utility_line->end);
        p.advance();
        p.expect(TokenKind::Ident, "utility name");
        p.expect(TokenKind::Equals);
        spec.utility = p.expression(scope);
        p.expect_end();
    }

    spec.order = 1 + std::max(spec.utility.max_lag(), 0);
    if (declared_order && declared_order->first != spec.order) {
        throw Error(ErrorKind::Semantic,
                    "declared order N = " + std::to_string(declared_order->first) +
                        " but the utility implies N = " + std::to_string(spec.order) +
                        " (1 + largest lag offset)",
                    declared_order->second);
    }

    for (const Line* line : init_lines) {
        Parser p(line->tokens, line->end);
        p.advance();
        if (p.at_end()) p.fail("an initial value");
        while (!p.at_end()) {
            const Token& name = p.expect(TokenKind::Ident, "variable name");
            const int comp = index_of(spec.vars, name.text);
            if (comp < 0) {
                throw Error(ErrorKind::Semantic, "undeclared variable '" + name.text + "'",
                            name.pos);
            }
            const Token& open = p.expect(TokenKind::LParen);
            const SourcePos time_pos = p.here();
            const int time = p.integer("integer time index");
            p.close_paren(open);
            p.expect(TokenKind::Equals);
            const double value = p.signed_real("initial value");
            if (time > spec.order - 2) {
                throw Error(ErrorKind::Semantic,
                            "pinned time " + std::to_string(time) + " must lie in 0..N-2 = 0.." +
                                std::to_string(spec.order - 2),
                            time_pos);
            }
            if (spec.pinned(time, comp)) {
                throw Error(ErrorKind::Semantic,
                            "duplicate initial value for " + name.text + "(" +
                                std::to_string(time) + ")",
                            name.pos);
            }
            spec.pins.push_back({time, comp, value});
            p.accept(TokenKind::Comma);
        }
    }

    const ExprScope q_scope{spec.vars, spec.param_names, false};
    for (const Line* line : perturb_lines) {
        Parser p(line->tokens, line->end);
        p.advance();
        const Token& name = p.expect(TokenKind::Ident, "perturbation name");
        for (const auto& existing : spec.perturbations) {
            if (existing.name == name.text) {
                throw Error(ErrorKind::Semantic, "duplicate perturbation '" + name.text + "'",
                            name.pos);
            }
        }
        p.expect(TokenKind::Equals);
        PerturbationSpec q = parse_perturbation(p, q_scope);
        p.expect_end();
        const auto count_ok = [&](std::size_t count) {
            return count == 1 || count == spec.vars.size();
        };
        if (const auto* step = std::get_if<StepPerturbation>(&q.kind);
            step && !count_ok(step->level.size())) {
            throw Error(ErrorKind::Semantic, "step level needs 1 or n values", name.pos);
        }
        if (const auto* ex = std::get_if<ExprPerturbation>(&q.kind);
            ex && !count_ok(ex->components.size())) {
            throw Error(ErrorKind::Semantic, "expr perturbation needs 1 or n components",
                        name.pos);
        }
        spec.perturbations.push_back({name.text, std::move(q)});
    }

    validate(spec);
    return spec;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open problem file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

void validate(const ProblemSpec& spec) {
    const auto fail = [](const std::string& msg) { throw Error(ErrorKind::Semantic, msg); };
    if (spec.vars.empty()) fail("at least one variable is required");
    if (spec.param_names.size() != spec.param_values.size()) fail("parameter table is ragged");
    for (std::size_t a = 0; a < spec.vars.size(); ++a) {
        if (reserved(spec.vars[a])) fail("variable name '" + spec.vars[a] + "' is reserved");
        for (std::size_t b = a + 1; b < spec.vars.size(); ++b) {
            if (spec.vars[a] == spec.vars[b]) fail("duplicate variable '" + spec.vars[a] + "'");
        }
    }
    for (std::size_t a = 0; a < spec.param_names.size(); ++a) {
        if (reserved(spec.param_names[a])) {
            fail("parameter name '" + spec.param_names[a] + "' is reserved");
        }
        for (std::size_t b = a + 1; b < spec.param_names.size(); ++b) {
            if (spec.param_names[a] == spec.param_names[b]) {
                fail("duplicate parameter '" + spec.param_names[a] + "'");
            }
        }
    }
    if (spec.utility.empty()) fail("utility is missing");
    if (spec.order != 1 + std::max(spec.utility.max_lag(), 0)) {
        fail("order N = " + std::to_string(spec.order) +
             " does not equal 1 + the largest lag offset in the utility");
    }
    if (spec.utility.max_component() >= spec.dim()) {
        fail("utility references an undeclared component");
    }
    for (const auto& pin : spec.pins) {
        if (pin.time < 0 || pin.time > spec.order - 2) {
            fail("pinned time " + std::to_string(pin.time) + " outside 0..N-2");
        }
        if (pin.component < 0 || pin.component >= spec.dim()) {
            fail("pinned value for an undeclared component");
        }
    }
    for (std::size_t a = 0; a < spec.perturbations.size(); ++a) {
        for (std::size_t b = a + 1; b < spec.perturbations.size(); ++b) {
            if (spec.perturbations[a].name == spec.perturbations[b].name) {
                fail("duplicate perturbation '" + spec.perturbations[a].name + "'");
            }
        }
        const auto& q = spec.perturbations[a].spec;
        if (const auto* ex = std::get_if<ExprPerturbation>(&q.kind)) {
            for (const auto& e : ex->components) {
                if (e.has_vars()) fail("perturbation expressions may depend only on t");
            }
        }
        if (const auto* sc = std::get_if<ScaledPerturbation>(&q.kind)) {
            if (!(sc->alpha > 0.0 && sc->alpha < 1.0)) fail("scaled perturbation needs 0 < alpha < 1");
        }
        if (const auto* st = std::get_if<StepPerturbation>(&q.kind); st && st->t0 < 1) {
            fail("step activation time must be >= 1");
        }
    }
}

namespace {

int precedence(NodeKind kind) {
    switch (kind) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Neg: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;
    }
}

void print_node(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
    if (wrap) out += '(';
    print_node(e, out);
    if (wrap) out += ')';
}

void print_node(const Expr& e, std::string& out) {
    const Node& n = e.node();
    const int prec = precedence(n.kind);
    switch (n.kind) {
        case NodeKind::Constant: out += format_real(n.value); return;
        case NodeKind::Param: out += n.name; return;
        case NodeKind::Time: out += 't'; return;
        case NodeKind::Var:
            out += n.name;
            out += n.lag == 0 ? "(t)" : "(t+" + std::to_string(n.lag) + ")";
            return;
        case NodeKind::Neg:
            out += '-';
            print_wrapped(n.lhs, precedence(n.lhs.node().kind) <= prec, out);
            return;
        case NodeKind::Ln:
        case NodeKind::Exp:
            out += n.kind == NodeKind::Ln ? "ln(" : "exp(";
            print_node(n.lhs, out);
            out += ')';
            return;
        case NodeKind::Pow:
            print_wrapped(n.lhs, precedence(n.lhs.node().kind) <= prec, out);
            out += '^';
            print_wrapped(n.rhs, precedence(n.rhs.node().kind) < precedence(NodeKind::Neg), out);
            return;
        default: break;
    }
    print_wrapped(n.lhs, precedence(n.lhs.node().kind) < prec, out);
    switch (n.kind) {
        case NodeKind::Add: out += " + "; break;
        case NodeKind::Sub: out += " - "; break;
        case NodeKind::Mul: out += '*'; break;
        default: out += '/'; break;
    }
    print_wrapped(n.rhs, precedence(n.rhs.node().kind) <= prec, out);
}

}  // namespace

std::string print_expr(const Expr& expr) {
    std::string out;
    print_node(expr, out);
    return out;
}

std::string print_canonical(const ProblemSpec& spec) {
    std::string out;
    out += "order N = " + std::to_string(spec.order) + "\n";
    out += "vars ";
    for (std::size_t k = 0; k < spec.vars.size(); ++k) {
        if (k) out += ", ";
        out += spec.vars[k];
    }
    out += '\n';
    if (!spec.param_names.empty()) {
        out += "params";
        for (std::size_t k = 0; k < spec.param_names.size(); ++k) {
            out += ' ' + spec.param_names[k] + '=' + format_real(spec.param_values[k]);
        }
        out += '\n';
    }
    out += "utility U = " + print_expr(spec.utility) + "\n";
    if (!spec.pins.empty()) {
        out += "init";
        for (const auto& pin : spec.pins) {
            out += ' ' + spec.vars[static_cast<std::size_t>(pin.component)] + '(' +
                   std::to_string(pin.time) + ")=" + format_real(pin.value);
        }
        out += '\n';
    }
    for (const auto& named : spec.perturbations) {
        out += "perturb " + named.name + " = ";
        std::visit(
            [&](const auto& q) {
                using Q = std::decay_t<decltype(q)>;
                if constexpr (std::is_same_v<Q, StepPerturbation>) {
                    out += "step(t0=" + std::to_string(q.t0) + ", level=";
                    if (q.level.size() == 1) {
                        out += format_real(q.level.front());
                    } else {
                        out += '[';
                        for (std::size_t k = 0; k < q.level.size(); ++k) {
                            if (k) out += ", ";
                            out += format_real(q.level[k]);
                        }
                        out += ']';
                    }
                    out += ')';
                } else if constexpr (std::is_same_v<Q, ExprPerturbation>) {
                    out += "expr(";
                    for (std::size_t k = 0; k < q.components.size(); ++k) {
                        if (k) out += ", ";
                        out += print_expr(q.components[k]);
                    }
                    out += ')';
                } else {
                    out += "scaled(alpha=" + format_real(q.alpha) + ")";
                }
            },
            named.spec.kind);
        out += '\n';
    }
    return out;
}

}  // namespace tvckit
