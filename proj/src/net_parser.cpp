#include "dnets/nets.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace dnets {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line), column_(column), message_(what)
{
}

std::string read_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

constexpr std::size_t kMaxDisjuncts = 4096;

struct Token {
    enum Kind { Ident, Op, Number, LParen, RParen, And, Or, Not, Colon, Comma, Semicolon, End };
    Kind kind = End;
    std::string text;
    std::size_t column = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }
bool op_char(char c) { return c == '=' || c == '!' || c == '<' || c == '>' || c == '~'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

// Columns are 1-based positions in the original line.
std::vector<Token> lex(std::string_view s, std::size_t line, std::size_t offset = 0)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        const std::size_t col = offset + i + 1;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j]))
                ++j;
            out.push_back({Token::Ident, std::string(s.substr(i, j - i)), col});
            i = j;
            continue;
        }
        if (digit(c)) {
            std::size_t j = i;
            while (j < s.size() && digit(s[j]))
                ++j;
            out.push_back({Token::Number, std::string(s.substr(i, j - i)), col});
            i = j;
            continue;
        }
        if (op_char(c)) {
            std::size_t j = i;
            while (j < s.size() && op_char(s[j]))
                ++j;
            while (j < s.size() && digit(s[j]))
                ++j;
            std::string text(s.substr(i, j - i));
            out.push_back({text == "!" ? Token::Not : Token::Op, text, col});
            i = j;
            continue;
        }
        Token::Kind kind;
        std::size_t len = 1;
        switch (c) {
        case '(': kind = Token::LParen; break;
        case ')': kind = Token::RParen; break;
        case '&': kind = Token::And; len = (i + 1 < s.size() && s[i + 1] == '&') ? 2 : 1; break;
        case '|': kind = Token::Or; len = (i + 1 < s.size() && s[i + 1] == '|') ? 2 : 1; break;
        case ':': kind = Token::Colon; break;
        case ',': kind = Token::Comma; break;
        case ';': kind = Token::Semicolon; break;
        default:
            throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        out.push_back({kind, std::string(s.substr(i, len)), col});
        i += len;
    }
    out.push_back({Token::End, "", offset + s.size() + 1});
    return out;
}

class TokenStream {
public:
    TokenStream(std::vector<Token> tokens, std::size_t line) : tokens_(std::move(tokens)), line_(line) {}

    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }
    bool at_end() const { return peek().kind == Token::End; }
    bool accept(Token::Kind k)
    {
        if (peek().kind != k)
            return false;
        next();
        return true;
    }
    const Token& expect(Token::Kind k, const char* what)
    {
        if (peek().kind != k)
            fail(std::string("expected ") + what, peek());
        return next();
    }
    [[noreturn]] void fail(const std::string& msg, const Token& at) const { throw ParseError(msg, line_, at.column); }
    std::size_t line() const { return line_; }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

// Relation symbol in guards: identity or a domain relation.
struct RelationRef {
    LiteralKind kind;
    std::size_t relation = 0;
    bool negated = false;
};

std::optional<RelationRef> resolve_relation(const DomainSpec& d, std::string_view name)
{
    if (name == "=")
        return RelationRef{LiteralKind::Identity, 0, false};
    if (name == "!=")
        return RelationRef{LiteralKind::Identity, 0, true};
    if (auto r = d.find_relation(name))
        return RelationRef{LiteralKind::Relation, *r, false};
    return std::nullopt;
}

bool is_relation_token(const Token& t) { return t.kind == Token::Op || t.kind == Token::Ident; }

// Guard formulas, converted to DNF while parsing. Negation is pushed inward.
class GuardParser {
public:
    GuardParser(TokenStream& ts, const DomainSpec& d, const Transition& t) : ts_(ts), d_(d), t_(t) {}

    Guard parse()
    {
        Guard g{parse_or(false)};
        if (!ts_.at_end())
            ts_.fail("unexpected '" + ts_.peek().text + "' in guard", ts_.peek());
        return g;
    }

private:
    using Dnf = std::vector<Conjunction>;

    Dnf disjoin(Dnf a, Dnf b) const
    {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }

    Dnf conjoin(const Dnf& a, const Dnf& b) const
    {
        Dnf out;
        for (const auto& x : a)
            for (const auto& y : b) {
                Conjunction c = x;
                for (const Literal& l : y)
                    if (std::find(c.begin(), c.end(), l) == c.end())
                        c.push_back(l);
                out.push_back(std::move(c));
                if (out.size() > kMaxDisjuncts)
                    ts_.fail("guard too large in disjunctive normal form", ts_.peek());
            }
        return out;
    }

    Dnf parse_or(bool neg)
    {
        Dnf acc = parse_and(neg);
        while (ts_.accept(Token::Or)) {
            Dnf rhs = parse_and(neg);
            acc = neg ? conjoin(acc, rhs) : disjoin(std::move(acc), std::move(rhs));
        }
        return acc;
    }

    Dnf parse_and(bool neg)
    {
        Dnf acc = parse_unary(neg);
        while (ts_.accept(Token::And)) {
            Dnf rhs = parse_unary(neg);
            acc = neg ? disjoin(std::move(acc), std::move(rhs)) : conjoin(acc, rhs);
        }
        return acc;
    }

    Dnf parse_unary(bool neg)
    {
        if (ts_.accept(Token::Not))
            return parse_unary(!neg);
        if (ts_.accept(Token::LParen)) {
            Dnf inner = parse_or(neg);
            ts_.expect(Token::RParen, "')'");
            return inner;
        }
        const Token& first = ts_.peek();
        if (first.kind == Token::Ident && (first.text == "true" || first.text == "false")) {
            ts_.next();
            const bool value = (first.text == "true") != neg;
            return value ? Dnf{Conjunction{}} : Dnf{};
        }
        Literal l;
        l.x = variable(ts_.expect(Token::Ident, "variable"));
        const Token& rel = ts_.peek();
        if (!is_relation_token(rel))
            ts_.fail("expected relation symbol", rel);
        ts_.next();
        auto ref = resolve_relation(d_, rel.text);
        if (!ref)
            ts_.fail("unknown relation symbol '" + rel.text + "' for domain " + d_.describe(), rel);
        l.kind = ref->kind;
        l.relation = ref->relation;
        l.negated = ref->negated != neg;
        l.y = variable(ts_.expect(Token::Ident, "variable"));
        return Dnf{Conjunction{l}};
    }

    std::size_t variable(const Token& tok) const
    {
        for (std::size_t i = 0; i < t_.vars.size(); ++i)
            if (t_.vars[i] == tok.text)
                return i;
        ts_.fail("guard variable '" + tok.text + "' is not on any arc of " + t_.name, tok);
    }

    TokenStream& ts_;
    const DomainSpec& d_;
    const Transition& t_;
};

// Atom declarations and token placements shared by init blocks, configuration
// text and targets.
class AtomTable {
public:
    AtomTable(const DataNet& net) : net_(net) {}

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }

    std::optional<std::size_t> find(std::string_view name) const
    {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name)
                return i;
        return std::nullopt;
    }

    std::size_t add(const Token& tok, const TokenStream& ts)
    {
        if (tok.text == "with")
            ts.fail("'with' cannot name an atom", tok);
        if (find(tok.text))
            ts.fail("atom '" + tok.text + "' declared twice", tok);
        names_.push_back(tok.text);
        return names_.size() - 1;
    }

    /// `atoms a b c [with a R b, ...]`, after the keyword.
    void parse_declaration(TokenStream& ts)
    {
        bool any = false;
        while (ts.peek().kind == Token::Ident && ts.peek().text != "with") {
            add(ts.next(), ts);
            any = true;
        }
        if (!any)
            ts.fail("expected atom names", ts.peek());
        if (ts.at_end())
            return;
        const Token& w = ts.expect(Token::Ident, "'with'");
        if (w.text != "with")
            ts.fail("expected 'with'", w);
        do {
            const Token& a = ts.expect(Token::Ident, "atom");
            const Token& rel = ts.peek();
            if (!is_relation_token(rel))
                ts.fail("expected relation symbol", rel);
            ts.next();
            const Token& b = ts.expect(Token::Ident, "atom");
            declare(ts, a, rel, b);
        } while (ts.accept(Token::Comma));
        if (!ts.at_end())
            ts.fail("unexpected '" + ts.peek().text + "'", ts.peek());
    }

    void declare(const TokenStream& ts, const Token& a, const Token& rel, const Token& b)
    {
        auto ia = find(a.text), ib = find(b.text);
        if (!ia)
            ts.fail("undeclared atom '" + a.text + "'", a);
        if (!ib)
            ts.fail("undeclared atom '" + b.text + "'", b);
        if (*ia == *ib)
            ts.fail("an atom cannot be related to itself", b);
        const DomainSpec& d = net_.domain;
        std::optional<PairType> type;
        if (rel.text == "=") {
            ts.fail("distinct atoms cannot be equal", rel);
        } else if (rel.text == "!=") {
            if (d.alphabet()->size() == 1)
                type = 0;
            else
                ts.fail("'!=' does not fix a pair type in domain " + d.describe(), rel);
        } else if (auto r = d.find_relation(rel.text)) {
            const Relation& R = d.relations()[*r];
            for (PairType t = 0; t < R.types.size(); ++t)
                if (R.types[t]) {
                    if (type)
                        ts.fail("relation '" + rel.text + "' does not fix a pair type", rel);
                    type = t;
                }
            if (!type)
                ts.fail("relation '" + rel.text + "' never holds between distinct atoms", rel);
        } else {
            ts.fail("unknown relation symbol '" + rel.text + "' for domain " + d.describe(), rel);
        }
        // Stored as type(ia, ib).
        const auto key = std::minmax(*ia, *ib);
        const PairType stored = *ia < *ib ? *type : d.alphabet()->inverse(*type);
        auto [it, fresh] = pairs_.emplace(key, stored);
        if (!fresh && it->second != stored)
            ts.fail("conflicting declarations for " + a.text + " and " + b.text, rel);
    }

    std::optional<PairType> declared(std::size_t i, std::size_t j) const
    {
        auto it = pairs_.find(std::minmax(i, j));
        if (it == pairs_.end())
            return std::nullopt;
        return i < j ? it->second : net_.domain.alphabet()->inverse(it->second);
    }

private:
    const DataNet& net_;
    std::vector<std::string> names_;
    std::map<std::pair<std::size_t, std::size_t>, PairType> pairs_;
};

class ConfigurationBuilder {
public:
    explicit ConfigurationBuilder(const DataNet& net) : net_(net), atoms_(net) {}

    AtomTable& atoms() { return atoms_; }

    /// One line of a configuration block.
    void line(TokenStream& ts)
    {
        const Token& head = ts.expect(Token::Ident, "'atoms' or a place name");
        if (head.text == "atoms" && ts.peek().kind != Token::Colon) {
            if (declared_atoms_)
                ts.fail("second 'atoms' line", head);
            declared_atoms_ = true;
            atoms_.parse_declaration(ts);
            return;
        }
        auto place = net_.find_place(head.text);
        if (!place)
            ts.fail("unknown place '" + head.text + "'", head);
        ts.expect(Token::Colon, "':'");
        do {
            const Token& a = ts.expect(Token::Ident, "atom");
            auto i = atoms_.find(a.text);
            if (!i)
                ts.fail("undeclared atom '" + a.text + "'", a);
            tokens_.emplace_back(*i, *place);
        } while (!ts.at_end());
    }

    Configuration build(std::size_t line, std::size_t column) const
    {
        const DomainSpec& d = net_.domain;
        const std::size_t n = atoms_.size();
        FiniteStructure carrier(d.alphabet(), n);
        for (std::size_t j = 1; j < n; ++j)
            for (std::size_t i = 0; i < j; ++i) {
                auto t = atoms_.declared(i, j);
                if (!t) {
                    if (!d.generic_type())
                        throw ParseError("pair type of atoms " + atoms_.name(i) + " and " + atoms_.name(j) +
                                             " must be declared in domain " + d.describe(),
                                         line, column);
                    t = d.generic_type();
                }
                carrier.set_type(Vertex(i), Vertex(j), *t);
            }
        if (!age_contains(d, carrier))
            throw ParseError("declared atoms do not embed into domain " + d.describe(), line, column);
        std::vector<Counts> counts(n, Counts(net_.places.size(), 0));
        for (auto [atom, place] : tokens_)
            ++counts[atom][place];
        return Configuration::make(carrier, counts, net_.places.size());
    }

private:
    const DataNet& net_;
    AtomTable atoms_;
    bool declared_atoms_ = false;
    std::vector<std::pair<std::size_t, std::size_t>> tokens_;
};

struct SourceLine {
    std::size_t number;
    std::size_t indent;
    std::string_view body;  // comment stripped, without leading whitespace
};

std::vector<SourceLine> split_lines(std::string_view text)
{
    std::vector<SourceLine> out;
    std::size_t number = 0, start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++number;
        std::string_view line = text.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
            line.remove_suffix(1);
        std::size_t indent = 0;
        while (indent < line.size() && std::isspace(static_cast<unsigned char>(line[indent])))
            ++indent;
        if (indent < line.size())
            out.push_back({number, indent, line.substr(indent)});
        start = end + 1;
    }
    return out;
}

TokenStream tokens_of(const SourceLine& l) { return TokenStream(lex(l.body, l.number, l.indent), l.number); }

class NetParser {
public:
    explicit NetParser(std::filesystem::path base_dir) : base_dir_(std::move(base_dir)) {}

    DataNet parse(std::string_view text)
    {
        const auto lines = split_lines(text);
        std::size_t i = 0;
        while (i < lines.size()) {
            const SourceLine& l = lines[i];
            if (l.indent > 0)
                throw ParseError("unexpected indented line", l.number, l.indent + 1);
            TokenStream ts = tokens_of(l);
            const Token& head = ts.expect(Token::Ident, "a declaration keyword");
            if (head.text == "domain") {
                if (net_)
                    ts.fail("domain declared after use or twice", head);
                const std::string_view spec = l.body.substr(head.text.size());
                try {
                    net_.emplace(DataNet{parse_domain(spec, base_dir_), {}, {}, std::nullopt});
                } catch (const std::invalid_argument& e) {
                    throw ParseError(e.what(), l.number, l.indent + 1);
                }
                ++i;
            } else if (head.text == "place") {
                DataNet& net = need_net();
                if (!net.transitions.empty() || net.initial)
                    ts.fail("places must be declared before transitions", head);
                bool any = false;
                while (!ts.at_end()) {
                    const Token& p = ts.expect(Token::Ident, "place name");
                    if (net.find_place(p.text))
                        ts.fail("place '" + p.text + "' declared twice", p);
                    net.places.push_back(p.text);
                    any = true;
                }
                if (!any)
                    ts.fail("expected place names", ts.peek());
                ++i;
            } else if (head.text == "transition") {
                const Token& name = ts.expect(Token::Ident, "transition name");
                if (!ts.at_end())
                    ts.fail("unexpected '" + ts.peek().text + "'", ts.peek());
                if (need_net().find_transition(name.text))
                    ts.fail("transition '" + name.text + "' declared twice", name);
                i = transition(lines, i + 1, name.text);
            } else if (head.text == "init") {
                if (!ts.at_end())
                    ts.fail("unexpected '" + ts.peek().text + "'", ts.peek());
                if (need_net().initial)
                    ts.fail("second init block", head);
                i = init(lines, i + 1, l);
            } else {
                ts.fail("unknown declaration '" + head.text + "'", head);
            }
        }
        DataNet net = std::move(need_net());
        try {
            net.validate();
        } catch (const NetError& e) {
            throw ParseError(e.what(), lines.empty() ? 1 : lines.back().number, 1);
        }
        return net;
    }

private:
    DataNet& need_net()
    {
        if (!net_)
            net_.emplace(DataNet{DomainSpec::equality(), {}, {}, std::nullopt});
        return *net_;
    }

    std::size_t transition(const std::vector<SourceLine>& lines, std::size_t i, const std::string& name)
    {
        DataNet& net = need_net();
        Transition t;
        t.name = name;
        std::vector<std::pair<SourceLine, TokenStream>> guards;
        for (; i < lines.size() && lines[i].indent > 0; ++i) {
            TokenStream ts = tokens_of(lines[i]);
            const Token& kw = ts.expect(Token::Ident, "'in', 'out' or 'guard'");
            if (kw.text == "guard") {
                guards.emplace_back(lines[i], std::move(ts));
                continue;
            }
            if (kw.text != "in" && kw.text != "out")
                ts.fail("expected 'in', 'out' or 'guard'", kw);
            auto& arcs = kw.text == "in" ? t.inputs : t.outputs;
            const Token& p = ts.expect(Token::Ident, "place name");
            auto place = net.find_place(p.text);
            if (!place)
                ts.fail("unknown place '" + p.text + "'", p);
            for (const Arc& a : arcs)
                if (a.place == *place)
                    ts.fail("second '" + kw.text + "' arc on place " + p.text, p);
            ts.expect(Token::Colon, "':'");
            Arc arc{*place, {}};
            do {
                const Token& v = ts.expect(Token::Ident, "variable");
                if (v.text == "true" || v.text == "false")
                    ts.fail("reserved word '" + v.text + "' used as a variable", v);
                if (std::find(t.vars.begin(), t.vars.end(), v.text) != t.vars.end())
                    ts.fail("variable '" + v.text + "' reused across arcs", v);
                t.vars.push_back(v.text);
                arc.vars.push_back(t.vars.size() - 1);
            } while (!ts.at_end());
            arcs.push_back(std::move(arc));
        }
        for (auto& [line, ts] : guards) {
            Guard g = GuardParser(ts, net.domain, t).parse();
            Guard merged;
            for (const auto& a : t.guard.disjuncts)
                for (const auto& b : g.disjuncts) {
                    Conjunction c = a;
                    for (const Literal& l : b)
                        if (std::find(c.begin(), c.end(), l) == c.end())
                            c.push_back(l);
                    merged.disjuncts.push_back(std::move(c));
                }
            t.guard = std::move(merged);
        }
        net.transitions.push_back(std::move(t));
        return i;
    }

    std::size_t init(const std::vector<SourceLine>& lines, std::size_t i, const SourceLine& head)
    {
        DataNet& net = need_net();
        ConfigurationBuilder builder(net);
        for (; i < lines.size() && lines[i].indent > 0; ++i) {
            TokenStream ts = tokens_of(lines[i]);
            builder.line(ts);
        }
        net.initial = builder.build(head.number, head.indent + 1);
        return i;
    }

    std::filesystem::path base_dir_;
    std::optional<DataNet> net_;
};

std::string relation_name_for(const DomainSpec& d, PairType t)
{
    for (const Relation& r : d.relations()) {
        if (r.reflexive)
            continue;
        bool exact = true;
        for (PairType u = 0; u < r.types.size(); ++u)
            if (r.types[u] != (u == t))
                exact = false;
        if (exact)
            return r.name;
    }
    throw NetError("no relation names pair type " + d.alphabet()->name(t));
}

std::string literal_to_string(const DataNet& net, const Transition& t, const Literal& l)
{
    const std::string& x = t.vars[l.x];
    const std::string& y = t.vars[l.y];
    if (l.kind == LiteralKind::Identity)
        return x + (l.negated ? " != " : " = ") + y;
    const std::string atom = x + " " + net.domain.relations()[l.relation].name + " " + y;
    return l.negated ? "!(" + atom + ")" : atom;
}

} // namespace

std::string guard_to_string(const DataNet& net, const Transition& t)
{
    const auto& ds = t.guard.disjuncts;
    if (ds.empty())
        return "false";
    std::string out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i > 0)
            out += " | ";
        if (ds[i].empty()) {
            out += "true";
            continue;
        }
        const bool paren = ds.size() > 1 && ds[i].size() > 1;
        if (paren)
            out += "(";
        for (std::size_t j = 0; j < ds[i].size(); ++j) {
            if (j > 0)
                out += " & ";
            out += literal_to_string(net, t, ds[i][j]);
        }
        if (paren)
            out += ")";
    }
    return out;
}

DataNet parse_net(std::string_view text, const std::filesystem::path& base_dir)
{
    return NetParser(base_dir).parse(text);
}

DataNet load_net(const std::filesystem::path& file)
{
    return parse_net(read_file(file), file.parent_path());
}

std::string configuration_to_string(const DataNet& net, const Configuration& c)
{
    std::ostringstream os;
    const auto atom = [](Vertex v) { return "a" + std::to_string(v); };
    if (c.size() > 0) {
        os << "atoms";
        for (Vertex v = 0; v < c.size(); ++v)
            os << ' ' << atom(v);
        const auto generic = net.domain.generic_type();
        bool first = true;
        for (Vertex v = 1; v < c.size(); ++v)
            for (Vertex u = 0; u < v; ++u) {
                const PairType t = c.carrier().type(u, v);
                if (generic && t == *generic)
                    continue;
                os << (first ? " with " : ", ") << atom(u) << ' ' << relation_name_for(net.domain, t) << ' '
                   << atom(v);
                first = false;
            }
        os << '\n';
    }
    for (std::size_t p = 0; p < net.places.size(); ++p) {
        std::string line;
        for (Vertex v = 0; v < c.size(); ++v)
            for (std::uint32_t k = 0; k < c.count(v, p); ++k)
                line += ' ' + atom(v);
        if (!line.empty())
            os << net.places[p] << ':' << line << '\n';
    }
    return os.str();
}

std::string unparse(const DataNet& net)
{
    std::ostringstream os;
    os << "domain " << net.domain.describe() << '\n';
    if (!net.places.empty()) {
        os << "place";
        for (const auto& p : net.places)
            os << ' ' << p;
        os << '\n';
    }
    for (const Transition& t : net.transitions) {
        os << "transition " << t.name << '\n';
        for (const auto* arcs : {&t.inputs, &t.outputs})
            for (const Arc& a : *arcs) {
                os << "  " << (arcs == &t.inputs ? "in " : "out ") << net.places[a.place] << ':';
                for (std::size_t x : a.vars)
                    os << ' ' << t.vars[x];
                os << '\n';
            }
        if (t.guard != Guard::always())
            os << "  guard " << guard_to_string(net, t) << '\n';
    }
    if (net.initial) {
        os << "init\n";
        std::istringstream body(configuration_to_string(net, *net.initial));
        for (std::string line; std::getline(body, line);)
            os << "  " << line << '\n';
    }
    return os.str();
}

Configuration parse_configuration(const DataNet& net, std::string_view text)
{
    ConfigurationBuilder builder(net);
    const auto lines = split_lines(text);
    for (const SourceLine& l : lines) {
        TokenStream ts = tokens_of(l);
        builder.line(ts);
    }
    return builder.build(lines.empty() ? 1 : lines.front().number, 1);
}

// Targets --------------------------------------------------------------------

namespace {

class TargetBuilder {
public:
    TargetBuilder(const DataNet& net, const AtomTable& atoms, std::vector<std::pair<std::size_t, std::size_t>> named,
                  std::vector<std::size_t> anonymous)
        : net_(net), atoms_(atoms), named_(std::move(named)), anonymous_(std::move(anonymous))
    {
    }

    std::vector<Configuration> run()
    {
        place_atoms(FiniteStructure(net_.domain.alphabet(), 0));
        // Keep the minimal ones.
        std::vector<Configuration> basis;
        for (const Configuration& c : found_) {
            if (std::any_of(basis.begin(), basis.end(), [&](const Configuration& b) { return config_leq(b, c); }))
                continue;
            std::erase_if(basis, [&](const Configuration& b) { return config_leq(c, b); });
            basis.push_back(c);
        }
        return basis;
    }

private:
    // Named atoms first, each row filtered by declared pair types.
    void place_atoms(const FiniteStructure& s)
    {
        const std::size_t k = s.size();
        if (k == atoms_.size()) {
            assign_.clear();
            place_tokens(s, 0);
            return;
        }
        for (const TypeRow& row : extension_rows(net_.domain, s)) {
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i)
                if (auto t = atoms_.declared(i, k))
                    ok = row[i] == *t;
            if (ok)
                place_atoms(s.extended(row));
        }
    }

    // Anonymous tokens go onto any existing vertex or a new one.
    void place_tokens(const FiniteStructure& s, std::size_t i)
    {
        if (i == anonymous_.size()) {
            std::vector<Counts> counts(s.size(), Counts(net_.places.size(), 0));
            for (auto [atom, place] : named_)
                ++counts[atom][place];
            for (std::size_t j = 0; j < anonymous_.size(); ++j)
                ++counts[assign_[j]][anonymous_[j]];
            Configuration c = Configuration::make(s, counts, net_.places.size());
            if (seen_.insert(c.key()).second)
                found_.push_back(std::move(c));
            return;
        }
        for (Vertex v = 0; v < s.size(); ++v) {
            assign_.push_back(v);
            place_tokens(s, i + 1);
            assign_.pop_back();
        }
        for (const TypeRow& row : extension_rows(net_.domain, s)) {
            assign_.push_back(Vertex(s.size()));
            place_tokens(s.extended(row), i + 1);
            assign_.pop_back();
        }
    }

    const DataNet& net_;
    const AtomTable& atoms_;
    std::vector<std::pair<std::size_t, std::size_t>> named_;
    std::vector<std::size_t> anonymous_;
    std::vector<Vertex> assign_;
    std::vector<Configuration> found_;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> seen_;
};

} // namespace

std::vector<Configuration> parse_target(const DataNet& net, std::string_view text)
{
    const std::size_t semi = text.find(';');
    const std::string_view clauses = text.substr(0, semi);
    AtomTable atoms(net);
    bool declared = false;
    if (semi != std::string_view::npos) {
        TokenStream ts(lex(text.substr(semi + 1), 1, semi + 1), 1);
        const Token& kw = ts.expect(Token::Ident, "'atoms'");
        if (kw.text != "atoms")
            ts.fail("expected 'atoms'", kw);
        atoms.parse_declaration(ts);
        declared = true;
    }

    // place ['(' atom ')'] ['>=' k], separated by '&' or ','.
    std::vector<std::pair<std::size_t, std::size_t>> named;
    std::vector<std::size_t> anonymous;
    TokenStream ts(lex(clauses, 1), 1);
    bool any = false;
    do {
        const Token& p = ts.expect(Token::Ident, "place name");
        auto place = net.find_place(p.text);
        if (!place)
            ts.fail("unknown place '" + p.text + "'", p);
        std::optional<std::size_t> atom;
        if (ts.accept(Token::LParen)) {
            const Token& a = ts.expect(Token::Ident, "atom");
            atom = atoms.find(a.text);
            if (!atom) {
                if (declared)
                    ts.fail("undeclared atom '" + a.text + "'", a);
                atom = atoms.add(a, ts);
            }
            ts.expect(Token::RParen, "')'");
        }
        std::size_t k = 1;
        if (ts.peek().kind == Token::Op) {
            // ">=k" lexes as one token, ">= k" as two.
            const Token& op = ts.next();
            if (op.text.rfind(">=", 0) != 0)
                ts.fail("expected '>='", op);
            std::string digits = op.text.substr(2);
            if (digits.empty())
                digits = ts.expect(Token::Number, "token count").text;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
            if (ec != std::errc() || k < 1)
                ts.fail("token count must be a positive integer", op);
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (atom)
                named.emplace_back(*atom, *place);
            else
                anonymous.push_back(*place);
        }
        any = true;
    } while (ts.accept(Token::And) || ts.accept(Token::Comma));
    if (!ts.at_end() || !any)
        ts.fail("malformed target", ts.peek());
    return TargetBuilder(net, atoms, std::move(named), std::move(anonymous)).run();
}

} // namespace dnets
