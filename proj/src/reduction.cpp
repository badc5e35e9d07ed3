#include "dnets/reduction.hpp"

#include <set>
#include <sstream>

namespace dnets {

std::optional<std::size_t> MinskyMachine::find_state(std::string_view name) const
{
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == name)
            return i;
    return std::nullopt;
}

namespace {

struct Word {
    std::string text;
    std::size_t column;
};

std::vector<Word> split_words(std::string_view line)
{
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == ':' || c == '?') {
            out.push_back({std::string(1, c), i + 1});
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            out.push_back({"->", i + 1});
            i += 2;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != ':' &&
               line[j] != '?' && !(line[j] == '-' && j + 1 < line.size() && line[j + 1] == '>'))
            ++j;
        out.push_back({std::string(line.substr(i, j - i)), i + 1});
        i = j;
    }
    return out;
}

int parse_counter(const Word& w, std::size_t line)
{
    if (w.text == "c1")
        return 1;
    if (w.text == "c2")
        return 2;
    throw ParseError("expected counter c1 or c2, got '" + w.text + "'", line, w.column);
}

} // namespace

MinskyMachine parse_machine(std::string_view text)
{
    MinskyMachine m;
    struct Pending {
        std::size_t line;
        Word state;
        Instruction::Kind kind;
        int counter;
        Word a;
        Word b;
    };
    std::vector<Pending> pending;
    std::optional<Word> init, halt;
    std::size_t init_line = 0, halt_line = 0, number = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++number;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const auto w = split_words(line);
        if (w.empty())
            continue;
        const auto expect_size = [&](std::size_t n) {
            if (w.size() != n)
                throw ParseError("malformed line", number, w.front().column);
        };
        if (w[0].text == "state") {
            if (w.size() < 2)
                throw ParseError("expected state names", number, w[0].column);
            for (std::size_t i = 1; i < w.size(); ++i) {
                if (m.find_state(w[i].text))
                    throw ParseError("duplicate state '" + w[i].text + "'", number, w[i].column);
                m.states.push_back(w[i].text);
            }
        } else if (w[0].text == "init" || w[0].text == "halt") {
            expect_size(2);
            auto& slot = w[0].text == "init" ? init : halt;
            if (slot)
                throw ParseError("second '" + w[0].text + "' line", number, w[0].column);
            slot = w[1];
            (w[0].text == "init" ? init_line : halt_line) = number;
        } else if (w.size() >= 2 && w[1].text == ":") {
            if (w.size() >= 3 && w[2].text == "inc") {
                expect_size(6);
                if (w[4].text != "->")
                    throw ParseError("expected '->'", number, w[4].column);
                pending.push_back({number, w[0], Instruction::Inc, parse_counter(w[3], number), w[5], {}});
            } else if (w.size() >= 3 && w[2].text == "test") {
                expect_size(8);
                if (w[4].text != "?" || w[6].text != ":")
                    throw ParseError("expected '<q>: test c<j> ? <qZero> : <qDec>'", number, w[2].column);
                pending.push_back({number, w[0], Instruction::Test, parse_counter(w[3], number), w[5], w[7]});
            } else {
                throw ParseError("expected 'inc' or 'test'", number, w.size() >= 3 ? w[2].column : w[1].column);
            }
        } else {
            throw ParseError("unknown line '" + w[0].text + "'", number, w[0].column);
        }
    }
    const auto state = [&](const Word& w, std::size_t line) {
        auto s = m.find_state(w.text);
        if (!s)
            throw ParseError("undeclared state '" + w.text + "'", line, w.column);
        return *s;
    };
    if (!init)
        throw ParseError("missing 'init' line", number + 1, 1);
    if (!halt)
        throw ParseError("missing 'halt' line", number + 1, 1);
    m.init = state(*init, init_line);
    m.halt = state(*halt, halt_line);
    m.program.assign(m.states.size(), std::nullopt);
    for (const Pending& p : pending) {
        const std::size_t q = state(p.state, p.line);
        if (q == m.halt)
            throw ParseError("halting state '" + p.state.text + "' has an instruction", p.line, p.state.column);
        if (m.program[q])
            throw ParseError("second instruction for state '" + p.state.text + "'", p.line, p.state.column);
        Instruction ins;
        ins.kind = p.kind;
        ins.counter = p.counter;
        ins.next = state(p.a, p.line);
        if (p.kind == Instruction::Test)
            ins.if_dec = state(p.b, p.line);
        m.program[q] = ins;
    }
    for (std::size_t q = 0; q < m.states.size(); ++q)
        if (q != m.halt && !m.program[q])
            throw ParseError("state '" + m.states[q] + "' has no instruction", number + 1, 1);
    return m;
}

std::string unparse_machine(const MinskyMachine& m)
{
    std::ostringstream os;
    os << "state";
    for (const auto& s : m.states)
        os << ' ' << s;
    os << "\ninit " << m.states[m.init] << "\nhalt " << m.states[m.halt] << '\n';
    for (std::size_t q = 0; q < m.states.size(); ++q) {
        if (!m.program[q])
            continue;
        const Instruction& i = *m.program[q];
        os << m.states[q] << ": ";
        if (i.kind == Instruction::Inc)
            os << "inc c" << i.counter << " -> " << m.states[i.next] << '\n';
        else
            os << "test c" << i.counter << " ? " << m.states[i.next] << " : " << m.states[i.if_dec] << '\n';
    }
    return os.str();
}

MachineRun run_machine(const MinskyMachine& m, std::size_t fuel)
{
    MachineRun r;
    r.state = m.init;
    while (r.state != m.halt && r.steps < fuel) {
        const Instruction& i = *m.program[r.state];
        std::uint64_t& c = i.counter == 1 ? r.c1 : r.c2;
        if (i.kind == Instruction::Inc) {
            ++c;
            r.state = i.next;
        } else if (c == 0) {
            r.state = i.next;
        } else {
            --c;
            r.state = i.if_dec;
        }
        ++r.steps;
    }
    r.halted = r.state == m.halt;
    return r;
}

// Compilation ----------------------------------------------------------------

namespace {

constexpr std::size_t kB1 = 0, kM1 = 1, kE1 = 2, kB2 = 3, kM2 = 4, kE2 = 5, kP = 6, kR = 7;

class Compiler {
public:
    explicit Compiler(const MinskyMachine& m) : m_(m), net_{DomainSpec::grid(), {}, {}, std::nullopt} {}

    CompiledNet run()
    {
        CompiledNet out{DataNet{DomainSpec::grid(), {}, {}, std::nullopt}, {}, 0, {}};
        for (const char* p : {"b1", "m1", "e1", "b2", "m2", "e2", "p", "r"})
            add_place(p);
        for (std::size_t i = 0; i < 8; ++i)
            out.counter_places[i] = i;
        for (const auto& s : m_.states)
            out.state_place.push_back(add_place(s));
        std::vector<std::optional<std::size_t>> waiting(m_.states.size());
        for (std::size_t q = 0; q < m_.states.size(); ++q)
            if (m_.program[q] && m_.program[q]->kind == Instruction::Inc)
                waiting[q] = add_place("inc_" + m_.states[q]);
        out.halt_place = out.state_place[m_.halt];

        bool traversal[3] = {false, false, false};
        for (std::size_t q = 0; q < m_.states.size(); ++q) {
            if (!m_.program[q])
                continue;
            const Instruction& ins = *m_.program[q];
            const int j = ins.counter;
            const std::string js = std::to_string(j);
            const std::size_t here = out.state_place[q];
            if (ins.kind == Instruction::Test) {
                zero_test(j, "z_" + js + "_" + m_.states[q] + "_" + m_.states[ins.next], here,
                          out.state_place[ins.next]);
                decrement(j, "d_" + js + "_" + m_.states[q] + "_" + m_.states[ins.if_dec], here,
                          out.state_place[ins.if_dec]);
            } else {
                start_increment(j, "i_" + js + "_" + m_.states[q], here, *waiting[q]);
                if (!traversal[j]) {
                    traverse(j);
                    traversal[j] = true;
                }
                finish_increment(j, "i'_" + js + "_" + m_.states[q], *waiting[q], out.state_place[ins.next]);
            }
        }

        // Initial configuration: control on q_init, b_j =1 e_j, all else !=12.
        FiniteStructure carrier(net_.domain.alphabet(), 5, 2);
        carrier.set_type(0, 1, 0);
        carrier.set_type(2, 3, 0);
        std::vector<Counts> counts(5, Counts(net_.places.size(), 0));
        counts[0][kB1] = 1;
        counts[1][kE1] = 1;
        counts[2][kB2] = 1;
        counts[3][kE2] = 1;
        counts[4][out.state_place[m_.init]] = 1;
        net_.initial = Configuration::make(carrier, counts, net_.places.size());
        net_.validate();
        out.net = std::move(net_);
        return out;
    }

private:
    std::size_t add_place(const std::string& name)
    {
        if (net_.find_place(name))
            throw NetError("compile: place name '" + name + "' is used twice; rename the state");
        net_.places.push_back(name);
        return net_.places.size() - 1;
    }

    static std::size_t b(int j) { return j == 1 ? kB1 : kB2; }
    static std::size_t mid(int j) { return j == 1 ? kM1 : kM2; }
    static std::size_t e(int j) { return j == 1 ? kE1 : kE2; }

    // Builder for one transition; variables are created by arcs.
    struct Builder {
        Transition t;
        std::map<std::string, std::size_t> var;

        void arc(bool input, std::size_t place, std::initializer_list<const char*> names)
        {
            Arc a{place, {}};
            for (const char* n : names) {
                t.vars.push_back(n);
                var[n] = t.vars.size() - 1;
                a.vars.push_back(t.vars.size() - 1);
            }
            (input ? t.inputs : t.outputs).push_back(std::move(a));
        }
        void in(std::size_t place, std::initializer_list<const char*> names) { arc(true, place, names); }
        void out(std::size_t place, std::initializer_list<const char*> names) { arc(false, place, names); }
    };

    Literal identity(Builder& bld, const char* x, const char* y, bool negated = false) const
    {
        return Literal{LiteralKind::Identity, bld.var.at(x), bld.var.at(y), 0, negated};
    }
    Literal rel(Builder& bld, const char* x, const char* r, const char* y, bool negated) const
    {
        return Literal{LiteralKind::Relation, bld.var.at(x), bld.var.at(y), *net_.domain.find_relation(r), negated};
    }

    // base ∧ (x E y), with E = (=1 ∪ =2), as two disjuncts.
    Guard with_edge(Builder& bld, const Conjunction& base, const char* x, const char* y) const
    {
        Guard g;
        for (const char* r : {"=1", "=2"}) {
            Conjunction c = base;
            c.push_back(rel(bld, x, r, y, false));
            g.disjuncts.push_back(std::move(c));
        }
        return g;
    }

    void not_edge(Builder& bld, Conjunction& c, const char* x, const char* y) const
    {
        c.push_back(rel(bld, x, "=1", y, true));
        c.push_back(rel(bld, x, "=2", y, true));
    }

    void control(Builder& bld, std::size_t from, std::size_t to)
    {
        bld.in(from, {"c"});
        bld.out(to, {"c'"});
    }

    void zero_test(int j, const std::string& name, std::size_t from, std::size_t to)
    {
        Builder bld;
        bld.t.name = name;
        control(bld, from, to);
        bld.in(b(j), {"x"});
        bld.in(e(j), {"y"});
        bld.out(b(j), {"x'"});
        bld.out(e(j), {"y'"});
        Conjunction base{identity(bld, "c'", "c"), identity(bld, "x'", "x"), identity(bld, "y'", "y")};
        bld.t.guard = with_edge(bld, base, "x", "y");
        net_.transitions.push_back(std::move(bld.t));
    }

    void decrement(int j, const std::string& name, std::size_t from, std::size_t to)
    {
        Builder bld;
        bld.t.name = name;
        control(bld, from, to);
        bld.in(mid(j), {"x"});
        bld.in(e(j), {"y"});
        bld.out(e(j), {"y'"});
        Conjunction base{identity(bld, "c'", "c"), identity(bld, "y'", "x")};
        bld.t.guard = with_edge(bld, base, "x", "y");
        net_.transitions.push_back(std::move(bld.t));
    }

    void start_increment(int j, const std::string& name, std::size_t from, std::size_t waiting)
    {
        const int k = 3 - j;
        Builder bld;
        bld.t.name = name;
        control(bld, from, waiting);
        bld.in(b(j), {"x"});
        bld.in(e(j), {"y"});
        bld.in(b(k), {"u"});
        bld.in(e(k), {"w"});
        bld.out(b(j), {"x'"});
        bld.out(mid(j), {"y'"});
        bld.out(kP, {"yp"});
        bld.out(e(j), {"v"});
        bld.out(kR, {"vr"});
        bld.out(b(k), {"u'"});
        bld.out(e(k), {"w'"});
        Conjunction base{identity(bld, "c'", "c"), identity(bld, "x'", "x"), identity(bld, "y'", "y"),
                         identity(bld, "yp", "y"),  identity(bld, "vr", "v"), identity(bld, "u'", "u"),
                         identity(bld, "w'", "w")};
        not_edge(bld, base, "v", "x");
        not_edge(bld, base, "v", "u");
        not_edge(bld, base, "v", "w");
        bld.t.guard = with_edge(bld, base, "v", "y");
        net_.transitions.push_back(std::move(bld.t));
    }

    void traverse(int j)
    {
        Builder bld;
        bld.t.name = "t_" + std::to_string(j);
        bld.in(kP, {"p"});
        bld.in(kR, {"r"});
        bld.in(mid(j), {"m"});
        bld.in(e(j), {"e"});
        bld.out(kP, {"p'"});
        bld.out(kR, {"r'"});
        bld.out(mid(j), {"m'"});
        bld.out(e(j), {"e'"});
        Conjunction base{identity(bld, "m", "r", true), identity(bld, "e'", "e"), identity(bld, "m'", "m"),
                         identity(bld, "p'", "m"), identity(bld, "r'", "p")};
        not_edge(bld, base, "m", "e");
        bld.t.guard = with_edge(bld, base, "m", "p");
        net_.transitions.push_back(std::move(bld.t));
    }

    void finish_increment(int j, const std::string& name, std::size_t waiting, std::size_t to)
    {
        Builder bld;
        bld.t.name = name;
        control(bld, waiting, to);
        bld.in(kP, {"p"});
        bld.in(kR, {"r"});
        bld.in(b(j), {"x"});
        bld.out(b(j), {"x'"});
        Conjunction base{identity(bld, "c'", "c"), identity(bld, "x'", "x")};
        bld.t.guard = with_edge(bld, base, "p", "x");
        net_.transitions.push_back(std::move(bld.t));
    }

    const MinskyMachine& m_;
    DataNet net_;
};

bool edge(const FiniteStructure& s, Vertex u, Vertex v) { return u != v && s.type(u, v) <= 1; }

} // namespace

CompiledNet compile(const MinskyMachine& m) { return Compiler(m).run(); }

std::optional<std::size_t> control_state(const CompiledNet& cn, const Configuration& c)
{
    for (std::size_t q = 0; q < cn.state_place.size(); ++q)
        if (c.tokens_on(cn.state_place[q]) > 0)
            return q;
    return std::nullopt;
}

std::optional<std::pair<std::size_t, std::size_t>> decode_counters(const CompiledNet& cn, const Configuration& c)
{
    if (!control_state(cn, c) || c.tokens_on(cn.counter_places[kP]) || c.tokens_on(cn.counter_places[kR]))
        return std::nullopt;
    std::size_t values[2];
    for (int j = 0; j < 2; ++j) {
        const std::size_t pb = cn.counter_places[3 * j], pm = cn.counter_places[3 * j + 1],
                          pe = cn.counter_places[3 * j + 2];
        if (c.tokens_on(pb) != 1 || c.tokens_on(pe) != 1)
            return std::nullopt;
        Vertex vb = 0, ve = 0;
        std::vector<Vertex> nodes;
        for (Vertex v = 0; v < c.size(); ++v) {
            if (c.count(v, pb))
                vb = v;
            if (c.count(v, pe))
                ve = v;
            if (c.count(v, pm) > 1)
                return std::nullopt;
        }
        nodes.push_back(vb);
        for (Vertex v = 0; v < c.size(); ++v)
            if (c.count(v, pm)) {
                if (v == vb || v == ve)
                    return std::nullopt;
                nodes.push_back(v);
            }
        if (vb == ve)
            return std::nullopt;
        nodes.push_back(ve);
        // Walk the induced path from vb; every node must be visited exactly once.
        const FiniteStructure& s = c.carrier();
        std::vector<Vertex> order{vb};
        std::set<Vertex> used{vb};
        while (order.size() < nodes.size()) {
            std::optional<Vertex> step;
            for (Vertex w : nodes)
                if (!used.count(w) && edge(s, order.back(), w)) {
                    if (step)
                        return std::nullopt;
                    step = w;
                }
            if (!step)
                return std::nullopt;
            order.push_back(*step);
            used.insert(*step);
        }
        if (order.back() != ve)
            return std::nullopt;
        for (std::size_t a = 0; a < order.size(); ++a)
            for (std::size_t b2 = a + 2; b2 < order.size(); ++b2)
                if (edge(s, order[a], order[b2]))
                    return std::nullopt;
        values[j] = nodes.size() - 2;
    }
    return std::make_pair(values[0], values[1]);
}

} // namespace dnets
