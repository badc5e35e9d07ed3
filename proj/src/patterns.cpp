#include "dnets/patterns.hpp"

#include <cctype>
#include <charconv>

namespace dnets {

namespace {

void require_symmetric(const AlphabetRef& alphabet, const char* what)
{
    if (!alphabet->is_symmetric())
        throw StructureError(std::string(what) + " needs a symmetric alphabet");
}

} // namespace

FiniteStructure make_path(const AlphabetRef& alphabet, std::span<const PairType> edges, PairType no_edge)
{
    require_symmetric(alphabet, "path");
    FiniteStructure s(alphabet, edges.size() + 1, no_edge);
    for (Vertex i = 0; i < edges.size(); ++i)
        s.set_type(i, i + 1, edges[i]);
    return s;
}

FiniteStructure make_cycle(const AlphabetRef& alphabet, std::span<const PairType> edges, PairType no_edge)
{
    require_symmetric(alphabet, "cycle");
    if (edges.size() < 3)
        throw StructureError("cycle needs at least 3 edges");
    const std::size_t n = edges.size();
    FiniteStructure s(alphabet, n, no_edge);
    for (Vertex i = 0; i < n; ++i)
        s.set_type(i, Vertex((i + 1) % n), edges[i]);
    return s;
}

FiniteStructure make_discrete(const AlphabetRef& alphabet, std::size_t k, PairType no_edge)
{
    return FiniteStructure(alphabet, k, no_edge);
}

FiniteStructure disjoint_sum(const FiniteStructure& g1, const FiniteStructure& g2, PairType between)
{
    if (!same_alphabet(g1.alphabet_ref(), g2.alphabet_ref()))
        throw StructureError("disjoint_sum: alphabet mismatch");
    const std::size_t n1 = g1.size();
    FiniteStructure s(g1.alphabet_ref(), n1 + g2.size(), between);
    for (Vertex v = 1; v < n1; ++v)
        for (Vertex u = 0; u < v; ++u)
            s.set_type(u, v, g1.type(u, v));
    for (Vertex v = 1; v < g2.size(); ++v)
        for (Vertex u = 0; u < v; ++u)
            s.set_type(Vertex(n1 + u), Vertex(n1 + v), g2.type(u, v));
    return s;
}

FiniteStructure repeat(std::size_t k, const FiniteStructure& g, PairType between)
{
    FiniteStructure s(g.alphabet_ref(), 0);
    for (std::size_t i = 0; i < k; ++i)
        s = disjoint_sum(s, g, between);
    return s;
}

FiniteStructure make_triangle(const AlphabetRef& alphabet, PairType a, PairType b, PairType c)
{
    FiniteStructure s(alphabet, 3);
    s.set_type(0, 1, a);
    s.set_type(1, 2, b);
    s.set_type(0, 2, c);
    return s;
}

FiniteStructure make_clique(const AlphabetRef& alphabet, std::size_t k, PairType c)
{
    return FiniteStructure(alphabet, k, c);
}

// Text form ----------------------------------------------------------------

namespace {

struct Token {
    std::string text;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view expr)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < expr.size()) {
        const char c = expr[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(' || c == ')') {
            out.push_back({std::string(1, c), i + 1});
            ++i;
        } else {
            const std::size_t start = i;
            while (i < expr.size() && !std::isspace(static_cast<unsigned char>(expr[i])) && expr[i] != '(' &&
                   expr[i] != ')')
                ++i;
            out.push_back({std::string(expr.substr(start, i - start)), start + 1});
        }
    }
    return out;
}

class PatternParser {
public:
    PatternParser(std::string_view expr, const AlphabetRef& alphabet, PairType no_edge, const ColorAliases& aliases)
        : tokens_(tokenize(expr)), alphabet_(alphabet), no_edge_(no_edge), aliases_(aliases), end_(expr.size() + 1)
    {
    }

    FiniteStructure parse()
    {
        FiniteStructure s = expression();
        if (pos_ != tokens_.size())
            fail("trailing input '" + tokens_[pos_].text + "'");
        return s;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw PatternError("pattern: " + msg, pos_ < tokens_.size() ? tokens_[pos_].column : end_);
    }

    bool at_end() const { return pos_ >= tokens_.size(); }
    const std::string& peek() const { return tokens_[pos_].text; }

    FiniteStructure expression()
    {
        if (at_end())
            fail("unexpected end of pattern");
        const std::string head = peek();
        if (head == "(") {
            ++pos_;
            FiniteStructure s = expression();
            if (at_end() || peek() != ")")
                fail("expected ')'");
            ++pos_;
            return s;
        }
        ++pos_;
        if (head == "path" || head == "cycle") {
            std::vector<PairType> colors;
            while (!at_end() && peek() != ")") {
                auto c = color(peek());
                if (!c)
                    break;
                colors.push_back(*c);
                ++pos_;
            }
            if (colors.empty())
                fail(head + " needs at least one color");
            if (!alphabet_->is_symmetric())
                fail(head + " needs a symmetric alphabet");
            if (head == "cycle" && colors.size() < 3)
                fail("cycle needs at least 3 colors");
            return head == "path" ? make_path(alphabet_, colors, no_edge_) : make_cycle(alphabet_, colors, no_edge_);
        }
        if (head == "discrete" || head == "dot") {
            const std::size_t k = head == "dot" ? 1 : number();
            return make_discrete(alphabet_, k, no_edge_);
        }
        if (head == "sum") {
            FiniteStructure a = expression();
            FiniteStructure b = expression();
            return disjoint_sum(a, b, no_edge_);
        }
        if (head == "repeat") {
            const std::size_t k = number();
            return repeat(k, expression(), no_edge_);
        }
        --pos_;
        fail("unknown pattern head '" + head + "'");
    }

    std::size_t number()
    {
        if (at_end())
            fail("expected a count");
        const std::string& t = peek();
        std::size_t k = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), k);
        if (ec != std::errc() || p != t.data() + t.size())
            fail("expected a count, got '" + t + "'");
        ++pos_;
        return k;
    }

    std::optional<PairType> color(const std::string& name) const
    {
        if (auto it = aliases_.find(name); it != aliases_.end())
            return it->second;
        return alphabet_->find(name);
    }

    std::vector<Token> tokens_;
    const AlphabetRef& alphabet_;
    PairType no_edge_;
    const ColorAliases& aliases_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

} // namespace

FiniteStructure build_pattern(std::string_view expr, const AlphabetRef& alphabet, PairType no_edge,
                              const ColorAliases& aliases)
{
    if (no_edge >= alphabet->size())
        throw StructureError("no-edge color outside alphabet");
    return PatternParser(expr, alphabet, no_edge, aliases).parse();
}

} // namespace dnets
