#include "dnets/domains.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace dnets {

DomainSpec::DomainSpec(DomainKind kind, AlphabetRef alphabet) : kind_(kind), alphabet_(std::move(alphabet)) {}

void DomainSpec::add_relation(std::string name, std::vector<PairType> types, bool reflexive)
{
    Relation r{std::move(name), std::vector<bool>(alphabet_->size(), false), reflexive};
    for (PairType t : types)
        r.types.at(t) = true;
    relations_.push_back(std::move(r));
}

DomainSpec DomainSpec::equality()
{
    static const AlphabetRef alphabet = PairAlphabet::symmetric({"!="});
    DomainSpec d(DomainKind::Equality, alphabet);
    d.add_relation("C1", {0});
    d.generic_ = 0;
    return d;
}

DomainSpec DomainSpec::nested_equality()
{
    static const AlphabetRef alphabet = PairAlphabet::symmetric({"~1", "!~1"});
    DomainSpec d(DomainKind::NestedEquality, alphabet);
    d.add_relation("~1", {0});
    d.add_relation("!~1", {1});
    d.add_relation("C1", {0});
    d.add_relation("C2", {1});
    return d;
}

DomainSpec DomainSpec::dense_order()
{
    static const AlphabetRef alphabet = PairAlphabet::make({"<", ">"}, {1, 0});
    DomainSpec d(DomainKind::DenseOrder, alphabet);
    d.add_relation("<", {0});
    d.add_relation(">", {1});
    d.add_relation("<=", {0}, true);
    d.add_relation(">=", {1}, true);
    return d;
}

DomainSpec DomainSpec::grid()
{
    static const AlphabetRef alphabet = PairAlphabet::symmetric({"=1", "=2", "!=12"});
    DomainSpec d(DomainKind::Grid, alphabet);
    d.add_relation("=1", {0});
    d.add_relation("=2", {1});
    d.add_relation("!=12", {2});
    d.add_relation("C1", {0});
    d.add_relation("C2", {1});
    d.add_relation("C3", {2});
    d.generic_ = 2;
    return d;
}

DomainSpec DomainSpec::striped(std::size_t blocks, PairType color, PairType off_color)
{
    if (blocks < 1)
        throw DomainError("striped domain needs at least one block");
    if (color > 2 || off_color > 2 || color == off_color)
        throw DomainError("striped domain needs two distinct 3-graph colors");
    DomainSpec d(DomainKind::Striped, PairAlphabet::three_graph());
    d.add_relation("C1", {0});
    d.add_relation("C2", {1});
    d.add_relation("C3", {2});
    d.blocks_ = blocks;
    d.color_ = color;
    d.off_color_ = off_color;
    return d;
}

DomainSpec DomainSpec::striped(std::size_t blocks, PairType color)
{
    return striped(blocks, color, PairType(color == 0 ? 1 : 0));
}

DomainSpec DomainSpec::forbidden(AlphabetRef alphabet, std::vector<FiniteStructure> patterns, PairType no_edge,
                                 std::string source)
{
    for (const auto& p : patterns)
        if (!same_alphabet(p.alphabet_ref(), alphabet))
            throw DomainError("forbidden pattern uses a different alphabet");
    if (no_edge >= alphabet->size())
        throw DomainError("no-edge color outside alphabet");
    DomainSpec d(DomainKind::ForbiddenPatterns, alphabet);
    for (PairType t = 0; t < alphabet->size(); ++t)
        d.add_relation(alphabet->name(t), {t});
    d.forbidden_ = std::move(patterns);
    d.no_edge_ = no_edge;
    d.source_ = std::move(source);
    return d;
}

std::optional<std::size_t> DomainSpec::find_relation(std::string_view name) const
{
    for (std::size_t i = 0; i < relations_.size(); ++i)
        if (relations_[i].name == name)
            return i;
    return std::nullopt;
}

ColorAliases DomainSpec::color_aliases() const
{
    ColorAliases out;
    for (PairType t = 0; t < alphabet_->size(); ++t)
        out.emplace(alphabet_->name(t), t);
    for (const auto& r : relations_) {
        if (r.reflexive || std::count(r.types.begin(), r.types.end(), true) != 1)
            continue;
        out.emplace(r.name, PairType(std::find(r.types.begin(), r.types.end(), true) - r.types.begin()));
    }
    return out;
}

bool DomainSpec::wqo_backed() const
{
    return kind_ != DomainKind::Grid && kind_ != DomainKind::ForbiddenPatterns;
}

std::string DomainSpec::describe() const
{
    switch (kind_) {
    case DomainKind::Equality:
        return "equality";
    case DomainKind::NestedEquality:
        return "nested";
    case DomainKind::DenseOrder:
        return "order";
    case DomainKind::Grid:
        return "grid";
    case DomainKind::Striped:
        return "striped " + std::to_string(blocks_) + " " + alphabet_->name(color_) +
               (off_color_ == (color_ == 0 ? 1 : 0) ? std::string() : " " + alphabet_->name(off_color_));
    case DomainKind::ForbiddenPatterns:
        return source_.empty() ? std::string("forbidden") : "forbidden " + source_;
    }
    return "?";
}

// Age oracles --------------------------------------------------------------

namespace {

/// Class index per vertex for the relation "type t or identity"; nullopt if
/// that relation is not an equivalence.
std::optional<std::vector<std::uint32_t>> equivalence_classes(const FiniteStructure& s, PairType t)
{
    const std::size_t n = s.size();
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    const auto find = [&](std::uint32_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (Vertex v = 1; v < n; ++v)
        for (Vertex u = 0; u < v; ++u)
            if (s.type(u, v) == t)
                parent[find(u)] = find(v);
    std::vector<std::uint32_t> cls(n);
    std::vector<std::int64_t> index(n, -1);
    std::uint32_t next = 0;
    for (Vertex v = 0; v < n; ++v) {
        const auto r = find(v);
        if (index[r] < 0)
            index[r] = next++;
        cls[v] = std::uint32_t(index[r]);
    }
    for (Vertex v = 1; v < n; ++v)
        for (Vertex u = 0; u < v; ++u)
            if ((cls[u] == cls[v]) != (s.type(u, v) == t))
                return std::nullopt;
    return cls;
}

std::size_t class_count(const std::vector<std::uint32_t>& cls)
{
    return cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
}

void check_alphabet(const DomainSpec& d, const FiniteStructure& s)
{
    if (!same_alphabet(d.alphabet(), s.alphabet_ref()))
        throw DomainError("structure alphabet does not match domain " + d.describe());
}

bool strict_order(const FiniteStructure& s)
{
    const std::size_t n = s.size();
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
            if (u != v && s.type(u, v) == 0)
                for (Vertex w = 0; w < n; ++w)
                    if (w != u && w != v && s.type(v, w) == 0 && s.type(u, w) != 0)
                        return false;
    return true;
}

} // namespace

bool age_contains(const DomainSpec& d, const FiniteStructure& s)
{
    check_alphabet(d, s);
    switch (d.kind()) {
    case DomainKind::Equality:
        return true;
    case DomainKind::NestedEquality:
        return equivalence_classes(s, 0).has_value();
    case DomainKind::DenseOrder:
        return strict_order(s);
    case DomainKind::Grid:
        // Two vertices in one =1 block and one =2 block would need both types
        // at once, so block intersections are automatically at most singletons.
        return equivalence_classes(s, 0).has_value() && equivalence_classes(s, 1).has_value();
    case DomainKind::Striped: {
        for (Vertex v = 1; v < s.size(); ++v)
            for (Vertex u = 0; u < v; ++u)
                if (s.type(u, v) != d.stripe_color() && s.type(u, v) != d.stripe_off_color())
                    return false;
        auto cls = equivalence_classes(s, d.stripe_color());
        return cls && class_count(*cls) <= d.stripe_blocks();
    }
    case DomainKind::ForbiddenPatterns:
        for (const auto& p : d.forbidden_patterns())
            if (find_embedding(p, s))
                return false;
        return true;
    }
    return false;
}

std::vector<TypeRow> extension_rows(const DomainSpec& d, const FiniteStructure& s)
{
    if (!age_contains(d, s))
        throw DomainError("extension_rows: structure is not in the age of " + d.describe());
    const std::size_t n = s.size();
    std::vector<TypeRow> rows;
    switch (d.kind()) {
    case DomainKind::Equality:
        rows.emplace_back(n, PairType{0});
        break;
    case DomainKind::NestedEquality: {
        const auto cls = *equivalence_classes(s, 0);
        for (std::uint32_t k = 0; k <= class_count(cls); ++k) {
            TypeRow r(n);
            for (Vertex u = 0; u < n; ++u)
                r[u] = cls[u] == k ? 0 : 1;
            rows.push_back(std::move(r));
        }
        break;
    }
    case DomainKind::DenseOrder: {
        std::vector<std::size_t> rank(n, 0);
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = 0; v < n; ++v)
                if (u != v && s.type(v, u) == 0)
                    ++rank[u];
        for (std::size_t pos = 0; pos <= n; ++pos) {
            TypeRow r(n);
            for (Vertex u = 0; u < n; ++u)
                r[u] = rank[u] < pos ? 0 : 1;
            rows.push_back(std::move(r));
        }
        break;
    }
    case DomainKind::Grid: {
        const auto row_of = *equivalence_classes(s, 0);
        const auto col_of = *equivalence_classes(s, 1);
        const std::size_t nr = class_count(row_of), nc = class_count(col_of);
        std::set<std::pair<std::uint32_t, std::uint32_t>> occupied;
        for (Vertex u = 0; u < n; ++u)
            occupied.emplace(row_of[u], col_of[u]);
        for (std::uint32_t r = 0; r <= nr; ++r)
            for (std::uint32_t c = 0; c <= nc; ++c) {
                if (occupied.count({r, c}))
                    continue;
                TypeRow row(n);
                for (Vertex u = 0; u < n; ++u)
                    row[u] = row_of[u] == r ? 0 : col_of[u] == c ? 1 : 2;
                rows.push_back(std::move(row));
            }
        break;
    }
    case DomainKind::Striped: {
        const auto cls = *equivalence_classes(s, d.stripe_color());
        const std::size_t k = class_count(cls);
        const std::size_t limit = k < d.stripe_blocks() ? k + 1 : k;
        for (std::uint32_t b = 0; b < limit; ++b) {
            TypeRow r(n);
            for (Vertex u = 0; u < n; ++u)
                r[u] = cls[u] == b ? d.stripe_color() : d.stripe_off_color();
            rows.push_back(std::move(r));
        }
        break;
    }
    case DomainKind::ForbiddenPatterns: {
        const std::size_t k = d.alphabet()->size();
        TypeRow r(n, 0);
        while (true) {
            if (age_contains(d, s.extended(r)))
                rows.push_back(r);
            std::size_t i = n;
            while (i > 0 && std::size_t(r[i - 1]) + 1 == k)
                r[--i] = 0;
            if (i == 0)
                break;
            ++r[i - 1];
        }
        break;
    }
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

ClassCountBound class_count_bound(const DomainSpec& d, PairType color, std::size_t probe)
{
    probe = std::max<std::size_t>(probe, 1);
    std::size_t best = 0;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> seen;
    std::function<bool(const FiniteStructure&)> grow = [&](const FiniteStructure& s) {
        best = std::max(best, s.size());
        if (best >= probe)
            return true;
        for (const auto& row : extension_rows(d, s)) {
            if (std::find(row.begin(), row.end(), color) != row.end())
                continue;
            FiniteStructure next = s.extended(row);
            if (!seen.insert(canonical_form(next)).second)
                continue;
            if (grow(next))
                return true;
        }
        return false;
    };
    grow(FiniteStructure(d.alphabet(), 0));
    if (best >= probe)
        return {false, probe};
    return {true, best};
}

// Declarations ---------------------------------------------------------------

namespace {

std::vector<std::string> words(std::string_view text)
{
    std::istringstream is{std::string(text)};
    std::vector<std::string> out;
    for (std::string w; is >> w;)
        out.push_back(w);
    return out;
}

} // namespace

DomainSpec forbidden_from_text(std::string_view text, std::string source_text)
{
    const AlphabetRef& alphabet = PairAlphabet::three_graph();
    PairType no_edge = PairType(alphabet->size() - 1);
    std::vector<std::string> lines;
    {
        std::istringstream is{std::string(text)};
        for (std::string line; std::getline(is, line);) {
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            auto w = words(line);
            if (w.empty())
                continue;
            if (w[0] == "noedge") {
                if (w.size() != 2 || !alphabet->find(w[1]))
                    throw DomainError("pattern file: bad noedge directive: " + line);
                no_edge = *alphabet->find(w[1]);
                continue;
            }
            lines.push_back(line);
        }
    }
    std::vector<FiniteStructure> patterns;
    for (const auto& line : lines)
        patterns.push_back(build_pattern(line, alphabet, no_edge));
    return DomainSpec::forbidden(alphabet, std::move(patterns), no_edge, std::move(source_text));
}

DomainSpec load_forbidden_patterns(const std::filesystem::path& file, std::string source_text)
{
    std::ifstream in(file);
    if (!in)
        throw DomainError("cannot open pattern file " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return forbidden_from_text(buf.str(), source_text.empty() ? file.string() : std::move(source_text));
}

DomainSpec parse_domain(std::string_view text, const std::filesystem::path& base_dir)
{
    const auto w = words(text);
    if (w.empty())
        throw DomainError("empty domain declaration");
    const auto arity = [&](std::size_t k) {
        if (w.size() != k)
            throw DomainError("domain '" + w[0] + "' takes " + std::to_string(k - 1) + " argument(s)");
    };
    if (w[0] == "equality") {
        arity(1);
        return DomainSpec::equality();
    }
    if (w[0] == "nested") {
        arity(1);
        return DomainSpec::nested_equality();
    }
    if (w[0] == "order") {
        arity(1);
        return DomainSpec::dense_order();
    }
    if (w[0] == "grid") {
        arity(1);
        return DomainSpec::grid();
    }
    if (w[0] == "striped") {
        if (w.size() != 3 && w.size() != 4)
            throw DomainError("usage: striped <k> <color> [<off-color>]");
        std::size_t k = 0;
        auto [p, ec] = std::from_chars(w[1].data(), w[1].data() + w[1].size(), k);
        if (ec != std::errc() || p != w[1].data() + w[1].size() || k < 1)
            throw DomainError("striped: block count must be a positive integer");
        const auto& alphabet = PairAlphabet::three_graph();
        auto c = alphabet->find(w[2]);
        if (!c)
            throw DomainError("striped: unknown color " + w[2]);
        if (w.size() == 4) {
            auto off = alphabet->find(w[3]);
            if (!off)
                throw DomainError("striped: unknown color " + w[3]);
            return DomainSpec::striped(k, *c, *off);
        }
        return DomainSpec::striped(k, *c);
    }
    if (w[0] == "forbidden") {
        if (w.size() == 1)
            return forbidden_from_text("", "");
        arity(2);
        std::filesystem::path file(w[1]);
        if (file.is_relative() && !base_dir.empty())
            file = base_dir / file;
        return load_forbidden_patterns(file, w[1]);
    }
    throw DomainError("unknown domain '" + w[0] + "'");
}

} // namespace dnets
