#include "cli.hpp"

#include "dnets/analysis.hpp"
#include "dnets/classifier.hpp"
#include "dnets/reduction.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dnets::cli {

namespace {

using nlohmann::json;

struct Options {
    bool json = false;
    std::string output;
    std::vector<std::string> inputs;
    std::size_t budget = 0;
    std::size_t depth = 0;
    std::uint64_t seed = 0;
    std::size_t steps = 10;
    std::size_t bound = 0;
    bool strong = false;
    bool random = false;
    bool exhaustive = false;
    std::string script;
    std::string target;
    std::string problem;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json structure_json(const FiniteStructure& s)
{
    json pairs = json::array();
    for (Vertex v = 1; v < s.size(); ++v)
        for (Vertex u = 0; u < v; ++u)
            pairs.push_back(json::array({u, v, s.alphabet().name(s.type(u, v))}));
    return {{"size", s.size()}, {"pairs", pairs}};
}

std::string structure_text(const FiniteStructure& s)
{
    std::ostringstream o;
    o << s.size() << " vertices";
    const char* sep = ": ";
    for (Vertex v = 1; v < s.size(); ++v)
        for (Vertex u = 0; u < v; ++u) {
            o << sep << u << "-" << v << " " << s.alphabet().name(s.type(u, v));
            sep = ", ";
        }
    return o.str();
}

json event_json(const DataNet& net, const FiringEvent& e, const Configuration& after)
{
    const Transition& t = net.transitions[e.transition];
    const std::size_t base = e.carrier.size() - e.fresh;
    json inputs = json::object(), outputs = json::object();
    for (std::size_t x = 0; x < t.vars.size(); ++x) {
        if (t.is_input(x))
            inputs[t.vars[x]] = e.valuation[x];
        else
            outputs[t.vars[x]] = {{"vertex", e.valuation[x]}, {"fresh", e.valuation[x] >= base}};
    }
    return {{"transition", t.name},
            {"inputs", inputs},
            {"outputs", outputs},
            {"successor", after.key().hex()},
            {"configuration", configuration_to_string(net, after)}};
}

json trace_json(const DataNet& net, const Trace& trace)
{
    json steps = json::array();
    for (const TraceStep& s : trace.steps)
        steps.push_back(event_json(net, s.event, s.after));
    return {{"initial", {{"key", trace.initial.key().hex()},
                         {"configuration", configuration_to_string(net, trace.initial)}}},
            {"steps", steps},
            {"maximal", trace.maximal}};
}

void print_trace(std::ostream& o, const DataNet& net, const Trace& trace)
{
    o << "initial:\n" << configuration_to_string(net, trace.initial);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep& s = trace.steps[i];
        o << "step " << i + 1 << ": " << net.transitions[s.event.transition].name << "\n"
          << configuration_to_string(net, s.after);
    }
    if (trace.maximal)
        o << "no transition enabled\n";
}

int exit_for(Outcome o)
{
    switch (o) {
    case Outcome::Proven: return Success;
    case Outcome::Refuted: return Refuted;
    case Outcome::Inconclusive: return Inconclusive;
    }
    return Inconclusive;
}

DataNet load_input_net(const Options& opt)
{
    if (opt.inputs.size() != 1)
        throw UsageError("expected exactly one net file");
    return load_net(opt.inputs[0]);
}

Configuration initial_of(const DataNet& net) { return net.initial ? *net.initial : net.empty_configuration(); }

DomainSpec input_domain(const Options& opt)
{
    if (opt.inputs.empty())
        throw UsageError("expected a domain declaration");
    std::string text;
    for (const std::string& s : opt.inputs)
        text += (text.empty() ? "" : " ") + s;
    return parse_domain(text, std::filesystem::current_path());
}

int cmd_simulate(const Options& opt, std::ostream& o)
{
    const DataNet net = load_input_net(opt);
    const Configuration c0 = initial_of(net);
    if (int(opt.random) + int(opt.exhaustive) + int(!opt.script.empty()) > 1)
        throw UsageError("choose one of --random, --exhaustive, --script");
    if (opt.exhaustive) {
        const ExplorationTree tree = simulate(net, c0, ExhaustivePolicy{opt.depth, opt.budget ? opt.budget : 100000});
        if (opt.json) {
            json nodes = json::array();
            for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
                const TreeNode& n = tree.nodes[i];
                json j = {{"index", i},
                          {"depth", n.depth},
                          {"key", n.config.key().hex()},
                          {"configuration", configuration_to_string(net, n.config)}};
                j["parent"] = n.parent ? json(*n.parent) : json(nullptr);
                if (n.event)
                    j["event"] = event_json(net, *n.event, n.config);
                nodes.push_back(j);
            }
            o << json{{"mode", "exhaustive"}, {"depth", opt.depth}, {"nodes", nodes}, {"truncated", tree.truncated}}
                     .dump(2)
              << "\n";
        } else {
            for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
                const TreeNode& n = tree.nodes[i];
                o << "node " << i << " depth " << n.depth;
                if (n.parent)
                    o << " parent " << *n.parent << " via " << net.transitions[n.event->transition].name;
                o << "\n" << configuration_to_string(net, n.config);
            }
            if (tree.truncated)
                o << "truncated at " << tree.nodes.size() << " nodes\n";
        }
        return Success;
    }
    Trace trace = [&] {
        if (!opt.script.empty()) {
            ScriptPolicy p;
            std::istringstream in(opt.script);
            std::string item;
            while (std::getline(in, item, ','))
                p.choices.push_back(std::stoul(item));
            return simulate(net, c0, p);
        }
        return simulate(net, c0, RandomPolicy{opt.seed, opt.steps});
    }();
    if (opt.json)
        o << trace_json(net, trace).dump(2) << "\n";
    else
        print_trace(o, net, trace);
    return Success;
}

AnalysisBudget budget_of(const Options& opt)
{
    AnalysisBudget b;
    if (opt.budget) {
        b.max_nodes = opt.budget;
        b.max_basis = opt.budget;
    }
    if (opt.depth)
        b.max_depth = opt.depth;
    return b;
}

int cmd_analyze(const Options& opt, std::ostream& o, std::ostream& err)
{
    const auto problem = problem_from_string(opt.problem);
    if (!problem)
        throw UsageError("unknown problem '" + opt.problem + "' (termination, boundedness, coverability)");
    const DataNet net = load_input_net(opt);
    const Configuration c0 = initial_of(net);
    const AnalysisBudget budget = budget_of(opt);
    std::vector<Configuration> targets;
    Verdict v;
    switch (*problem) {
    case Problem::Termination: v = termination(net, c0, budget); break;
    case Problem::Boundedness: v = boundedness(net, c0, budget); break;
    case Problem::Coverability:
        if (opt.target.empty())
            throw UsageError("coverability needs --target");
        targets = parse_target(net, opt.target);
        v = coverability(net, c0, targets, budget);
        break;
    }
    const std::string certificate_issue = check_certificate(net, c0, targets, v);
    if (!certificate_issue.empty())
        err << "warning: certificate check failed: " << certificate_issue << "\n";

    if (opt.json) {
        json j = {{"problem", to_string(v.problem)},
                  {"outcome", to_string(v.outcome)},
                  {"result", v.result},
                  {"wqo_backed", v.wqo_backed},
                  {"stats",
                   {{"nodes", v.stats.nodes},
                    {"basis", v.stats.basis},
                    {"depth", v.stats.depth},
                    {"millis", v.stats.millis}}}};
        if (v.run) {
            json w = {{"trace", trace_json(net, *v.run)}};
            if (v.ancestor_index)
                w["ancestor_index"] = *v.ancestor_index;
            if (v.problem == Problem::Coverability && !v.basis.empty())
                w["covered_target"] = configuration_to_string(net, v.basis.front());
            w["replayed"] = certificate_issue.empty();
            j["witness"] = w;
        } else if (v.outcome != Outcome::Inconclusive) {
            json c;
            if (v.problem == Problem::Coverability) {
                json basis = json::array();
                for (const Configuration& b : v.basis)
                    basis.push_back(configuration_to_string(net, b));
                c = {{"kind", "closed-basis"}, {"basis", basis}};
            } else {
                c = {{"kind", v.problem == Problem::Termination ? "finite-tree" : "finite-reachability"},
                     {"explored", v.explored}};
            }
            c["checked"] = certificate_issue.empty();
            j["certificate"] = c;
        }
        if (!net.domain.equality_definable())
            j["notes"] = json::array({"x = y is read as node identity; the domain does not define it"});
        o << j.dump(2) << "\n";
    } else {
        o << to_string(v.problem) << ": " << to_string(v.outcome) << " (" << v.result << ")\n";
        o << "nodes " << v.stats.nodes << ", basis " << v.stats.basis << ", depth " << v.stats.depth << ", "
          << v.stats.millis << " ms\n";
        if (!v.wqo_backed && v.outcome == Outcome::Inconclusive)
            o << "domain is not wqo-backed: a larger budget need not help\n";
        if (v.run) {
            if (v.ancestor_index)
                o << "configuration " << *v.ancestor_index << " of the run is below its last one\n";
            print_trace(o, net, *v.run);
        } else if (v.outcome == Outcome::Refuted && v.problem == Problem::Coverability) {
            o << "closed basis of " << v.basis.size() << " configurations excludes the initial one\n";
        }
    }
    return exit_for(v.outcome);
}

int cmd_compile(const Options& opt, std::ostream& o)
{
    if (opt.inputs.size() != 1)
        throw UsageError("expected exactly one machine file");
    const MinskyMachine m = parse_machine(read_file(opt.inputs[0]));
    const CompiledNet cn = compile(m);
    const std::string text = unparse(cn.net);
    if (opt.output.empty()) {
        o << text;
        return Success;
    }
    std::ofstream f(opt.output);
    if (!(f << text))
        throw InputError("cannot write " + opt.output);
    if (opt.json)
        o << json{{"output", opt.output},
                  {"places", cn.net.places.size()},
                  {"transitions", cn.net.transitions.size()},
                  {"halt_place", cn.net.places[cn.halt_place]}}
                 .dump(2)
          << "\n";
    return Success;
}

json instance_json(const DomainSpec& d, const AmalgamInstance& inst)
{
    const auto [left, right] = instance_rows(inst);
    const auto names = [&](const TypeRow& r) {
        json a = json::array();
        for (PairType t : r)
            a.push_back(d.alphabet()->name(t));
        return a;
    };
    return {{"shared", structure_json(inst.shared)}, {"left_row", names(left)}, {"right_row", names(right)}};
}

std::string instance_text(const DomainSpec& d, const AmalgamInstance& inst)
{
    const auto [left, right] = instance_rows(inst);
    std::ostringstream o;
    o << "shared " << structure_text(inst.shared) << "; a:";
    for (PairType t : left)
        o << " " << d.alphabet()->name(t);
    o << "; b:";
    for (PairType t : right)
        o << " " << d.alphabet()->name(t);
    return o.str();
}

json report_json(const DomainSpec& d, const CaseReport& r)
{
    const auto color = [&](Color c) { return color_name(d, c); };
    json empty = json::array();
    for (Color c : r.empty_colors)
        empty.push_back(color(c));
    json a = {{"witnessed", r.a.witnessed}};
    if (r.a.witnessed) {
        a["c"] = color(r.a.c);
        a["a"] = color(r.a.a);
        a["x"] = color(r.a.x);
        a["clique"] = structure_json(r.a.clique);
        a["triangle_axc"] = structure_json(r.a.triangle_axc);
        a["triangle_acc"] = structure_json(r.a.triangle_acc);
    }
    json b = json::array();
    for (const TransitivityCheck& t : r.b) {
        json j = {{"x", color(t.x)}, {"y", color(t.y)}, {"holds", t.holds}, {"vacuous", t.vacuous}};
        if (t.counterexample)
            j["counterexample"] = structure_json(*t.counterexample);
        b.push_back(j);
    }
    json c = json::array();
    for (const CaseC& x : r.c) {
        json j = {{"x", color(x.x)},
                  {"transitive", x.transitive},
                  {"vacuous", x.vacuous},
                  {"large_clique", x.large_clique},
                  {"classes", {{"exact", x.classes.exact}, {"value", x.classes.value}}},
                  {"witnessed", x.witnessed}};
        if (x.counterexample)
            j["counterexample"] = structure_json(*x.counterexample);
        c.push_back(j);
    }
    json dd = json::array();
    for (const PathCheck& p : r.d)
        dd.push_back({{"i", color(p.i)},
                      {"j", color(p.j)},
                      {"distinct", p.i != p.j},
                      {"length", p.path.length},
                      {"witnessed", p.witnessed},
                      {"witness", structure_json(p.path.witness)}});
    return {{"domain", r.domain},
            {"bound", r.bound},
            {"empty_colors", empty},
            {"equality_definable", d.equality_definable()},
            {"cases",
             {{"A", a},
              {"B", {{"witnessed", r.b_witnessed()}, {"checks", b}}},
              {"C", {{"witnessed", r.c_witnessed()}, {"checks", c}}},
              {"D", {{"witnessed", r.d_witnessed()}, {"checks", dd}}}}}};
}

void print_report(std::ostream& o, const DomainSpec& d, const CaseReport& r)
{
    const auto color = [&](Color c) { return color_name(d, c); };
    o << "domain " << r.domain << ", bound " << r.bound << "\n";
    o << "A: ";
    if (r.a.witnessed)
        o << "witnessed (c = " << color(r.a.c) << ", a = " << color(r.a.a) << ", x = " << color(r.a.x) << ")\n";
    else
        o << "not witnessed\n";
    o << "B: " << (r.b_witnessed() ? "witnessed" : "not witnessed") << "\n";
    for (const TransitivityCheck& t : r.b)
        if (t.holds)
            o << "  " << color(t.x) << " + " << color(t.y) << " is a disjoint-clique relation"
              << (t.vacuous ? " (involves an empty color)" : "") << "\n";
    o << "C: " << (r.c_witnessed() ? "witnessed" : "not witnessed") << "\n";
    for (const CaseC& x : r.c)
        if (x.witnessed)
            o << "  " << color(x.x) << ": " << x.classes.value << " classes\n";
    o << "D: " << (r.d_witnessed() ? "witnessed" : "not witnessed") << "\n";
    for (const PathCheck& p : r.d)
        o << "  " << color(p.i) << " + " << color(p.j) << ": longest path " << p.path.length << "\n";
    if (!r.empty_colors.empty()) {
        o << "empty colors:";
        for (Color c : r.empty_colors)
            o << " " << color(c);
        o << "\n";
    }
    o << "evidence at bound " << r.bound << " only, not a proof\n";
}

int cmd_classify(const Options& opt, std::ostream& o)
{
    const DomainSpec d = input_domain(opt);
    const CaseReport r = case_evidence(d, opt.bound ? opt.bound : 6);
    const std::string invalid = validate_report(d, r);
    if (!invalid.empty())
        throw std::logic_error("report does not re-validate: " + invalid);
    std::vector<AmalgamInstance> failures;
    if (opt.strong)
        failures = audit_amalgamation(d, 2, true);
    if (opt.json) {
        json j = report_json(d, r);
        if (opt.strong) {
            json f = json::array();
            for (const AmalgamInstance& inst : failures)
                f.push_back(instance_json(d, inst));
            j["strong_amalgamation"] = {{"max_shared", 2}, {"failures", f}};
        }
        o << j.dump(2) << "\n";
    } else {
        print_report(o, d, r);
        if (opt.strong)
            o << "strong amalgamation failures (shared size <= 2): " << failures.size() << "\n";
    }
    return Success;
}

int cmd_amalgam(const Options& opt, std::ostream& o)
{
    const DomainSpec d = input_domain(opt);
    const std::size_t max_shared = opt.bound ? opt.bound : 2;
    const auto failures = audit_amalgamation(d, max_shared, opt.strong);
    if (opt.json) {
        json f = json::array();
        for (const AmalgamInstance& inst : failures)
            f.push_back(instance_json(d, inst));
        o << json{{"domain", d.describe()}, {"max_shared", max_shared}, {"strong", opt.strong}, {"failures", f}}
                 .dump(2)
          << "\n";
    } else {
        o << failures.size() << " failing " << (opt.strong ? "strong " : "") << "singleton instances with shared size <= "
          << max_shared << "\n";
        for (const AmalgamInstance& inst : failures)
            o << "  " << instance_text(d, inst) << "\n";
    }
    return failures.empty() ? Success : Refuted;
}

int cmd_wqo_check(const Options& opt, std::ostream& o)
{
    const DomainSpec d = input_domain(opt);
    const std::size_t bound = opt.bound ? opt.bound : 6;
    json j = {{"domain", d.describe()}, {"wqo_backed", d.wqo_backed()}, {"bound", bound}};
    std::optional<PathCheck> best;
    bool antichain = false;
    if (d.alphabet()->is_three_graph()) {
        for (Color i = 0; i < d.alphabet()->size(); ++i)
            for (Color k = i; k < d.alphabet()->size(); ++k) {
                PathResult p = longest_induced_path(d, i, k, bound);
                if (!best || p.length > best->path.length)
                    best = PathCheck{i, k, std::move(p), false};
            }
        // Paths with marked ends: one per length, pairwise incomparable.
        std::vector<LabeledStructure<std::size_t>> xs;
        for (std::size_t len = 1; len <= best->path.length; ++len) {
            std::vector<Vertex> keep(len + 1);
            for (std::size_t v = 0; v <= len; ++v)
                keep[v] = Vertex(v);
            std::vector<std::size_t> labels(len + 1, 0);
            labels.front() = labels.back() = 1;
            xs.push_back({induced(best->path.witness, keep), labels});
        }
        const AntichainCheck check = is_antichain(xs, natural_leq);
        antichain = check.antichain && best->path.length >= bound;
        j["path"] = {{"i", color_name(d, best->i)},
                     {"j", color_name(d, best->j)},
                     {"length", best->path.length},
                     {"witness", structure_json(best->path.witness)}};
        j["antichain"] = {{"size", xs.size()}, {"verified", check.antichain}};
    }
    j["verdict"] = antichain ? "antichain" : d.wqo_backed() ? "wqo" : "unknown";
    if (opt.json) {
        o << j.dump(2) << "\n";
    } else {
        o << "domain " << d.describe() << (d.wqo_backed() ? " is" : " is not") << " wqo-backed\n";
        if (best)
            o << "longest induced path (" << color_name(d, best->i) << " + " << color_name(d, best->j)
              << "): " << best->path.length << "\n";
        if (antichain)
            o << "end-marked paths of lengths 1.." << best->path.length << " form an antichain\n";
    }
    return antichain ? Refuted : d.wqo_backed() ? Success : Inconclusive;
}

void add_common(CLI::App* sub, Options& opt)
{
    sub->add_flag("--json", opt.json, "emit one JSON document");
    sub->add_option("-o", opt.output, "write the primary output to PATH");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options opt;
    CLI::App app{"Petri nets with data over homogeneous domains", "datanet"};
    app.require_subcommand(1, 1);

    auto* simulate_cmd = app.add_subcommand("simulate", "run a net");
    add_common(simulate_cmd, opt);
    simulate_cmd->add_option("net", opt.inputs, "net file (.dnet)")->required();
    simulate_cmd->add_flag("--random", opt.random, "random run (default)");
    simulate_cmd->add_flag("--exhaustive", opt.exhaustive, "reachability tree up to --depth");
    simulate_cmd->add_option("--script", opt.script, "comma-separated event indices");
    simulate_cmd->add_option("--seed", opt.seed, "random seed");
    simulate_cmd->add_option("--steps", opt.steps, "random run length");
    simulate_cmd->add_option("--depth", opt.depth, "exhaustive depth");
    simulate_cmd->add_option("--budget", opt.budget, "node limit")->check(CLI::PositiveNumber);

    auto* analyze_cmd = app.add_subcommand("analyze", "decide termination, boundedness or coverability");
    add_common(analyze_cmd, opt);
    analyze_cmd->add_option("net", opt.inputs, "net file (.dnet)")->required();
    analyze_cmd->add_option("--problem", opt.problem, "termination | boundedness | coverability")->required();
    analyze_cmd->add_option("--budget", opt.budget, "node and basis limit")->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--depth", opt.depth, "depth limit")->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--target", opt.target, "coverability target, e.g. \"p>=1\"");

    auto* compile_cmd = app.add_subcommand("compile-mm", "compile a two-counter machine to a grid net");
    add_common(compile_cmd, opt);
    compile_cmd->add_option("machine", opt.inputs, "machine file (.mm)")->required();

    auto* classify_cmd = app.add_subcommand("classify", "bounded structural evidence for a 3-graph domain");
    add_common(classify_cmd, opt);
    classify_cmd->add_option("domain", opt.inputs, "domain declaration")->required();
    classify_cmd->add_option("--bound", opt.bound, "probe size")->check(CLI::PositiveNumber);
    classify_cmd->add_flag("--strong", opt.strong, "also audit strong amalgamation");

    auto* amalgam_cmd = app.add_subcommand("amalgam", "audit singleton amalgamation instances");
    add_common(amalgam_cmd, opt);
    amalgam_cmd->add_option("domain", opt.inputs, "domain declaration")->required();
    amalgam_cmd->add_option("--bound", opt.bound, "largest shared part")->check(CLI::PositiveNumber);
    amalgam_cmd->add_flag("--strong", opt.strong, "require strong solutions");

    auto* wqo_cmd = app.add_subcommand("wqo-check", "look for an antichain of end-marked induced paths");
    add_common(wqo_cmd, opt);
    wqo_cmd->add_option("domain", opt.inputs, "domain declaration")->required();
    wqo_cmd->add_option("--bound", opt.bound, "probe size")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return Usage;
    }

    std::ostringstream primary;
    const bool compile_mode = compile_cmd->parsed();
    try {
        int code = Success;
        if (simulate_cmd->parsed())
            code = cmd_simulate(opt, primary);
        else if (analyze_cmd->parsed())
            code = cmd_analyze(opt, primary, err);
        else if (compile_mode)
            code = cmd_compile(opt, primary);
        else if (classify_cmd->parsed())
            code = cmd_classify(opt, primary);
        else if (amalgam_cmd->parsed())
            code = cmd_amalgam(opt, primary);
        else
            code = cmd_wqo_check(opt, primary);

        if (!opt.output.empty() && !compile_mode) {
            std::ofstream f(opt.output);
            if (!(f << primary.str())) {
                err << "error: cannot write " << opt.output << "\n";
                return NoInput;
            }
        } else {
            out << primary.str();
        }
        return code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return Usage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return NoInput;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return DataError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return DataError;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return DataError;
    }
}

} // namespace dnets::cli
