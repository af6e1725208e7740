// Command-line front end.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "limp/derivation.hpp"
#include "limp/operational.hpp"
#include "limp/realizability.hpp"
#include "limp/suites.hpp"
#include "limp/text.hpp"
#include "limp/typing.hpp"

using json = nlohmann::ordered_json;
using namespace limp;

namespace {

enum Exit { kOk = 0, kFalse = 1, kExhausted = 2, kInput = 3 };

struct Flags {
    std::size_t fuel = default_fuel();
    bool json_out = false;
    bool unicode = false;
    unsigned depth = 6;
    std::string budget = "50,500,8";
    std::uint64_t seed = 0;
    std::string batch;
    std::string output;
    std::string suite;
};

std::string slurp(std::istream& in) {
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// `@path` reads a file, `-` reads stdin, anything else is the text itself.
std::string input_text(const std::string& arg) {
    if (arg == "-") return slurp(std::cin);
    if (!arg.empty() && arg[0] == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw InputInvalid("cannot read " + arg.substr(1));
        return slurp(in);
    }
    return arg;
}

// A computation runs from emp; a pair is a configuration.
Configuration parse_program(const std::string& text) {
    std::size_t i = text.find_first_not_of(" \t\r\n");
    if (i != std::string::npos && text[i] == '(') {
        try {
            return parse_config(text);
        } catch (const ParseError&) {
        }
    }
    return {parse_comp(text), emp()};
}

json deriv_json(const Deriv& d, bool uni) {
    json ps = json::array();
    for (const auto& p : d->premises) ps.push_back(deriv_json(p, uni));
    return {{"rule", rule_name(d->rule)},
            {"subject", render(d->subject, uni)},
            {"type", render(d->type, uni)},
            {"premises", ps}};
}

int outcome_exit(RunOutcome::Kind k) {
    switch (k) {
    case RunOutcome::Kind::Converged: return kOk;
    case RunOutcome::Kind::Blocked: return kFalse;
    case RunOutcome::Kind::FuelExhausted: return kExhausted;
    }
    return kInput;
}

const char* step_rule_name(StepRule r) {
    switch (r) {
    case StepRule::Beta: return "beta";
    case StepRule::BindContext: return "bind";
    case StepRule::Get: return "get";
    case StepRule::Set: return "set";
    }
    return "?";
}

Budget parse_budget(const std::string& s) {
    Budget b;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> b.max_samples >> c1 >> b.fuel >> c2 >> b.max_term_size) || c1 != ',' || c2 != ',' || !in.eof())
        throw InputInvalid("budget must be SAMPLES,FUEL,SIZE");
    validate(b);
    return b;
}

// ------------------------------------------------------------- commands

int cmd_eval(const std::string& in, const Flags& f) {
    Configuration c = parse_program(in);
    RunOutcome o = run(c, f.fuel);
    if (f.json_out) {
        json j = {{"outcome", outcome_name(o.kind)}, {"steps", o.steps}};
        if (o.kind == RunOutcome::Kind::Converged) {
            j["value"] = render(o.value, f.unicode);
            j["store"] = render(o.store, f.unicode);
        } else {
            j["config"] = render(o.config, f.unicode);
        }
        std::cout << j.dump() << "\n";
    } else if (o.kind == RunOutcome::Kind::Converged) {
        std::cout << "converged in " << o.steps << " steps: " << render(o.value, f.unicode) << ", "
                  << render(o.store, f.unicode) << "\n";
    } else {
        std::cout << outcome_name(o.kind) << " after " << o.steps << " steps at " << render(o.config, f.unicode) << "\n";
    }
    return outcome_exit(o.kind);
}

int cmd_trace(const std::string& in, const Flags& f) {
    std::vector<Configuration> tr;
    RunOutcome o = run(parse_program(in), f.fuel, &tr);
    if (f.json_out) {
        json arr = json::array();
        for (std::size_t i = 0; i < tr.size(); ++i) {
            auto rule = redex_rule(tr[i]);
            json step = {{"index", i},
                         {"comp", render(tr[i].comp, f.unicode)},
                         {"store", render(tr[i].store, f.unicode)},
                         {"rule", i + 1 < tr.size() && rule ? json(step_rule_name(*rule)) : json(nullptr)}};
            if (i + 1 == tr.size()) step["outcome"] = outcome_name(o.kind);
            arr.push_back(step);
        }
        std::cout << arr.dump() << "\n";
    } else {
        for (const auto& c : tr) std::cout << render(c, f.unicode) << "\n";
        std::cout << "# " << outcome_name(o.kind) << "\n";
    }
    return outcome_exit(o.kind);
}

int cmd_store_nf(const std::string& in, const Flags& f) {
    Store s = normal_form(parse_store(in));
    if (f.json_out)
        std::cout << json{{"nf", render(s, f.unicode)}}.dump() << "\n";
    else
        std::cout << render(s, f.unicode) << "\n";
    return kOk;
}

int print_bool(bool b, const Flags& f) {
    if (f.json_out)
        std::cout << json{{"result", b}}.dump() << "\n";
    else
        std::cout << (b ? "true" : "false") << "\n";
    return b ? kOk : kFalse;
}

int cmd_store_eq(const std::string& a, const std::string& b, const Flags& f) {
    return print_bool(store_eq(parse_store(a), parse_store(b)), f);
}

int cmd_subtype(const std::string& a, const std::string& b, const Flags& f) {
    return print_bool(subtype(normalize_type(parse_type(a)), normalize_type(parse_type(b))), f);
}

void emit_derivation(const Judgment& j, const Flags& f) {
    std::string text = f.json_out ? deriv_json(j.root, f.unicode).dump(2) + "\n" : render_derivation(j, f.unicode);
    if (f.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(f.output);
    if (!out) throw InputInvalid("cannot write " + f.output);
    out << text;
}

int cmd_typecheck(const std::string& in, const Flags& f) {
    Judgment j = parse_derivation(in);
    CheckResult r = check_derivation(j.context, j.root);
    if (f.json_out) {
        json j2 = {{"ok", r.ok}};
        if (!r.ok) {
            j2["path"] = r.path;
            j2["reason"] = reason_name(r.reason);
            j2["message"] = r.message;
        }
        std::cout << j2.dump() << "\n";
    } else {
        std::cout << (r.ok ? "Ok" : "Err " + r.describe()) << "\n";
    }
    return r.ok ? kOk : kFalse;
}

int cmd_certify(const std::string& in, const Flags& f) {
    CertifyResult r = certify_convergence(parse_comp(in), f.fuel);
    if (!r.ok) {
        std::cerr << "not certified: " << outcome_name(r.outcome.kind) << "\n";
        return outcome_exit(r.outcome.kind);
    }
    emit_derivation({{}, r.cert.term}, f);
    return kOk;
}

int cmd_search(const std::string& in, const std::string& type, const Flags& f) {
    Comp m = parse_comp(in);
    Deriv d = search_typing({}, m, parse_type(type), f.depth);
    if (!d) {
        std::cout << (f.json_out ? "{\"result\":\"not-found\"}" : "NotFound") << "\n";
        return kFalse;
    }
    emit_derivation({{}, d}, f);
    return kOk;
}

json probe_json(const Probe& p, bool uni) {
    if (p.kind == Probe::Kind::Argument) return {{"argument", render(p.arg, uni)}};
    return {{"store", render(p.store, uni)}};
}

int cmd_member(const std::string& in, const std::string& type, const Flags& f) {
    Budget b = parse_budget(f.budget);
    Raw t = parse_type(type);
    MembershipVerdict v;
    switch (t->sort) {
    case Sort::D: v = member(parse_value(in), t, b, f.seed); break;
    case Sort::S: v = member(parse_store(in), t, b, f.seed); break;
    case Sort::T: v = member(parse_comp(in), t, b, f.seed); break;
    case Sort::C: {
        Configuration c = parse_config(in);
        v = member(result_of(run(c, b.fuel)), t, b, f.seed);
        break;
    }
    }
    if (f.json_out) {
        json j = {{"verdict", membership_name(v.verdict)},
                  {"exhaustive", v.exhaustive},
                  {"budget", {{"samples", b.max_samples}, {"fuel", b.fuel}, {"size", b.max_term_size}}},
                  {"seed", f.seed}};
        if (v.witness) {
            json inputs = json::array();
            for (const auto& p : v.witness->inputs) inputs.push_back(probe_json(p, f.unicode));
            j["witness"] = {{"inputs", inputs}, {"observed", v.witness->observed}};
        }
        std::cout << j.dump() << "\n";
    } else {
        std::cout << membership_name(v.verdict) << (v.exhaustive ? " (exhaustive)" : "");
        if (v.witness) {
            std::cout << "; witness:";
            for (const auto& p : v.witness->inputs)
                std::cout << " " << (p.kind == Probe::Kind::Argument ? render(p.arg, f.unicode) : render(p.store, f.unicode));
            std::cout << " -> " << v.witness->observed;
        }
        std::cout << "\n";
    }
    switch (v.verdict) {
    case Membership::Yes: return kOk;
    case Membership::No: return kFalse;
    case Membership::Unknown: return kExhausted;
    }
    return kInput;
}

int cmd_proptest(const Flags& f) {
    std::vector<std::string> names = suite_names();
    if (!f.suite.empty()) {
        if (std::find(names.begin(), names.end(), f.suite) == names.end())
            throw InputInvalid("unknown suite " + f.suite);
        names = {f.suite};
    }
    SuiteOptions opt;
    if (f.seed) opt.seed = f.seed;
    bool ok = true;
    json arr = json::array();
    for (const auto& n : names) {
        SuiteReport r = run_suite(n, opt);
        ok = ok && r.pass;
        if (f.json_out) {
            arr.push_back({{"suite", r.name},
                           {"criterion", r.criterion},
                           {"pass", r.pass},
                           {"cases", r.cases},
                           {"failures", r.failures},
                           {"detail", r.detail},
                           {"examples", r.examples}});
        } else {
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.cases << " cases, " << r.failures
                      << " failures; " << r.detail << "\n";
            for (const auto& e : r.examples) std::cout << "    " << e << "\n";
        }
    }
    if (f.json_out) std::cout << arr.dump() << "\n";
    return ok ? kOk : kFalse;
}

// Runs `one` on every non-blank line; the exit code is the largest seen.
int for_inputs(const std::string& arg, const Flags& f, const std::function<int(const std::string&)>& one) {
    if (f.batch.empty()) return one(input_text(arg));
    std::string text = f.batch == "-" ? slurp(std::cin) : input_text("@" + f.batch);
    std::istringstream lines(text);
    std::string line;
    int worst = kOk;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
        int code;
        try {
            code = one(line);
        } catch (const Error& e) {
            std::cout << "error: " << e.what() << "\n";
            code = kInput;
        }
        worst = std::max(worst, code);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interpreter, type checker and property tester for an imperative lambda calculus"};
    app.require_subcommand(1);
    Flags f;
    std::string a, b;

    auto common = [&](CLI::App* c) {
        c->add_flag("--json", f.json_out, "structured output");
        c->add_flag("--unicode", f.unicode, "render with unicode symbols");
    };
    auto fuel = [&](CLI::App* c) {
        c->add_option("--fuel", f.fuel, "maximum number of reduction steps (default from LIMP_FUEL or 10000)")
            ->check(CLI::PositiveNumber);
    };
    auto batch = [&](CLI::App* c) {
        c->add_option("--batch", f.batch, "read one input per line from FILE ('-' for stdin)");
    };

    auto* eval = app.add_subcommand("eval", "run a computation or configuration");
    eval->add_option("program", a, "program text, @file or -");
    common(eval), fuel(eval), batch(eval);

    auto* trace = app.add_subcommand("trace", "print every configuration of a run");
    trace->add_option("program", a, "program text, @file or -");
    common(trace), fuel(trace), batch(trace);

    auto* nf = app.add_subcommand("store-nf", "normal form of a store term");
    nf->add_option("store", a, "store text, @file or -");
    common(nf), batch(nf);

    auto* seq = app.add_subcommand("store-eq", "decide equality of two store terms");
    seq->add_option("s", a)->required();
    seq->add_option("t", b)->required();
    common(seq);

    auto* sub = app.add_subcommand("subtype", "decide a subtyping judgment A <= B");
    sub->add_option("a", a)->required();
    sub->add_option("b", b)->required();
    common(sub);

    auto* tc = app.add_subcommand("typecheck", "check a derivation file");
    tc->add_option("file", a, "derivation file (or - for stdin)")->required();
    common(tc);

    auto* cert = app.add_subcommand("certify", "derive |- M : wS -> wD x wS for a converging M");
    cert->add_option("program", a, "computation text, @file or -");
    cert->add_option("-o,--output", f.output, "write the derivation to FILE");
    common(cert), fuel(cert), batch(cert);

    auto* search = app.add_subcommand("search", "bounded search for a typing derivation");
    search->add_option("program", a, "computation text, @file or -")->required();
    search->add_option("type", b, "computation type")->required();
    search->add_option("--depth", f.depth, "search depth")->check(CLI::NonNegativeNumber);
    search->add_option("-o,--output", f.output, "write the derivation to FILE");
    common(search), batch(search);

    auto* mem = app.add_subcommand("member", "sampled membership in a type interpretation");
    mem->add_option("entity", a, "value, store, computation or configuration")->required();
    mem->add_option("type", b, "type")->required();
    mem->add_option("--budget", f.budget, "SAMPLES,FUEL,SIZE");
    mem->add_option("--seed", f.seed, "sampling seed");
    common(mem), batch(mem);

    auto* prop = app.add_subcommand("proptest", "run the acceptance suites");
    prop->add_option("--suite", f.suite, "one of: bigsmall, stores, subtyping, subject-reduction, characterization, "
                                         "golden, complemma, store-typing");
    prop->add_option("--seed", f.seed, "override the suite seed");
    common(prop);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    try {
        if (*eval) return for_inputs(a, f, [&](const std::string& s) { return cmd_eval(s, f); });
        if (*trace) return for_inputs(a, f, [&](const std::string& s) { return cmd_trace(s, f); });
        if (*nf) return for_inputs(a, f, [&](const std::string& s) { return cmd_store_nf(s, f); });
        if (*seq) return cmd_store_eq(input_text(a), input_text(b), f);
        if (*sub) return cmd_subtype(input_text(a), input_text(b), f);
        if (*tc) return cmd_typecheck(input_text(a == "-" ? a : "@" + a), f);
        if (*cert) return for_inputs(a, f, [&](const std::string& s) { return cmd_certify(s, f); });
        if (*search) return for_inputs(a, f, [&](const std::string& s) { return cmd_search(s, input_text(b), f); });
        if (*mem) return for_inputs(a, f, [&](const std::string& s) { return cmd_member(s, input_text(b), f); });
        if (*prop) return cmd_proptest(f);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    }
    return kInput;
}
