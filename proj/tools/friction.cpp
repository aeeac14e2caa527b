#include "friction/generator.hpp"
#include "friction/market_io.hpp"
#include "friction/pricing.hpp"
#include "friction/randomized.hpp"
#include "friction/recursion.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace friction;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, Internal = 1, Arbitrage = 2, Validation = 3, Usage = 64 };

struct Flags {
    std::string method = "all";
    std::string cones = "K";
    std::string epsilon = "1/100";
    std::string schedule;
    bool pretty = false;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> inputs;
};

struct Outcome {
    json report;
    int code = Ok;
};

// ---------------------------------------------------------------- encoding

json ext(const Extended& e) { return to_string(e); }

json cone_json(const PolyhedralCone& cone)
{
    const auto synced = cone.synced() ? cone : convert(cone);
    json out = json::object();
    json lines = json::array(), rays = json::array();
    for (const auto& l : synced.lines()) lines.push_back(to_json(l));
    for (const auto& r : synced.rays()) rays.push_back(to_json(r));
    if (!lines.empty()) out["lines"] = lines;
    if (!rays.empty()) out["rays"] = rays;
    return out;
}

json by_node(const MarketSpec& spec, const std::vector<std::optional<Vec>>& values)
{
    json out = json::object();
    for (std::size_t v = 0; v < values.size(); ++v)
        if (values[v]) out[spec.tree.node(static_cast<int>(v)).id] = to_json(*values[v]);
    return out;
}

void put_if(json& target, const char* key, const json& value)
{
    if (!(value.is_object() || value.is_array()) || !value.empty()) target[key] = value;
}

json witness_json(const MarketSpec& spec, const ArbitrageWitness& w)
{
    json out = {{"time", w.time}};
    if (w.nonzero_node >= 0) out["nonzero_node"] = spec.tree.node(w.nonzero_node).id;
    put_if(out, "transfers", by_node(spec, w.transfers));
    put_if(out, "positions", by_node(spec, w.positions));
    return out;
}

json verdict_json(const MarketSpec& spec, const ArbitrageVerdict& v)
{
    json out = {{"pass", v.pass}, {"pass_at_time", v.pass_at_time}};
    if (v.witness) {
        out["witness"] = witness_json(spec, *v.witness);
        const auto problem = verify_arbitrage_witness(spec, *v.witness);
        out["witness_verified"] = problem.empty();
        if (!problem.empty()) out["witness_problem"] = problem;
    }
    return out;
}

json strategy_json(const MarketSpec& spec, const HedgingStrategy& s)
{
    json out = {{"initial_capital", to_string(s.y)}};
    put_if(out, "transfers", by_node(spec, s.transfers));
    put_if(out, "positions", by_node(spec, s.positions));
    if (!s.alpha.empty()) {
        json a = json::array();
        for (const auto& x : s.alpha) a.push_back(to_string(x));
        out["options"] = a;
    }
    return out;
}

json scps_json(const MarketSpec& spec, const PriceSystem& prices, const RecoveredScps* scps)
{
    json out = json::object();
    put_if(out, "m", by_node(spec, prices.m));
    if (scps) {
        put_if(out, "Z", by_node(spec, scps->Z));
        json q = json::object();
        for (std::size_t v = 0; v < scps->q.size(); ++v)
            if (scps->q[v]) q[spec.tree.node(static_cast<int>(v)).id] = to_string(*scps->q[v]);
        put_if(out, "q", q);
        out["expectation"] = to_string(scps->expectation);
        put_if(out, "problems", json(scps->problems));
    }
    return out;
}

json interior_json(const InteriorDiagnostic& d)
{
    json out = {{"necessary_condition_holds", d.necessary_condition_holds}, {"message", d.message}};
    put_if(out, "flagged_nodes", json(d.flagged_nodes));
    return out;
}

json rows_json(const EqualityReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows) {
        json j = {{"epsilon", to_string(row.epsilon)}, {"atoms", row.atoms},       {"dual", ext(row.dual)},
                  {"randomized", ext(row.randomized)}, {"consistent", ext(row.consistent)}, {"dp", ext(row.dp)},
                  {"one_step_na", row.one_step_na}};
        if (row.gap) j["gap"] = to_string(*row.gap);
        rows.push_back(j);
    }
    json out = {{"price", ext(r.price)},
                {"rows", rows},
                {"checks",
                 {{"sandwich", r.sandwich},
                  {"classes_agree", r.classes_agree},
                  {"dp_agrees", r.dp_agrees},
                  {"gaps_nonincreasing", r.gaps_nonincreasing},
                  {"one_step_na", r.one_step_na}}}};
    put_if(out, "problems", json(r.problems));
    return out;
}

// ---------------------------------------------------------------- flags

std::vector<Rational> parse_schedule(const std::string& text)
{
    std::vector<Rational> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_rational(item));
    return out;
}

std::vector<Rational> schedule_of(const Flags& f)
{
    return f.schedule.empty() ? std::vector<Rational>{parse_rational(f.epsilon)} : parse_schedule(f.schedule);
}

// ---------------------------------------------------------------- verbs

/// Runs the arbitrage search; on FAIL fills the report and returns false.
bool no_arbitrage(const MarketSpec& spec, Outcome& out)
{
    auto verdict = strict_arbitrage_search(spec);
    if (verdict.pass) return true;
    out.report["status"] = "arbitrage";
    out.report["arbitrage"] = verdict_json(spec, verdict);
    out.code = Arbitrage;
    return false;
}

void validate_verb(const MarketSpec& spec, const SemiStaticSpec& options, Outcome& out)
{
    out.report["dimension"] = spec.dimension;
    out.report["horizon"] = spec.tree.horizon;
    out.report["nodes"] = spec.tree.size();
    out.report["leaves"] = spec.tree.leaves().size();
    out.report["numeraire"] = spec.numeraire;
    out.report["options"] = options.options.size();
}

void polar_verb(const MarketSpec& spec, Outcome& out)
{
    auto polar = polar_classification(spec.tree);
    put_if(out.report, "polar_nodes", json(polar.polar_nodes));
    put_if(out.report, "non_polar_nodes", json(polar.non_polar_nodes));
}

void recursion_verb(const MarketSpec& spec, Outcome& out)
{
    auto rec = backward_dual_cones(spec);
    json cones = json::object();
    for (int v = 0; v < spec.tree.size(); ++v)
        if (!rec.polar.is_polar(v)) cones[spec.tree.node(v).id] = cone_json(rec.tilde_dual_at(v));
    out.report["reduced_dual"] = cones;
    out.report["decomposition_check"] = tilde_decomposition_check(rec, spec);
    auto diag = interior_diagnostic(rec);
    out.report["interior"] = interior_json(diag);
    if (!diag.necessary_condition_holds) {
        out.report["status"] = "arbitrage";
        out.code = Arbitrage;
    }
}

void arbitrage_verb(const MarketSpec& spec, Outcome& out)
{
    auto verdict = strict_arbitrage_search(spec);
    out.report["arbitrage"] = verdict_json(spec, verdict);
    if (!verdict.pass) {
        out.report["status"] = "arbitrage";
        out.code = Arbitrage;
    }
}

void price_verb(const MarketSpec& spec, const Flags& f, Outcome& out)
{
    if (f.method != "primal" && f.method != "dual" && f.method != "dp" && f.method != "all")
        throw CLI::ValidationError("--method", "expected primal, dual, dp or all");
    if (f.cones != "K" && f.cones != "K-tilde") throw CLI::ValidationError("--cones", "expected K or K-tilde");
    if (!no_arbitrage(spec, out)) return;
    auto rec = backward_dual_cones(spec);
    const ConeSet cones = f.cones == "K" ? ConeSet::unreduced(spec) : ConeSet::reduced(rec);
    out.report["cones"] = f.cones;
    std::optional<Extended> headline;
    if (f.method == "primal" || f.method == "all") {
        auto p = primal_superhedge(spec, cones);
        out.report["primal"] = ext(p.value);
        if (p.strategy) {
            out.report["strategy"] = strategy_json(spec, *p.strategy);
            out.report["strategy_verified"] = verify_superhedge(spec, *p.strategy, cones).empty();
        }
        headline = p.value;
    }
    if (f.method == "dual" || f.method == "all") {
        auto d = dual_scps(spec, cones);
        out.report["dual"] = ext(d.value);
        if (d.prices) {
            auto scps = recover_scps(spec, *d.prices, cones);
            out.report["price_system"] = scps_json(spec, *d.prices, &scps);
        }
        if (!headline) headline = d.value;
    }
    if (f.method == "dp" || f.method == "all") {
        const Rational eps = parse_rational(f.epsilon);
        auto m = build_enlarged_market(spec, rec, eps);
        out.report["dp"] = ext(dp_value(m, payoff_on_atoms(m)));
        out.report["epsilon"] = to_string(eps);
    }
    if (headline && headline->kind() == Extended::Kind::PlusInfinity) out.report["status"] = "infeasible";
}

void duality_verb(const MarketSpec& spec, const Flags& f, Outcome& out)
{
    auto r = duality_report(spec);
    if (!r.arbitrage.pass) {
        out.report["status"] = "arbitrage";
        out.report["arbitrage"] = verdict_json(spec, r.arbitrage);
        out.code = Arbitrage;
        return;
    }
    out.report["arbitrage"] = verdict_json(spec, r.arbitrage);
    if (r.interior) out.report["interior"] = interior_json(*r.interior);
    out.report["primal_K"] = ext(r.primal_K);
    out.report["primal_K_tilde"] = ext(r.primal_K_tilde);
    out.report["dual_K"] = ext(r.dual_K);
    out.report["dual_K_tilde"] = ext(r.dual_K_tilde);
    if (r.gap) out.report["gap"] = to_string(*r.gap);
    out.report["reduction_identity"] = r.reduction_identity;
    out.report["duals_agree"] = r.duals_agree;
    if (r.strategy) {
        out.report["strategy"] = strategy_json(spec, *r.strategy);
        out.report["strategy_verified"] = r.strategy_check.empty();
        if (!r.strategy_check.empty()) out.report["strategy_problem"] = r.strategy_check;
    }
    if (r.prices) out.report["price_system"] = scps_json(spec, *r.prices, r.scps ? &*r.scps : nullptr);
    out.report["prices_verified"] = r.prices_verified;
    if (r.primal_K.kind() == Extended::Kind::PlusInfinity) out.report["status"] = "infeasible";
    bool sound = r.reduction_identity && r.duals_agree && r.strategy_check.empty() && r.prices_verified &&
                 (!r.gap || is_zero(*r.gap));
    if (!f.schedule.empty()) {
        auto eq = equality_check(spec, parse_schedule(f.schedule));
        out.report["enlargement"] = rows_json(eq);
        sound = sound && eq.ok();
    }
    if (!sound) {
        out.report["status"] = "error";
        out.code = Internal;
    }
}

void randomize_verb(const MarketSpec& spec, const Flags& f, Outcome& out)
{
    if (!no_arbitrage(spec, out)) return;
    auto eq = equality_check(spec, schedule_of(f));
    out.report["enlargement"] = rows_json(eq);
    if (!eq.ok()) {
        out.report["status"] = "error";
        out.code = Internal;
    }
}

void semistatic_verb(const MarketSpec& spec, const SemiStaticSpec& options, Outcome& out)
{
    auto verdict = na_semistatic_check(spec, options);
    json v = {{"pass", verdict.pass}, {"dynamic", verdict_json(spec, verdict.dynamic)}, {"static_gain", to_string(verdict.static_gain)}};
    if (!verdict.alpha.empty()) {
        json a = json::array();
        for (const auto& x : verdict.alpha) a.push_back(to_string(x));
        v["alpha"] = a;
    }
    if (verdict.witness) v["witness"] = strategy_json(spec, *verdict.witness);
    out.report["semistatic"] = v;
    if (!verdict.pass) {
        out.report["status"] = "arbitrage";
        out.code = Arbitrage;
        return;
    }
    const auto cones = ConeSet::unreduced(spec);
    auto primal = primal_superhedge(spec, cones, &options);
    auto dual = dual_scps(spec, cones, &options);
    out.report["primal"] = ext(primal.value);
    out.report["dual"] = ext(dual.value);
    out.report["price_without_options"] = ext(primal_superhedge(spec, cones).value);
    if (auto margin = slater_margin(spec, options)) out.report["slater_margin"] = to_string(*margin);
    if (primal.strategy) {
        out.report["strategy"] = strategy_json(spec, *primal.strategy);
        out.report["strategy_verified"] = verify_superhedge(spec, *primal.strategy, cones, &options).empty();
    }
    if (dual.prices) {
        auto scps = recover_scps(spec, *dual.prices, cones, &options);
        out.report["price_system"] = scps_json(spec, *dual.prices, &scps);
    }
    if (primal.value.kind() == Extended::Kind::PlusInfinity) out.report["status"] = "infeasible";
}

Outcome run_one(const std::string& verb, const std::string& input, const Flags& f)
{
    Outcome out;
    out.report = {{"verb", verb}, {"input", input}, {"status", "ok"}};
    try {
        MarketSpec spec;
        SemiStaticSpec options;
        if (input == "@random") {
            spec = seeded_market(*f.seed);
            out.report["seed"] = *f.seed;
        } else {
            spec = load_market(input);
            options = load_options(input, spec);
        }
        if (verb == "validate") validate_verb(spec, options, out);
        else if (verb == "polar") polar_verb(spec, out);
        else if (verb == "recursion") recursion_verb(spec, out);
        else if (verb == "arbitrage") arbitrage_verb(spec, out);
        else if (verb == "price") price_verb(spec, f, out);
        else if (verb == "duality") duality_verb(spec, f, out);
        else if (verb == "randomize") randomize_verb(spec, f, out);
        else if (verb == "semistatic") semistatic_verb(spec, options, out);
    } catch (const MarketError& e) {
        out.report["status"] = "error";
        out.report["error"] = e.what();
        put_if(out.report, "invariant", e.invariant());
        if (!e.node().empty()) out.report["node"] = e.node();
        out.code = Validation;
    } catch (const CLI::Error&) {
        throw;
    } catch (const std::exception& e) {
        out.report["status"] = "error";
        out.report["error"] = e.what();
        out.code = Internal;
    }
    return out;
}

// ---------------------------------------------------------------- pretty

void flatten(const json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows)
{
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, path.empty() ? it.key() : path + "." + it.key(), rows);
    } else if (j.is_array()) {
        bool scalars = true;
        for (const auto& x : j) scalars = scalars && !x.is_structured();
        if (scalars) {
            rows.emplace_back(path, j.dump());
            return;
        }
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", rows);
    } else {
        rows.emplace_back(path, j.is_string() ? j.get<std::string>() : j.dump());
    }
}

std::string approx(const std::string& text)
{
    if (text.find('/') == std::string::npos) return "";
    try {
        return to_decimal_string(parse_rational(text), 20) + " (approx)";
    } catch (const std::exception&) {
        return "";
    }
}

void pretty_print(const json& report)
{
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(report, "", rows);
    std::size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    for (const auto& [k, v] : rows) {
        std::string line = k + std::string(width - k.size() + 2, ' ') + v;
        if (auto a = approx(v); !a.empty()) line += "  " + a;
        std::cerr << line << '\n';
    }
    std::cerr << '\n';
}

void configure_logging()
{
    auto logger = spdlog::stderr_logger_mt("friction");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::err);
    if (const char* level = std::getenv("FRICTION_LOG")) {
        const std::string l = level;
        if (l == "info") spdlog::set_level(spdlog::level::info);
        else if (l == "debug") spdlog::set_level(spdlog::level::debug);
    }
}

int severity(int code)
{
    switch (code) {
    case Internal: return 3;
    case Validation: return 2;
    case Arbitrage: return 1;
    default: return 0;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    configure_logging();
    CLI::App app{"Exact superhedging duality with frictions on finite scenario trees", "friction"};
    app.require_subcommand(1, 1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> verbs{
        {"validate", "Load and validate market files"},
        {"polar", "List polar and non-polar nodes"},
        {"recursion", "Reduced dual cones and the interior diagnostic"},
        {"arbitrage", "Decide no strict arbitrage, with a witness on failure"},
        {"price", "Superhedging price by the chosen method"},
        {"duality", "Full chain: arbitrage, recursion, primal and dual prices, certificates"},
        {"randomize", "Frictionless enlargement cross-check"},
        {"semistatic", "Semi-static pricing with the options listed in the market file"},
    };
    for (const auto& [name, help] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("inputs", flags.inputs, "Market files, or @random with --seed")->required();
        sub->add_option("--method", flags.method, "primal, dual, dp or all");
        sub->add_option("--cones", flags.cones, "K or K-tilde");
        sub->add_option("--epsilon", flags.epsilon, "Enlargement parameter p/q");
        sub->add_option("--epsilon-schedule", flags.schedule, "Comma-separated p/q list");
        sub->add_flag("--pretty", flags.pretty, "Table with decimal approximations on stderr");
        sub->add_option("--seed", flags.seed, "Seed for the @random instance");
    }
    try {
        app.parse(argc, argv);
        parse_rational(flags.epsilon);
        if (!flags.schedule.empty()) parse_schedule(flags.schedule);
        for (const auto& in : flags.inputs)
            if (in == "@random" && !flags.seed) throw CLI::ValidationError("@random", "needs --seed");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return Usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return Usage;
    }
    const std::string verb = app.get_subcommands().front()->get_name();

    std::vector<json> reports;
    int code = Ok;
    try {
        for (const auto& input : flags.inputs) {
            const auto start = std::chrono::steady_clock::now();
            auto outcome = run_one(verb, input, flags);
            const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            spdlog::info("{} {}: {} in {:.1f} ms", verb, input, outcome.report["status"].get<std::string>(), ms);
            if (flags.pretty) {
                pretty_print(outcome.report);
                std::cerr << "elapsed " << ms << " ms\n\n";
            }
            if (severity(outcome.code) > severity(code)) code = outcome.code;
            reports.push_back(std::move(outcome.report));
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return Usage;
    }
    const json doc = reports.size() == 1 ? reports.front() : json(reports);
    std::cout << doc.dump(2) << '\n';
    return code;
}
