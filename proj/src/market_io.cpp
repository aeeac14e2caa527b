#include "friction/market_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>

namespace friction {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what, const std::string& node = "")
{
    throw MarketError(node, "schema", what);
}

Rational rational_field(const json& j, const std::string& where)
{
    if (j.is_number_float()) schema_error("decimal literal rejected in " + where + ": " + j.dump());
    if (!j.is_string()) schema_error("non-rational numeric literal in " + where + ": " + j.dump());
    try {
        return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        schema_error("non-rational numeric literal in " + where + ": " + e.what());
    }
}

Vec vector_field(const json& j, Eigen::Index d, const std::string& where)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != d)
        schema_error("expected a vector of length " + std::to_string(d) + " in " + where);
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = rational_field(j[static_cast<std::size_t>(i)], where);
    return v;
}

std::vector<Vec> vector_list(const json& j, Eigen::Index d, const std::string& where)
{
    if (!j.is_array()) schema_error("expected a list of vectors in " + where);
    std::vector<Vec> out;
    for (const auto& e : j) out.push_back(vector_field(e, d, where));
    return out;
}

PolyhedralCone cone_field(const json& j, Eigen::Index d, const std::string& node, const std::string& what)
{
    const std::string where = what + " of node " + node;
    if (j.is_string() && j.get<std::string>() == "unconstrained") return PolyhedralCone::full_space(d);
    if (!j.is_object() || j.size() != 1) schema_error("cone must have exactly one of generators, halfspaces, bid_ask in " + where, node);
    try {
        if (j.contains("generators")) return convert(PolyhedralCone::from_generators(d, vector_list(j["generators"], d, where)));
        if (j.contains("halfspaces")) return convert(PolyhedralCone::from_halfspaces(d, vector_list(j["halfspaces"], d, where)));
        if (j.contains("bid_ask")) {
            auto rows = vector_list(j["bid_ask"], d, where);
            if (static_cast<Eigen::Index>(rows.size()) != d) schema_error("bid_ask must be square in " + where, node);
            Mat pi(d, d);
            for (Eigen::Index i = 0; i < d; ++i) pi.row(i) = rows[static_cast<std::size_t>(i)].transpose();
            return solvency_from_bidask(pi);
        }
    } catch (const std::invalid_argument& e) {
        throw MarketError(node, "schema", std::string(e.what()) + " in " + where);
    }
    schema_error("unknown cone encoding in " + where, node);
}

int int_field(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key) || !j[key].is_number_integer()) schema_error(std::string("missing integer field ") + key + where);
    return j[key].get<int>();
}

std::vector<Vec> payoff_map(const json& j, const MarketSpec& spec, const std::string& where)
{
    if (!j.is_object()) schema_error("payoff must map leaf ids to vectors in " + where);
    std::vector<Vec> out(static_cast<std::size_t>(spec.tree.size()));
    for (auto it = j.begin(); it != j.end(); ++it) {
        int v = spec.tree.index_of(it.key());
        if (v < 0) schema_error("payoff for unknown node " + it.key() + " in " + where, it.key());
        if (!spec.tree.node(v).is_leaf()) schema_error("payoff for non-leaf node " + it.key() + " in " + where, it.key());
        out[static_cast<std::size_t>(v)] = vector_field(it.value(), spec.dimension, "payoff of node " + it.key());
    }
    for (int leaf : spec.tree.leaves())
        if (out[static_cast<std::size_t>(leaf)].size() == 0)
            throw MarketError(spec.tree.id(leaf), "payoff", "payoff missing at node " + spec.tree.id(leaf) + " in " + where);
    return out;
}

}  // namespace

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw MarketError("", "file", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw MarketError("", "parse", std::string("parse error: ") + e.what());
    }
}

MarketSpec parse_market(const json& doc, const ValidationOptions& options)
{
    if (!doc.is_object()) schema_error("market document must be an object");
    MarketSpec spec;
    spec.dimension = int_field(doc, "dimension", "");
    if (spec.dimension < 2) throw MarketError("", "dimension", "dimension must be at least 2");
    spec.numeraire = spec.dimension - 1;
    spec.tree.horizon = int_field(doc, "horizon", "");
    const Eigen::Index d = spec.dimension;

    if (!doc.contains("nodes") || !doc["nodes"].is_array()) schema_error("missing nodes array");
    const json& nodes = doc["nodes"];
    for (const auto& jn : nodes) {
        if (!jn.contains("id") || !jn["id"].is_string()) schema_error("node without string id");
        Node n;
        n.id = jn["id"].get<std::string>();
        n.time = int_field(jn, "time", " of node " + n.id);
        spec.tree.nodes.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& jn = nodes[i];
        Node& n = spec.tree.nodes[i];
        if (!jn.contains("parent") || jn["parent"].is_null()) continue;
        if (!jn["parent"].is_string()) schema_error("parent must be a string or null", n.id);
        n.parent = spec.tree.index_of(jn["parent"].get<std::string>());
        if (n.parent < 0) throw MarketError(n.id, "parent", "unknown parent of node " + n.id);
    }
    spec.tree.link();

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Node& n = spec.tree.nodes[i];
        const auto& jn = nodes[i];
        if (!jn.contains("kernels")) continue;
        if (!jn["kernels"].is_array()) schema_error("kernels must be an array", n.id);
        for (const auto& jk : jn["kernels"]) {
            if (!jk.is_array()) schema_error("kernel must be an array", n.id);
            std::vector<Rational> probs(n.children.size(), Rational(0));
            std::set<std::string> seen;
            for (const auto& entry : jk) {
                if (!entry.is_object() || !entry.contains("child") || !entry["child"].is_string() || !entry.contains("prob"))
                    schema_error("kernel entries must be {child, prob} at node " + n.id, n.id);
                const std::string child = entry["child"].get<std::string>();
                if (!seen.insert(child).second) schema_error("child listed twice in a kernel at node " + n.id, n.id);
                int c = spec.tree.index_of(child);
                auto slot = std::find(n.children.begin(), n.children.end(), c);
                if (c < 0 || slot == n.children.end())
                    throw MarketError(n.id, "kernels", "kernel references " + child + ", not a child of node " + n.id);
                probs[static_cast<std::size_t>(slot - n.children.begin())] = rational_field(entry["prob"], "kernel of node " + n.id);
            }
            n.kernels.push_back(std::move(probs));
        }
    }

    if (!doc.contains("cones") || !doc["cones"].is_object()) schema_error("missing cones object");
    const json& cones = doc["cones"];
    const json unconstrained = "unconstrained";
    const json& constraints = doc.contains("constraints") ? doc["constraints"] : unconstrained;
    if (!constraints.is_object() && constraints != unconstrained) schema_error("constraints must be \"unconstrained\" or an object");
    for (const auto& jc : {std::cref(cones), std::cref(constraints)}) {
        if (!jc.get().is_object()) continue;
        for (auto it = jc.get().begin(); it != jc.get().end(); ++it)
            if (spec.tree.index_of(it.key()) < 0) schema_error("cone for unknown node " + it.key(), it.key());
    }
    for (const auto& n : spec.tree.nodes) {
        if (!cones.contains(n.id)) throw MarketError(n.id, "schema", "missing solvency cone at node " + n.id);
        spec.solvency.push_back(cone_field(cones[n.id], d, n.id, "solvency cone"));
        if (constraints.is_object() && constraints.contains(n.id))
            spec.constraint.push_back(cone_field(constraints[n.id], d, n.id, "constraint cone"));
        else
            spec.constraint.push_back(PolyhedralCone::full_space(d));
    }

    if (!doc.contains("payoff")) schema_error("missing payoff object");
    spec.payoff = payoff_map(doc["payoff"], spec, "payoff");

    validate_market(spec, options);
    return spec;
}

MarketSpec load_market(const std::string& path)
{
    return parse_market(read_json_file(path));
}

SemiStaticSpec parse_options(const json& doc, const MarketSpec& spec)
{
    SemiStaticSpec out;
    if (!doc.contains("options")) return out;
    if (!doc["options"].is_array()) schema_error("options must be an array");
    for (const auto& jo : doc["options"]) {
        if (!jo.is_object() || !jo.contains("payoff") || !jo.contains("bid") || !jo.contains("ask"))
            schema_error("option entries must be {payoff, bid, ask}");
        OptionQuote q;
        q.payoff = payoff_map(jo["payoff"], spec, "option payoff");
        q.bid = rational_field(jo["bid"], "option bid");
        q.ask = rational_field(jo["ask"], "option ask");
        out.options.push_back(std::move(q));
    }
    validate_options(spec, out);
    return out;
}

SemiStaticSpec load_options(const std::string& path, const MarketSpec& spec)
{
    return parse_options(read_json_file(path), spec);
}

json to_json(const Vec& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_string(v[i]));
    return out;
}

namespace {

json cone_json(const PolyhedralCone& c)
{
    json gens = json::array();
    const auto synced = convert(c);
    for (const auto& g : synced.generators()) gens.push_back(to_json(g));
    return json{{"generators", gens}};
}

json payoff_json(const MarketSpec& spec, const std::vector<Vec>& payoff)
{
    json out = json::object();
    for (int leaf : spec.tree.leaves()) out[spec.tree.id(leaf)] = to_json(payoff[static_cast<std::size_t>(leaf)]);
    return out;
}

}  // namespace

json serialize_market(const MarketSpec& spec)
{
    json doc;
    doc["dimension"] = spec.dimension;
    doc["horizon"] = spec.tree.horizon;
    json nodes = json::array();
    json cones = json::object(), constraints = json::object();
    for (int v = 0; v < spec.tree.size(); ++v) {
        const Node& n = spec.tree.node(v);
        json jn;
        jn["id"] = n.id;
        jn["time"] = n.time;
        jn["parent"] = n.parent < 0 ? json(nullptr) : json(spec.tree.id(n.parent));
        json kernels = json::array();
        for (const auto& k : n.kernels) {
            json jk = json::array();
            for (std::size_t s = 0; s < k.size(); ++s)
                jk.push_back({{"child", spec.tree.id(n.children[s])}, {"prob", to_string(k[s])}});
            kernels.push_back(jk);
        }
        jn["kernels"] = kernels;
        nodes.push_back(jn);
        cones[n.id] = cone_json(spec.K(v));
        constraints[n.id] = cone_json(spec.C(v));
    }
    doc["nodes"] = nodes;
    doc["cones"] = cones;
    doc["constraints"] = constraints;
    doc["payoff"] = payoff_json(spec, spec.payoff);
    return doc;
}

json serialize_options(const MarketSpec& spec, const SemiStaticSpec& options)
{
    json out = json::array();
    for (const auto& o : options.options)
        out.push_back({{"payoff", payoff_json(spec, o.payoff)}, {"bid", to_string(o.bid)}, {"ask", to_string(o.ask)}});
    return out;
}

}  // namespace friction
