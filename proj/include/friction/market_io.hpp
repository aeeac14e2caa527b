#ifndef FRICTION_MARKET_IO_HPP
#define FRICTION_MARKET_IO_HPP

#include "friction/market.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace friction {

/// Reads and fully validates a market file. Throws MarketError on schema or
/// invariant violations (including non-rational numeric literals).
MarketSpec load_market(const std::string& path);
MarketSpec parse_market(const nlohmann::json& doc, const ValidationOptions& options = {});

/// Options listed under "options" in the same document; empty when absent.
SemiStaticSpec load_options(const std::string& path, const MarketSpec& spec);
SemiStaticSpec parse_options(const nlohmann::json& doc, const MarketSpec& spec);

nlohmann::json read_json_file(const std::string& path);

/// Writes a document that parse_market maps back to an equal market. Cones
/// are written by their canonical generators.
nlohmann::json serialize_market(const MarketSpec& spec);
nlohmann::json serialize_options(const MarketSpec& spec, const SemiStaticSpec& options);

nlohmann::json to_json(const Vec& v);

}  // namespace friction

#endif  // FRICTION_MARKET_IO_HPP
