#ifndef FRICTION_MARKET_HPP
#define FRICTION_MARKET_HPP

#include "friction/cone.hpp"
#include "friction/rational.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace friction {

/// Raised when a market violates one of its structural invariants. Carries
/// the offending node id (empty for global problems) and the invariant name.
class MarketError : public std::runtime_error {
public:
    MarketError(std::string node, std::string invariant, const std::string& message)
        : std::runtime_error(message), node_(std::move(node)), invariant_(std::move(invariant))
    {
    }
    const std::string& node() const { return node_; }
    const std::string& invariant() const { return invariant_; }

private:
    std::string node_, invariant_;
};

struct Node {
    std::string id;
    int time = 0;
    int parent = -1;
    std::vector<int> children;
    /// Each kernel is a probability vector aligned with `children`.
    std::vector<std::vector<Rational>> kernels;

    bool is_leaf() const { return children.empty(); }
};

class ScenarioTree {
public:
    int horizon = 0;
    int root = -1;
    std::vector<Node> nodes;

    int size() const { return static_cast<int>(nodes.size()); }
    const Node& node(int i) const { return nodes[static_cast<std::size_t>(i)]; }
    int index_of(const std::string& id) const;
    const std::string& id(int i) const { return node(i).id; }

    /// Node indices at time t, in storage order.
    std::vector<int> level(int t) const;
    std::vector<int> leaves() const { return level(horizon); }

    /// Root-to-node path, root first.
    std::vector<int> path(int i) const;

    /// True when some kernel of the parent gives this child positive mass.
    bool charged(int parent, int child_slot) const;

    /// Rebuilds children lists from parent links and checks the grading.
    void link();
};

struct PolarClassification {
    std::vector<bool> non_polar;  // indexed by node
    std::vector<std::string> polar_nodes;
    std::vector<std::string> non_polar_nodes;

    bool is_polar(int node) const { return !non_polar[static_cast<std::size_t>(node)]; }
};

struct MarketSpec {
    Eigen::Index dimension = 0;
    Eigen::Index numeraire = 0;  // index of the numeraire asset, d-1 for loaded files
    ScenarioTree tree;
    std::vector<PolyhedralCone> solvency;    // K_t per node
    std::vector<PolyhedralCone> constraint;  // C_t per node
    std::vector<Vec> payoff;                 // G per node, meaningful at leaves

    const PolyhedralCone& K(int node) const { return solvency[static_cast<std::size_t>(node)]; }
    const PolyhedralCone& C(int node) const { return constraint[static_cast<std::size_t>(node)]; }
    const Vec& G(int node) const { return payoff[static_cast<std::size_t>(node)]; }
};

/// A finite set of options quoted at time 0 for static trading.
struct OptionQuote {
    std::vector<Vec> payoff;  // per node, meaningful at leaves
    Rational bid, ask;
};
struct SemiStaticSpec {
    std::vector<OptionQuote> options;
};

struct ValidationOptions {
    bool require_numeraire_line = true;
};

/// Checks every MarketSpec invariant and throws MarketError on the first
/// violation. Cones are expected to be synced.
void validate_market(const MarketSpec& spec, const ValidationOptions& options = {});
void validate_options(const MarketSpec& spec, const SemiStaticSpec& options);

/// Cone generated by e_i and pi[i][j] e_i - e_j (i != j).
PolyhedralCone solvency_from_bidask(const Mat& pi);

PolarClassification polar_classification(const ScenarioTree& tree);

/// Closed conic hull of the cones attached to the children of `node` that
/// some kernel of `node` charges. `family` is indexed by node.
PolyhedralCone quasi_sure_support(const ScenarioTree& tree, int node, const std::vector<PolyhedralCone>& family);

/// Adds an extra asset that can only be disposed of: K x R_+, C x R, [G; 0].
/// The numeraire keeps its index.
MarketSpec bar_extension(const MarketSpec& spec);
SemiStaticSpec bar_extension(const SemiStaticSpec& options);

/// True when C contains the line through the numeraire at every node.
bool constraints_canonical(const MarketSpec& spec);

}  // namespace friction

#endif  // FRICTION_MARKET_HPP
