#pragma once
// Query multigraph of a single conjunctive branch: one node per distinct
// term, one directed edge per atom (parallel edges kept).

#include <string>
#include <vector>

#include "nsmp/formula.hpp"

namespace nsmp {

struct QueryEdge {
    std::size_t source;  // node of the atom's head term
    std::size_t target;  // node of the atom's tail term
    RelationId relation;
    bool negated;
};

// An edge as seen from one endpoint.
struct Incidence {
    std::size_t edge;
    std::size_t neighbor;
    // Direction a message travels from `neighbor` to this node.
    Direction direction;
};

class QueryGraph {
   public:
    // Validates connectivity and that at least one constant and the free
    // variable are present; throws UnsupportedQuery otherwise.
    QueryGraph(std::vector<Term> nodes, std::vector<QueryEdge> edges);

    const std::vector<Term>& nodes() const { return nodes_; }
    const std::vector<QueryEdge>& edges() const { return edges_; }
    std::size_t free_node() const { return free_node_; }
    const std::vector<Incidence>& incident(std::size_t node) const { return incident_[node]; }

    bool is_constant(std::size_t node) const {
        return nodes_[node].kind == Term::Kind::Constant;
    }
    std::vector<std::size_t> variable_nodes() const;

   private:
    std::vector<Term> nodes_;
    std::vector<QueryEdge> edges_;
    std::vector<std::vector<Incidence>> incident_;
    std::size_t free_node_ = 0;
};

QueryGraph build_graph(const Conjunction& scq);

struct DepthInfo {
    // Largest shortest-path distance from a constant to the free node.
    std::size_t depth = 0;
    // Undirected hop distance of each node from the free node.
    std::vector<std::size_t> distance_to_free;
    // Undirected hop distance of each node from its nearest constant.
    std::vector<std::size_t> distance_from_constants;
};

DepthInfo depth(const QueryGraph& g);

}  // namespace nsmp
