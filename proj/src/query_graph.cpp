#include "nsmp/query_graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace nsmp {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> bfs(const QueryGraph& g, const std::vector<std::size_t>& sources) {
    std::vector<std::size_t> dist(g.nodes().size(), kUnreached);
    std::deque<std::size_t> queue;
    for (auto s : sources) {
        dist[s] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        auto u = queue.front();
        queue.pop_front();
        for (const auto& inc : g.incident(u)) {
            if (dist[inc.neighbor] == kUnreached) {
                dist[inc.neighbor] = dist[u] + 1;
                queue.push_back(inc.neighbor);
            }
        }
    }
    return dist;
}

}  // namespace

QueryGraph::QueryGraph(std::vector<Term> nodes, std::vector<QueryEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), incident_(nodes_.size()) {
    auto free_it = std::find(nodes_.begin(), nodes_.end(), Term::free());
    if (free_it == nodes_.end()) throw UnsupportedQuery("query branch has no free variable y");
    free_node_ = static_cast<std::size_t>(free_it - nodes_.begin());
    if (std::none_of(nodes_.begin(), nodes_.end(),
                     [](const Term& t) { return t.kind == Term::Kind::Constant; }))
        throw UnsupportedQuery("query branch has no constant node");

    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& edge = edges_[e];
        if (edge.source >= nodes_.size() || edge.target >= nodes_.size())
            throw Error("query edge endpoint out of range");
        // A message into the tail travels head->tail; into the head, tail->head.
        incident_[edge.target].push_back({e, edge.source, Direction::HeadToTail});
        if (edge.source != edge.target)
            incident_[edge.source].push_back({e, edge.target, Direction::TailToHead});
    }

    auto reach = bfs(*this, {free_node_});
    if (std::find(reach.begin(), reach.end(), kUnreached) != reach.end())
        throw UnsupportedQuery("query graph is disconnected");
}

std::vector<std::size_t> QueryGraph::variable_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (!is_constant(i)) out.push_back(i);
    return out;
}

QueryGraph build_graph(const Conjunction& scq) {
    if (scq.empty()) throw UnsupportedQuery("empty conjunctive query");
    std::vector<Term> nodes;
    auto node_of = [&](const Term& t) {
        auto it = std::find(nodes.begin(), nodes.end(), t);
        if (it != nodes.end()) return static_cast<std::size_t>(it - nodes.begin());
        nodes.push_back(t);
        return nodes.size() - 1;
    };
    std::vector<QueryEdge> edges;
    edges.reserve(scq.size());
    for (const auto& atom : scq) {
        const auto s = node_of(atom.head);
        const auto t = node_of(atom.tail);
        edges.push_back({s, t, atom.relation, atom.negated});
    }
    return QueryGraph(std::move(nodes), std::move(edges));
}

DepthInfo depth(const QueryGraph& g) {
    DepthInfo info;
    info.distance_to_free = bfs(g, {g.free_node()});
    std::vector<std::size_t> constants;
    for (std::size_t i = 0; i < g.nodes().size(); ++i)
        if (g.is_constant(i)) constants.push_back(i);
    info.distance_from_constants = bfs(g, constants);
    for (auto c : constants) info.depth = std::max(info.depth, info.distance_to_free[c]);
    return info;
}

}  // namespace nsmp
