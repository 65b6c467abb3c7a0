#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gibbs/instance.hpp"
#include "gibbs/oracle.hpp"

namespace gibbs {

// Simple undirected graph on vertices 0..v-1.
class Graph {
public:
    Graph() = default;
    // Throws DomainError on self-loops, duplicate edges or bad endpoints.
    Graph(std::size_t vertices, std::vector<std::pair<int, int>> edges);

    std::size_t vertices() const { return v_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    bool connected() const;

    static Graph complete(std::size_t v);
    static Graph cycle(std::size_t v);
    static Graph petersen();

private:
    std::size_t v_ = 0;
    std::vector<std::pair<int, int>> edges_;
};

// "u v" per line, 0-indexed; '#' starts a comment. An optional first line
// "vertices <k>" fixes the vertex count, otherwise it is max endpoint + 1.
Graph parse_edge_list(const std::string& text);
// {"vertices": k, "edges": [[u,v],...]} or {"adjacency": [[...],...]}.
Graph graph_from_json(const nlohmann::json& j);
Graph load_graph(const std::string& path);

// "i,count" rows.
std::string counts_csv(const std::vector<double>& counts);

struct CountingInstance {
    std::vector<double> counts;  // M_0..M_{v/2} or N_0..N_|E|
    GibbsInstance instance;
};

inline constexpr std::size_t kMatchingVertexLimit = 16;
inline constexpr std::size_t kSubgraphEdgeLimit = 18;

// Number of matchings of each size, by backtracking.
std::vector<double> count_matchings(const Graph& g);
// Number of spanning connected edge subsets of each size.
std::vector<double> count_connected_subgraphs(const Graph& g);

// c_i = M_i on 0..|V|/2, beta_min = -ln|E|, beta_max = ln(M_{n-1}/M_n).
CountingInstance matchings_instance(const Graph& g, std::size_t limit = kMatchingVertexLimit);
// c_i = N_{|E|-i} on 0..|E|-|V|+1, beta range [-ln|E|, ln|E|].
CountingInstance connected_subgraphs_instance(const Graph& g,
                                              std::size_t limit = kSubgraphEdgeLimit);

// Metropolis chain on matchings with stationary law prop. to e^{beta |M|}.
// Every draw restarts from the empty matching and runs
// T = ceil(C |E| |V|^2 (1 + e^beta) ln(1/d)) steps. Cost counts draws.
class JsMatchingOracle : public Oracle {
public:
    JsMatchingOracle(Graph g, Domain domain, double mixing_constant, double d_tv,
                     std::uint64_t seed, std::string label = "js-chain");

    std::unique_ptr<Oracle> fork(std::string_view label) const override;
    std::uint64_t run_length(double beta) const;
    std::uint64_t chain_steps() const { return steps_; }

protected:
    std::size_t sample_index(double beta) override;

private:
    Graph g_;
    double c_;
    double d_tv_;
    std::uint64_t seed_;
    Rng rng_;
    std::uint64_t steps_ = 0;
    std::vector<int> mate_;
};

// Domain taken from matchings_instance(g).
std::unique_ptr<JsMatchingOracle> js_matching_oracle(const Graph& g, double mixing_constant,
                                                     double d_tv, std::uint64_t seed);

}  // namespace gibbs
