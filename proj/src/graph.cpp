#include "gibbs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "gibbs/errors.hpp"

namespace gibbs {

Graph::Graph(std::size_t vertices, std::vector<std::pair<int, int>> edges)
    : v_(vertices)
{
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= v_ || static_cast<std::size_t>(b) >= v_)
            throw DomainError("edge endpoint out of range");
        if (a == b) throw DomainError("self-loop at vertex " + std::to_string(a));
        auto e = std::minmax(a, b);
        if (!seen.insert(e).second)
            throw DomainError("duplicate edge " + std::to_string(e.first) + "-" + std::to_string(e.second));
        edges_.emplace_back(e.first, e.second);
    }
}

namespace {

struct Dsu {
    std::vector<int> p;
    explicit Dsu(std::size_t n)
        : p(n)
    {
        std::iota(p.begin(), p.end(), 0);
    }
    int find(int x)
    {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    bool unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        p[a] = b;
        return true;
    }
};

}  // namespace

bool Graph::connected() const
{
    if (v_ <= 1) return true;
    Dsu d(v_);
    std::size_t parts = v_;
    for (auto [a, b] : edges_)
        if (d.unite(a, b)) --parts;
    return parts == 1;
}

Graph Graph::complete(std::size_t v)
{
    std::vector<std::pair<int, int>> e;
    for (std::size_t a = 0; a < v; ++a)
        for (std::size_t b = a + 1; b < v; ++b) e.emplace_back(a, b);
    return Graph(v, e);
}

Graph Graph::cycle(std::size_t v)
{
    std::vector<std::pair<int, int>> e;
    for (std::size_t a = 0; a < v; ++a) e.emplace_back(a, (a + 1) % v);
    return Graph(v, e);
}

Graph Graph::petersen()
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < 5; ++i) {
        e.emplace_back(i, (i + 1) % 5);
        e.emplace_back(i, i + 5);
        e.emplace_back(5 + i, 5 + (i + 2) % 5);
    }
    return Graph(10, e);
}

Graph parse_edge_list(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<int, int>> edges;
    long vertices = -1;
    int max_v = -1;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::string a;
        if (!(ls >> a)) continue;
        if (a == "vertices") {
            if (!(ls >> vertices) || vertices < 0) throw DomainError("bad vertices line");
            continue;
        }
        int u, v;
        try {
            u = std::stoi(a);
        } catch (const std::exception&) {
            throw DomainError("bad edge line: " + line);
        }
        std::string rest;
        if (!(ls >> v) || (ls >> rest)) throw DomainError("bad edge line: " + line);
        edges.emplace_back(u, v);
        max_v = std::max({max_v, u, v});
    }
    std::size_t n = vertices >= 0 ? static_cast<std::size_t>(vertices) : static_cast<std::size_t>(max_v + 1);
    return Graph(n, edges);
}

Graph graph_from_json(const nlohmann::json& j)
{
    std::vector<std::pair<int, int>> edges;
    if (j.contains("adjacency")) {
        const auto& adj = j.at("adjacency");
        std::set<std::pair<int, int>> seen;
        for (std::size_t u = 0; u < adj.size(); ++u)
            for (int v : adj[u].get<std::vector<int>>()) {
                const int w = static_cast<int>(u);
                std::pair<int, int> e{std::min(w, v), std::max(w, v)};
                if (seen.insert(e).second) edges.emplace_back(e);
            }
        std::size_t n = j.value("vertices", adj.size());
        return Graph(n, edges);
    }
    int max_v = -1;
    for (const auto& e : j.at("edges")) {
        int u = e.at(0).get<int>(), v = e.at(1).get<int>();
        edges.emplace_back(u, v);
        max_v = std::max({max_v, u, v});
    }
    std::size_t n = j.value("vertices", static_cast<std::size_t>(max_v + 1));
    return Graph(n, edges);
}

Graph load_graph(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open graph file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return graph_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
            throw DomainError(std::string("bad graph json: ") + e.what());
        }
    }
    return parse_edge_list(text);
}

std::string counts_csv(const std::vector<double>& counts)
{
    std::string out = "i,count\n";
    char buf[64];
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, counts[i]);
        out += buf;
    }
    return out;
}

namespace {

// Lowest free vertex is either left unmatched or matched to a free neighbour,
// so each matching is visited once.
void matchings_rec(const std::vector<std::vector<int>>& adj, std::vector<char>& used, int from,
                   int size, std::vector<double>& out)
{
    int v = from;
    while (v < static_cast<int>(used.size()) && used[v]) ++v;
    if (v >= static_cast<int>(used.size())) {
        out[size] += 1.0;
        return;
    }
    used[v] = 1;
    matchings_rec(adj, used, v + 1, size, out);
    for (int u : adj[v]) {
        if (used[u]) continue;
        used[u] = 1;
        matchings_rec(adj, used, v + 1, size + 1, out);
        used[u] = 0;
    }
    used[v] = 0;
}

}  // namespace

std::vector<double> count_matchings(const Graph& g)
{
    std::vector<std::vector<int>> adj(g.vertices());
    for (auto [a, b] : g.edges()) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<double> out(g.vertices() / 2 + 1, 0.0);
    std::vector<char> used(g.vertices(), 0);
    matchings_rec(adj, used, 0, 0, out);
    return out;
}

namespace {

bool spans(std::size_t v, const std::vector<std::pair<int, int>>& edges,
           const std::vector<char>& keep)
{
    Dsu d(v);
    std::size_t parts = v;
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (keep[e] && d.unite(edges[e].first, edges[e].second)) --parts;
    return parts <= 1;
}

// keep: 1 chosen, 0 dropped, 2 undecided. Dropping is pruned as soon as the
// chosen-plus-undecided edges stop spanning.
void subgraphs_rec(const Graph& g, std::vector<char>& keep, std::size_t e, std::size_t chosen,
                   std::vector<double>& out)
{
    const auto& edges = g.edges();
    if (e == edges.size()) {
        out[chosen] += 1.0;
        return;
    }
    keep[e] = 1;
    subgraphs_rec(g, keep, e + 1, chosen + 1, out);
    keep[e] = 0;
    std::vector<char> avail(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) avail[k] = keep[k] != 0;
    if (spans(g.vertices(), edges, avail)) subgraphs_rec(g, keep, e + 1, chosen, out);
    keep[e] = 2;
}

}  // namespace

std::vector<double> count_connected_subgraphs(const Graph& g)
{
    std::vector<double> out(g.edge_count() + 1, 0.0);
    if (!g.connected()) return out;
    std::vector<char> keep(g.edge_count(), 2);
    subgraphs_rec(g, keep, 0, 0, out);
    return out;
}

CountingInstance matchings_instance(const Graph& g, std::size_t limit)
{
    if (g.vertices() % 2 != 0) throw DomainError("matchings: vertex count must be even");
    if (g.vertices() > limit)
        throw RefusalError("matchings: " + std::to_string(g.vertices()) +
                           " vertices exceeds the enumeration limit " + std::to_string(limit));
    if (g.edge_count() == 0) throw DomainError("matchings: graph has no edges");
    CountingInstance r;
    r.counts = count_matchings(g);
    const std::size_t n = r.counts.size() - 1;
    if (r.counts[n] == 0.0) throw DomainError("matchings: graph has no perfect matching");
    double bmin = -std::log(static_cast<double>(g.edge_count()));
    double bmax = std::log(r.counts[n - 1] / r.counts[n]);
    r.instance = GibbsInstance::from_counts(r.counts, bmin, bmax);
    return r;
}

CountingInstance connected_subgraphs_instance(const Graph& g, std::size_t limit)
{
    if (!g.connected()) throw DomainError("connected subgraphs: graph is disconnected");
    if (g.edge_count() > limit)
        throw RefusalError("connected subgraphs: " + std::to_string(g.edge_count()) +
                           " edges exceeds the enumeration limit " + std::to_string(limit));
    CountingInstance r;
    r.counts = count_connected_subgraphs(g);
    const std::size_t m = g.edge_count();
    const std::size_t n = m + 1 - std::max<std::size_t>(g.vertices(), 1);
    std::vector<double> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) c[i] = r.counts[m - i];
    double le = m > 0 ? std::log(static_cast<double>(m)) : 0.0;
    r.instance = GibbsInstance::from_counts(c, -le, le);
    return r;
}

JsMatchingOracle::JsMatchingOracle(Graph g, Domain domain, double mixing_constant, double d_tv,
                                   std::uint64_t seed, std::string label)
    : Oracle(std::move(domain), label)
    , g_(std::move(g))
    , c_(mixing_constant)
    , d_tv_(d_tv)
    , seed_(seed)
    , rng_(seed, label)
    , mate_(g_.vertices(), -1)
{
    if (!(d_tv > 0.0 && d_tv < 1.0)) throw DomainError("js chain: d_tv must lie in (0,1)");
    if (!(mixing_constant > 0.0)) throw DomainError("js chain: mixing constant must be positive");
    if (g_.edge_count() == 0) throw DomainError("js chain: graph has no edges");
}

std::unique_ptr<Oracle> JsMatchingOracle::fork(std::string_view label) const
{
    std::string l = this->label() + "/" + std::string(label);
    return std::make_unique<JsMatchingOracle>(g_, domain(), c_, d_tv_, seed_, l);
}

std::uint64_t JsMatchingOracle::run_length(double beta) const
{
    double v = static_cast<double>(g_.vertices());
    double t = c_ * static_cast<double>(g_.edge_count()) * v * v * (1.0 + std::exp(beta)) *
               std::log(1.0 / d_tv_);
    return static_cast<std::uint64_t>(std::ceil(t));
}

std::size_t JsMatchingOracle::sample_index(double beta)
{
    std::fill(mate_.begin(), mate_.end(), -1);
    std::size_t size = 0;
    const double p_add = std::min(1.0, std::exp(beta));
    const double p_del = std::min(1.0, std::exp(-beta));
    const auto& edges = g_.edges();
    const std::uint64_t T = run_length(beta);
    for (std::uint64_t s = 0; s < T; ++s) {
        std::uint64_t r = rng_.below(2 * edges.size());
        if (r & 1) continue;  // lazy half
        auto [u, v] = edges[r >> 1];
        if (mate_[u] == v) {
            if (rng_.uniform() < p_del) {
                mate_[u] = mate_[v] = -1;
                --size;
            }
        } else if (mate_[u] < 0 && mate_[v] < 0) {
            if (rng_.uniform() < p_add) {
                mate_[u] = v;
                mate_[v] = u;
                ++size;
            }
        } else if (mate_[u] < 0 || mate_[v] < 0) {
            // slide: the matched endpoint swaps partners, size unchanged
            int a = mate_[u] >= 0 ? u : v;
            int b = a == u ? v : u;
            mate_[mate_[a]] = -1;
            mate_[a] = b;
            mate_[b] = a;
        }
    }
    steps_ += T;
    auto j = domain().find(static_cast<double>(size));
    if (!j) throw OracleError("js chain produced a size outside the support");
    return *j;
}

std::unique_ptr<JsMatchingOracle> js_matching_oracle(const Graph& g, double mixing_constant,
                                                     double d_tv, std::uint64_t seed)
{
    auto ci = matchings_instance(g);
    return std::make_unique<JsMatchingOracle>(g, Domain::of(ci.instance), mixing_constant, d_tv,
                                              seed);
}

}  // namespace gibbs
