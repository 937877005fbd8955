#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "schreier/lattice.hpp"
#include "schreier/rng.hpp"

namespace schreier {

// ---------------------------------------------------------------------------
// Union-find with cell-coordinate potentials. A union closing a loop with a
// nonzero displacement marks the component as wrapping the torus.
// ---------------------------------------------------------------------------
class PotentialUF {
  public:
    explicit PotentialUF(std::size_t n) : parent_(n), rank_(n, 0), pot_(n), wrap_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), 0);
        for (auto& p : pot_) p.fill(0);
    }

    std::int32_t find(std::int32_t x) {
        if (parent_[x] == x) return x;
        std::int32_t r = find(parent_[x]);
        for (int k = 0; k < kMaxRank; ++k)
            pot_[x][k] = std::int32_t(pot_[x][k] + pot_[parent_[x]][k]);
        parent_[x] = r;
        return r;
    }

    // delta = cell(y) - cell(x) along the connection being added
    void unite(std::int32_t x, std::int32_t y, const Shift& delta) {
        std::int32_t rx = find(x), ry = find(y);
        std::array<std::int32_t, kMaxRank> need{}; // potential y should have relative to rx
        for (int k = 0; k < kMaxRank; ++k) need[k] = pot_[x][k] + delta[k];
        if (rx == ry) {
            for (int k = 0; k < kMaxRank; ++k)
                if (pot_[y][k] != need[k]) {
                    wrap_[rx] = 1;
                    return;
                }
            return;
        }
        if (rank_[rx] < rank_[ry]) {
            // attach rx under ry: pot(rx) = pot_[y] - need
            for (int k = 0; k < kMaxRank; ++k) pot_[rx][k] = pot_[y][k] - need[k];
            parent_[rx] = ry;
            wrap_[ry] = std::uint8_t(wrap_[ry] | wrap_[rx]);
        } else {
            for (int k = 0; k < kMaxRank; ++k) pot_[ry][k] = need[k] - pot_[y][k];
            parent_[ry] = rx;
            wrap_[rx] = std::uint8_t(wrap_[rx] | wrap_[ry]);
            if (rank_[rx] == rank_[ry]) ++rank_[rx];
        }
    }

    bool wraps(std::int32_t x) { return wrap_[find(x)] != 0; }

  private:
    std::vector<std::int32_t> parent_;
    std::vector<std::int8_t> rank_;
    std::vector<std::array<std::int32_t, kMaxRank>> pot_;
    std::vector<std::uint8_t> wrap_;
};

// ---------------------------------------------------------------------------
// Percolation clustering on a planar window: fair site colours, fair face
// coins, clusters = same-colour components under the augmented adjacency.
// ---------------------------------------------------------------------------
struct Clustering {
    std::vector<std::uint8_t> colour;   // vertex -> kYellow / kGreen
    std::vector<std::int32_t> cluster;  // vertex -> dense cluster id
    std::vector<std::uint8_t> face_coin; // face -> coin; 2 on triangles
    std::vector<std::uint8_t> wraps;    // cluster -> wraps the torus
    std::int32_t count = 0;
};

// closure of the augmented adjacency over given colours and coins
inline Clustering clusters_from(const LatticeGraph& G, std::vector<std::uint8_t> colour,
                                std::vector<std::uint8_t> face_coin) {
    require(G.has_faces(), Errc::face_data_missing, "percolation needs a planar window with faces");
    Clustering cl;
    const std::size_t n = G.n();
    cl.colour = std::move(colour);
    cl.face_coin = std::move(face_coin);

    PotentialUF uf(n);
    for (EdgeId e = 0; e < G.m(); ++e) {
        const Edge& ed = G.edges[e];
        if (cl.colour[ed.u] == cl.colour[ed.v]) uf.unite(std::int32_t(ed.u), std::int32_t(ed.v), ed.shift);
    }
    for (FaceId f = 0; f < G.faces.size(); ++f) {
        const Face& fc = G.faces[f];
        if (fc.size() == 3) continue; // all pairs already edge-adjacent
        const std::uint8_t c = cl.face_coin[f];
        int first = -1;
        for (int i = 0; i < fc.size(); ++i) {
            if (cl.colour[fc.verts[i]] != c) continue;
            if (first < 0) {
                first = i;
                continue;
            }
            Shift delta = zero_shift();
            for (int k = 0; k < kMaxRank; ++k)
                delta[k] = std::int16_t(fc.lifts[i][k] - fc.lifts[first][k]);
            uf.unite(std::int32_t(fc.verts[first]), std::int32_t(fc.verts[i]), delta);
        }
    }

    cl.cluster.assign(n, -1);
    std::vector<std::int32_t> id_of_root(n, -1);
    for (VertexId v = 0; v < n; ++v) {
        std::int32_t r = uf.find(std::int32_t(v));
        if (id_of_root[r] < 0) {
            id_of_root[r] = cl.count++;
            cl.wraps.push_back(uf.wraps(r) ? 1 : 0);
        }
        cl.cluster[v] = id_of_root[r];
    }
    return cl;
}

inline Clustering percolation_clusters(const LatticeGraph& G, const LabelField& field) {
    require(G.has_faces(), Errc::face_data_missing, "percolation needs a planar window with faces");
    std::vector<std::uint8_t> colour(G.n());
    for (VertexId v = 0; v < G.n(); ++v)
        colour[v] = std::uint8_t(field.raw(v, channels::site_colour) >> 63);
    std::vector<std::uint8_t> coin(G.faces.size(), 2);
    for (FaceId f = 0; f < G.faces.size(); ++f)
        if (G.faces[f].size() > 3)
            coin[f] = std::uint8_t(field.choose(G.faces[f].verts, channels::face_coin, 2));
    return clusters_from(G, std::move(colour), std::move(coin));
}

// ---------------------------------------------------------------------------
// Hierarchy tree. Parts partition the window; every non-root part has a unique
// surrounding parent, adjacent parts are parent/child. On a box the root is
// the "ocean" pseudo-cluster (empty vertex set) beyond the border.
// ---------------------------------------------------------------------------
struct HierarchyTree {
    std::vector<std::vector<VertexId>> clusters;
    std::vector<std::int32_t> parent; // parent[root] == root
    std::int32_t root = 0;
    std::vector<std::int32_t> cluster_of; // vertex -> cluster
    std::vector<std::int32_t> eta;        // optional c-colouring (1..eta_c); empty when absent
    int eta_c = 0;
    int coarsen_rounds = 0;
    int spacing = 1; // claimed spacing of the construction

    std::size_t size() const { return clusters.size(); }

    std::vector<std::vector<std::int32_t>> children() const {
        std::vector<std::vector<std::int32_t>> ch(clusters.size());
        for (std::size_t c = 0; c < clusters.size(); ++c)
            if (std::int32_t(c) != root) ch[parent[c]].push_back(std::int32_t(c));
        return ch;
    }

    void rebuild_cluster_of(std::size_t n) {
        cluster_of.assign(n, -1);
        for (std::size_t c = 0; c < clusters.size(); ++c)
            for (VertexId v : clusters[c]) cluster_of[v] = std::int32_t(c);
    }

    bool is_ancestor(std::int32_t anc, std::int32_t x, const std::vector<int>& depth) const {
        while (depth[x] > depth[anc]) x = parent[x];
        return x == anc;
    }

    std::vector<int> depths() const {
        std::vector<int> d(clusters.size(), -1);
        d[root] = 0;
        // parents always have smaller depth; resolve iteratively
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t c = 0; c < clusters.size(); ++c)
                if (d[c] < 0 && d[parent[c]] >= 0) {
                    d[c] = d[parent[c]] + 1;
                    changed = true;
                }
        }
        return d;
    }
};

// Deduplicated cluster adjacency (plain graph edges only).
inline std::vector<std::pair<std::int32_t, std::int32_t>>
cluster_adjacency(const LatticeGraph& G, std::span<const std::int32_t> cluster_of,
                  std::int32_t count) {
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    for (const Edge& e : G.edges) {
        std::int32_t a = cluster_of[e.u], b = cluster_of[e.v];
        if (a == b) continue;
        pairs.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    (void)count;
    return pairs;
}

// Build the tree from a clustering. Torus: at most one cluster may wrap (it
// becomes the root; with none, the largest cluster does), and the cluster
// adjacency graph must be a tree — every contact is then parent/child, which
// is the finite-window rendering of the surrounding condition. Box: the ocean
// is the root and border clusters are its children.
inline HierarchyTree build_hierarchy(const LatticeGraph& G, const Clustering& cl) {
    HierarchyTree t;
    const std::int32_t k = cl.count;
    const bool box = (G.topology == Topology::box);

    std::int32_t wrap_count = 0, wrap_cluster = -1;
    for (std::int32_t c = 0; c < k; ++c)
        if (cl.wraps[c]) {
            ++wrap_count;
            wrap_cluster = c;
        }
    require(wrap_count <= 1, Errc::wrapping_cluster,
            std::to_string(wrap_count) + " clusters wrap the torus");

    std::vector<std::int32_t> remap;
    if (box) {
        require(wrap_count == 0, Errc::wrapping_cluster, "wrap flag on a box window");
        // clusters truncated by the window border cannot be nested here; they
        // are absorbed into the ocean, which becomes the root
        std::vector<std::uint8_t> touches(k, 0);
        for (VertexId v = 0; v < G.n(); ++v)
            if (G.vertex_degree(v) < G.degree) touches[cl.cluster[v]] = 1;
        remap.assign(k, -1);
        std::int32_t next = 1; // 0 = ocean
        for (std::int32_t c = 0; c < k; ++c) remap[c] = touches[c] ? 0 : next++;
        t.clusters.assign(next, {});
        t.cluster_of.assign(G.n(), 0);
        for (VertexId v = 0; v < G.n(); ++v) {
            t.cluster_of[v] = remap[cl.cluster[v]];
            t.clusters[t.cluster_of[v]].push_back(v);
        }
        t.root = 0;
    } else {
        t.clusters.assign(k, {});
        for (VertexId v = 0; v < G.n(); ++v) t.clusters[cl.cluster[v]].push_back(v);
        t.cluster_of.assign(cl.cluster.begin(), cl.cluster.end());
    }
    const std::int32_t n_nodes = std::int32_t(t.clusters.size());
    auto pairs = cluster_adjacency(G, t.cluster_of, n_nodes);
    if (!box) {
        if (wrap_count == 1)
            t.root = wrap_cluster;
        else {
            std::size_t best = 0;
            t.root = 0;
            for (std::int32_t c = 0; c < k; ++c)
                if (t.clusters[c].size() > best) {
                    best = t.clusters[c].size();
                    t.root = c;
                }
        }
    }

    // peel: BFS over the adjacency graph from the root
    std::vector<std::vector<std::int32_t>> adj(n_nodes);
    for (auto [a, b] : pairs) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    t.parent.assign(n_nodes, -1);
    t.parent[t.root] = t.root;
    std::deque<std::int32_t> q{t.root};
    std::size_t reached = 1;
    while (!q.empty()) {
        std::int32_t c = q.front();
        q.pop_front();
        for (std::int32_t d : adj[c])
            if (t.parent[d] < 0) {
                t.parent[d] = c;
                q.push_back(d);
                ++reached;
            }
    }
    require(reached == std::size_t(n_nodes), Errc::ambiguous_parent,
            "cluster adjacency graph is disconnected");
    // every adjacency must be a parent/child contact (tree condition 3)
    for (auto [a, b] : pairs)
        require(t.parent[a] == b || t.parent[b] == a, Errc::ambiguous_parent,
                "clusters " + std::to_string(a) + "," + std::to_string(b) +
                    " touch but neither surrounds the other");
    return t;
}

// ---------------------------------------------------------------------------
// Coarsening (tree contraction): per round every cluster tosses a fair coin
// and merges into its parent unless it is green below a yellow parent. m
// rounds push d(C, C++) up to 2^m + 1 for clusters whose parent stays clear of
// the root.
// ---------------------------------------------------------------------------
using CoinFn = std::function<std::uint8_t(int round, std::int32_t cluster,
                                          std::span<const VertexId> verts)>;

inline HierarchyTree coarsen(const HierarchyTree& T, const LabelField& field, int m,
                             const CoinFn& coin_fn = nullptr) {
    HierarchyTree t = T;
    for (int round = 0; round < m; ++round) {
        const std::int32_t k = std::int32_t(t.clusters.size());
        std::vector<std::uint8_t> coin(k, 0);
        for (std::int32_t c = 0; c < k; ++c) {
            if (coin_fn)
                coin[c] = coin_fn(round, c, t.clusters[c]);
            else if (!t.clusters[c].empty())
                coin[c] = std::uint8_t(
                    field.choose(t.clusters[c], channels::coarsen_round(round), 2));
        }
        // contract all edges except green child below yellow parent
        std::vector<std::int32_t> group(k);
        std::iota(group.begin(), group.end(), 0);
        std::function<std::int32_t(std::int32_t)> find = [&](std::int32_t x) {
            while (group[x] != x) x = group[x] = group[group[x]];
            return x;
        };
        for (std::int32_t c = 0; c < k; ++c) {
            if (c == t.root) continue;
            std::int32_t p = t.parent[c];
            if (!(coin[c] == kGreen && coin[p] == kYellow)) {
                std::int32_t a = find(c), b = find(p);
                if (a != b) group[a] = b;
            }
        }
        // relabel groups, smallest member id first
        std::vector<std::int32_t> newid(k, -1);
        std::int32_t next = 0;
        for (std::int32_t c = 0; c < k; ++c)
            if (newid[find(c)] < 0) newid[find(c)] = next++;
        HierarchyTree nt;
        nt.clusters.assign(next, {});
        nt.parent.assign(next, -1);
        for (std::int32_t c = 0; c < k; ++c) {
            std::int32_t g = newid[find(c)];
            auto& dst = nt.clusters[g];
            dst.insert(dst.end(), t.clusters[c].begin(), t.clusters[c].end());
        }
        for (auto& cs : nt.clusters) std::sort(cs.begin(), cs.end());
        nt.root = newid[find(t.root)];
        for (std::int32_t c = 0; c < k; ++c) {
            std::int32_t g = newid[find(c)];
            std::int32_t pg = newid[find(t.parent[c])];
            if (g != pg) nt.parent[g] = pg;
        }
        nt.parent[nt.root] = nt.root;
        for (std::int32_t g = 0; g < next; ++g)
            require(nt.parent[g] >= 0, Errc::bad_input, "contraction lost a parent link");
        nt.cluster_of = t.cluster_of; // rebuilt below
        nt.coarsen_rounds = t.coarsen_rounds;
        nt.spacing = t.spacing;
        t = std::move(nt);
        if (!t.cluster_of.empty()) t.rebuild_cluster_of(t.cluster_of.size());
        t.coarsen_rounds += 1;
    }
    t.eta.clear();
    t.eta_c = 0;
    t.spacing = 1;
    return t;
}

namespace detail {

// multi-source BFS distances from a cluster, capped at `radius` (distance
// radius+1 and beyond reported as radius+1). Ocean root seeds the border at
// distance 1.
inline void bfs_from_cluster(const LatticeGraph& G, const HierarchyTree& T, std::int32_t c,
                             int radius, std::vector<int>& dist) {
    dist.assign(G.n(), radius + 1);
    std::deque<VertexId> q;
    if (T.clusters[c].empty() && c == T.root) {
        for (VertexId v = 0; v < G.n(); ++v)
            if (G.vertex_degree(v) < G.degree) {
                dist[v] = 1;
                q.push_back(v);
            }
    } else {
        for (VertexId v : T.clusters[c]) {
            dist[v] = 0;
            q.push_back(v);
        }
    }
    while (!q.empty()) {
        VertexId v = q.front();
        q.pop_front();
        if (dist[v] >= radius + 1) continue;
        for (EdgeId e : G.incident(v)) {
            VertexId w = G.other(e, v);
            if (dist[w] > dist[v] + 1) {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
}

} // namespace detail

// Spacing transform: split every cluster at distance 2^(m-1) from its parent,
// hand the outer shells to the parents. Requires enough coarsening rounds for
// the target spacing k.
inline HierarchyTree space(const HierarchyTree& T, const LatticeGraph& G, int k) {
    require(T.coarsen_rounds >= 1 && (1 << (T.coarsen_rounds - 1)) >= k,
            Errc::insufficient_coarsening,
            "need m with 2^(m-1) >= " + std::to_string(k) + ", have m = " +
                std::to_string(T.coarsen_rounds));
    const int rho = 1 << (T.coarsen_rounds - 1);
    const std::int32_t n_cl = std::int32_t(T.clusters.size());

    // d(v, parent cluster) for every vertex of a child
    std::vector<int> band_dist(G.n(), -1);
    auto ch = T.children();
    std::vector<int> dist;
    for (std::int32_t p = 0; p < n_cl; ++p) {
        if (ch[p].empty()) continue;
        detail::bfs_from_cluster(G, T, p, rho, dist);
        for (std::int32_t c : ch[p])
            for (VertexId v : T.clusters[c]) band_dist[v] = dist[v];
    }

    // inner nonempty test; absorb hollow clusters into their parents
    std::vector<std::uint8_t> has_inner(n_cl, 0);
    for (std::int32_t c = 0; c < n_cl; ++c) {
        if (c == T.root) {
            has_inner[c] = 1;
            continue;
        }
        for (VertexId v : T.clusters[c])
            if (band_dist[v] >= rho) {
                has_inner[c] = 1;
                break;
            }
    }
    std::vector<std::int32_t> target(n_cl, -1);
    std::function<std::int32_t(std::int32_t)> resolve = [&](std::int32_t c) {
        if (target[c] >= 0) return target[c];
        return target[c] = has_inner[c] ? c : resolve(T.parent[c]);
    };
    for (std::int32_t c = 0; c < n_cl; ++c) resolve(c);

    // new vertex assignment: inner part stays, outer shell joins the parent
    std::vector<std::int32_t> assign(G.n(), -1);
    for (std::int32_t c = 0; c < n_cl; ++c)
        for (VertexId v : T.clusters[c]) {
            bool outer = (c != T.root) && band_dist[v] < rho;
            assign[v] = outer ? resolve(T.parent[c]) : resolve(c);
        }

    // compact
    std::vector<std::int32_t> newid(n_cl, -1);
    std::int32_t next = 0;
    for (std::int32_t c = 0; c < n_cl; ++c)
        if (has_inner[c]) newid[c] = next++;
    HierarchyTree t;
    t.clusters.assign(next, {});
    for (VertexId v = 0; v < G.n(); ++v)
        if (assign[v] >= 0) t.clusters[newid[assign[v]]].push_back(v);
    t.parent.assign(next, -1);
    t.root = newid[resolve(T.root)];
    for (std::int32_t c = 0; c < n_cl; ++c) {
        if (!has_inner[c]) continue;
        std::int32_t p = (c == T.root) ? c : resolve(T.parent[c]);
        t.parent[newid[c]] = newid[p];
    }
    t.rebuild_cluster_of(G.n());
    t.coarsen_rounds = T.coarsen_rounds;
    t.spacing = rho;
    return t;
}

// Colouring with c colours via distance bands of width k; needs ck spacing.
// Band i (counted from the parent) gets colour c+1-i, the root gets colour 1,
// so child colour i always sits below parent colour i+1 (mod c).
inline HierarchyTree colorize(const HierarchyTree& T, const LatticeGraph& G, int c, int k) {
    require(T.spacing >= c * k, Errc::insufficient_spacing,
            "colorize needs " + std::to_string(c * k) + "-spacing, have " +
                std::to_string(T.spacing));
    const std::int32_t n_cl = std::int32_t(T.clusters.size());
    auto ch = T.children();
    std::vector<int> band_of(G.n(), 0); // for non-root vertices: 1..c
    std::vector<int> dist;
    for (std::int32_t p = 0; p < n_cl; ++p) {
        if (ch[p].empty()) continue;
        detail::bfs_from_cluster(G, T, p, c * k, dist);
        for (std::int32_t cc : ch[p])
            for (VertexId v : T.clusters[cc]) {
                int d = dist[v];
                int band = (d + k - 1) / k;
                band_of[v] = std::min(band, c);
            }
    }

    // new node per (cluster, band); root keeps a single node
    std::vector<std::vector<std::int32_t>> node(n_cl);
    HierarchyTree t;
    auto add_node = [&]() {
        t.clusters.push_back({});
        t.parent.push_back(-1);
        t.eta.push_back(0);
        return std::int32_t(t.clusters.size() - 1);
    };
    for (std::int32_t cl = 0; cl < n_cl; ++cl) {
        if (cl == T.root) {
            node[cl] = {add_node()};
            t.eta.back() = 1;
            continue;
        }
        std::vector<std::uint8_t> present(c + 1, 0);
        for (VertexId v : T.clusters[cl]) present[band_of[v]] = 1;
        node[cl].assign(c + 1, -1);
        for (int b = 1; b <= c; ++b) {
            require(!present[b] || b == 1 || present[b - 1], Errc::bad_input,
                    "bands are not an interval");
            if (present[b]) {
                node[cl][b] = add_node();
                t.eta.back() = c + 1 - b;
            }
        }
        require(present[1], Errc::bad_input, "cluster with no outermost band");
        if (!ch[cl].empty())
            require(present[c], Errc::bad_input, "cluster with children lacks its deepest band");
    }
    for (std::int32_t cl = 0; cl < n_cl; ++cl) {
        if (cl == T.root) {
            for (VertexId v : T.clusters[cl]) t.clusters[node[cl][0]].push_back(v);
            continue;
        }
        for (VertexId v : T.clusters[cl]) t.clusters[node[cl][band_of[v]]].push_back(v);
    }
    // parents: band b -> band b-1; band 1 -> deepest band of the parent cluster
    t.root = node[T.root][0];
    t.parent[t.root] = t.root;
    for (std::int32_t cl = 0; cl < n_cl; ++cl) {
        if (cl == T.root) continue;
        std::int32_t up;
        std::int32_t p = T.parent[cl];
        if (p == T.root)
            up = node[p][0];
        else {
            up = -1;
            for (int b = c; b >= 1; --b)
                if (node[p][b] >= 0) {
                    up = node[p][b];
                    break;
                }
        }
        for (int b = 1; b <= c; ++b) {
            if (node[cl][b] < 0) break;
            t.parent[node[cl][b]] = up;
            up = node[cl][b];
        }
    }
    t.rebuild_cluster_of(G.n());
    t.coarsen_rounds = T.coarsen_rounds;
    t.spacing = k;
    t.eta_c = c;
    return t;
}

// ---------------------------------------------------------------------------
// Cluster boundaries (face rule) and the reassignment of stranded vertices:
// an in-cluster edge is boundary when one of its faces lies entirely in the
// cluster and its offspring while the other sees the parent; a vertex whose
// every face sees the parent moves up.
// ---------------------------------------------------------------------------
struct ClusterBoundary {
    std::vector<std::vector<EdgeId>> edges; // per cluster
    std::vector<std::map<VertexId, int>> incidence_count;
    HierarchyTree tree; // tree after reassignment (cluster ids unchanged)
};

inline ClusterBoundary boundary(const HierarchyTree& T, const LatticeGraph& G) {
    require(G.has_faces(), Errc::face_data_missing, "boundaries need faces");
    const std::int32_t n_cl = std::int32_t(T.clusters.size());
    auto depth = T.depths();

    std::vector<std::vector<EdgeId>> bedges(n_cl);
    // face classification helper relative to cluster c
    auto face_type = [&](FaceId f, std::int32_t c) {
        // 0 = all in C + offspring, 1 = contains parent vertex, 2 = other
        bool all_in = true, has_parent = false;
        for (VertexId w : G.faces[f].verts) {
            std::int32_t cw = T.cluster_of[w];
            if (cw == T.parent[c] && c != T.root) has_parent = true;
            if (!(cw == c || T.is_ancestor(c, cw, depth))) all_in = false;
        }
        if (all_in) return 0;
        if (has_parent) return 1;
        return 2;
    };

    for (EdgeId e = 0; e < G.m(); ++e) {
        std::int32_t c = T.cluster_of[G.edges[e].u];
        if (c != T.cluster_of[G.edges[e].v] || c == T.root) continue;
        FaceId f0 = G.edge_faces[e][0], f1 = G.edge_faces[e][1];
        int t0 = (f0 == kNoFace) ? 1 : face_type(f0, c); // missing box face sees the ocean
        int t1 = (f1 == kNoFace) ? 1 : face_type(f1, c);
        if ((t0 == 0 && t1 == 1) || (t0 == 1 && t1 == 0)) bedges[c].push_back(e);
    }

    // vertices of C outside the boundary are exactly those whose every face
    // contains a parent vertex; move them up
    ClusterBoundary out;
    out.tree = T;
    std::vector<std::vector<FaceId>> vertex_faces(G.n());
    for (FaceId f = 0; f < G.faces.size(); ++f)
        for (VertexId w : G.faces[f].verts) vertex_faces[w].push_back(f);
    for (std::int32_t c = 0; c < n_cl; ++c) {
        if (c == T.root) continue;
        const bool parent_is_ocean = G.topology == Topology::box && T.parent[c] == T.root;
        for (VertexId v : T.clusters[c]) {
            bool all_parent = true;
            // missing exterior faces on a box contain only the ocean
            if (G.topology == Topology::box && vertex_faces[v].size() < std::size_t(G.degree) &&
                !parent_is_ocean)
                all_parent = false;
            for (FaceId f : vertex_faces[v]) {
                if (!all_parent) break;
                bool has_parent = false;
                for (VertexId w : G.faces[f].verts)
                    if (T.cluster_of[w] == T.parent[c]) has_parent = true;
                if (!has_parent) all_parent = false;
            }
            if (all_parent) out.tree.cluster_of[v] = T.parent[c];
        }
    }
    // rebuild vertex lists (no cluster removal: ids stay stable; empties allowed)
    for (auto& cs : out.tree.clusters) cs.clear();
    for (VertexId v = 0; v < G.n(); ++v) {
        std::int32_t c = out.tree.cluster_of[v];
        if (c >= 0) out.tree.clusters[c].push_back(v);
    }

    out.edges = std::move(bedges);
    out.incidence_count.assign(n_cl, {});
    for (std::int32_t c = 0; c < n_cl; ++c)
        for (EdgeId e : out.edges[c]) {
            out.incidence_count[c][G.edges[e].u]++;
            out.incidence_count[c][G.edges[e].v]++;
        }
    return out;
}

} // namespace schreier
