#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "schreier/decoration.hpp"
#include "schreier/hierarchy.hpp"
#include "schreier/pipelines.hpp"

namespace schreier {

struct ReportItem {
    std::string name;
    bool pass = true;
    std::string witness; // concrete vertex/edge/cluster ids on failure
};

struct Report {
    std::vector<ReportItem> items;

    void add(const std::string& name, bool pass, const std::string& witness = "") {
        items.push_back({name, pass, pass ? "" : witness});
    }
    bool ok() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
    std::string first_witness() const {
        for (const auto& it : items)
            if (!it.pass) return it.name + (it.witness.empty() ? "" : " @ " + it.witness);
        return "";
    }
};

// ---------------------------------------------------------------------------
// Schreier validity: at every vertex exactly one incoming and one outgoing
// edge of each colour. Vertices touching undecorated edges (box margins) are
// skipped and counted.
// ---------------------------------------------------------------------------
inline Report check_schreier(const LatticeGraph& G, const Decoration& dec) {
    Report rep;
    int skipped = 0;
    bool pass = true;
    std::string witness;
    for (VertexId v = 0; v < G.n() && pass; ++v) {
        bool incomplete = false;
        std::vector<int> in(dec.d, 0), out(dec.d, 0);
        for (EdgeId e : G.incident(v)) {
            if (dec.colour[e] < 0 || dec.head[e] == kNoVertex) {
                incomplete = true;
                break;
            }
            if (dec.colour[e] >= dec.d) {
                incomplete = true;
                break;
            }
            (dec.head[e] == v ? in : out)[dec.colour[e]]++;
        }
        if (incomplete) {
            ++skipped;
            continue;
        }
        for (int c = 0; c < dec.d; ++c)
            if (in[c] != 1 || out[c] != 1) {
                pass = false;
                witness = "vertex " + std::to_string(v) + " colour " + std::to_string(c) +
                          " in=" + std::to_string(in[c]) + " out=" + std::to_string(out[c]);
                break;
            }
    }
    rep.add("schreier_validity", pass, witness);
    rep.add("schreier_skipped_margin", true, std::to_string(skipped));
    return rep;
}

inline Report check_balanced(const LatticeGraph& G, const Orientation& orient) {
    Report rep;
    bool pass = true;
    std::string witness;
    for (VertexId v = 0; v < G.n() && pass; ++v) {
        int in = 0, out = 0;
        bool incomplete = false;
        for (EdgeId e : G.incident(v)) {
            if (orient.head[e] == kNoVertex) {
                incomplete = true;
                break;
            }
            (orient.head[e] == v ? in : out)++;
        }
        if (incomplete) continue;
        if (in != out) {
            pass = false;
            witness = "vertex " + std::to_string(v) + " in=" + std::to_string(in) +
                      " out=" + std::to_string(out);
        }
    }
    rep.add("balanced", pass, witness);
    return rep;
}

inline std::vector<VertexId> unbalanced_vertices(const LatticeGraph& G,
                                                 const Orientation& orient) {
    std::vector<VertexId> bad;
    for (VertexId v = 0; v < G.n(); ++v) {
        int in = 0, out = 0;
        for (EdgeId e : G.incident(v)) (orient.head[e] == v ? in : out)++;
        if (in != out) bad.push_back(v);
    }
    return bad;
}

// ---------------------------------------------------------------------------
// Monochromatic component census: cycle lengths per colour, wrap flags.
// ---------------------------------------------------------------------------
struct ComponentCensus {
    std::vector<MonoComponent> comps;
    std::map<std::pair<int, int>, int> cycle_lengths; // (colour, length) -> count
    int non_cycles = 0;
    int wrapping_cycles = 0;

    bool all_cycles() const { return non_cycles == 0; }
    bool all_contractible() const { return non_cycles == 0 && wrapping_cycles == 0; }
};

inline ComponentCensus component_census(const LatticeGraph& G, const Decoration& dec) {
    ComponentCensus cc;
    cc.comps = monochrome_components(G, dec);
    for (const auto& mc : cc.comps) {
        if (!mc.is_cycle) {
            ++cc.non_cycles;
            continue;
        }
        cc.cycle_lengths[{mc.colour, int(mc.edges.size())}]++;
        if (!mc.contractible) ++cc.wrapping_cycles;
    }
    return cc;
}

// ---------------------------------------------------------------------------
// Hierarchy validity: partition, single root, parent links acyclic, adjacency
// only between parent and child, exact k-spacing, and the eta rule.
// ---------------------------------------------------------------------------
inline Report check_hierarchy(const LatticeGraph& G, const HierarchyTree& T, int k) {
    Report rep;

    std::vector<int> owner(G.n(), -1);
    bool partition = true;
    std::string pw;
    for (std::size_t c = 0; c < T.size(); ++c)
        for (VertexId v : T.clusters[c]) {
            if (owner[v] != -1) {
                partition = false;
                pw = "vertex " + std::to_string(v);
            }
            owner[v] = int(c);
        }
    for (VertexId v = 0; v < G.n(); ++v)
        if (owner[v] < 0) {
            partition = false;
            pw = "vertex " + std::to_string(v) + " unassigned";
        } else if (owner[v] != T.cluster_of[v]) {
            partition = false;
            pw = "vertex " + std::to_string(v) + " map mismatch";
        }
    rep.add("partition", partition, pw);

    int roots = 0;
    for (std::size_t c = 0; c < T.size(); ++c)
        if (T.parent[c] == std::int32_t(c)) ++roots;
    auto depth = T.depths();
    bool acyclic = true;
    std::string aw;
    for (std::size_t c = 0; c < T.size(); ++c)
        if (depth[c] < 0) {
            acyclic = false;
            aw = "cluster " + std::to_string(c);
        }
    rep.add("unique_root", roots == 1, std::to_string(roots) + " roots");
    rep.add("parent_links_acyclic", acyclic, aw);

    bool cond3 = true;
    std::string cw;
    auto pairs = cluster_adjacency(G, T.cluster_of, std::int32_t(T.size()));
    for (auto [a, b] : pairs)
        if (T.parent[a] != b && T.parent[b] != a) {
            cond3 = false;
            cw = "clusters " + std::to_string(a) + "," + std::to_string(b);
        }
    rep.add("adjacent_means_parent_child", cond3, cw);

    rep.add("spacing_" + std::to_string(k), is_spaced(T, G, k), "pair closer than k");

    if (T.eta_c > 0) {
        bool eta_ok = true;
        std::string ew;
        for (std::size_t c = 0; c < T.size(); ++c) {
            if (std::int32_t(c) == T.root) continue;
            int want = (T.eta[c] % T.eta_c) + 1;
            if (T.eta[T.parent[c]] != want) {
                eta_ok = false;
                ew = "cluster " + std::to_string(c);
            }
        }
        rep.add("eta_plus_one", eta_ok, ew);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// The layer-crossing invariant of balanced orientations of H x C_m: the
// forward rung count n(i) is constant in i and pairs with the reversed count
// to |V(H)|. sign compares n against |V(H)|/2.
// ---------------------------------------------------------------------------
struct ParityInvariant {
    std::vector<int> n; // forward rungs per layer
    bool constant = false;
    int sign = 0; // +1 when n > |V(H)|/2, -1 below, 0 at exactly half
};

inline ParityInvariant parity_invariant(const LatticeGraph& P, const Orientation& orient) {
    require(P.kind == LatticeKind::product, Errc::wrong_kind, "product window required");
    require(unbalanced_vertices(P, orient).empty(), Errc::not_balanced,
            "orientation is not balanced");
    const int m = P.dims[0], nh = P.cell_size;
    ParityInvariant out;
    out.n.assign(m, 0);
    for (EdgeId e = 0; e < P.m(); ++e) {
        if (P.edges[e].dir != 0) continue; // rungs only
        int layer = product_layer(P, P.edges[e].u);
        if (orient.head[e] == P.edges[e].v) out.n[layer]++;
    }
    out.constant = std::all_of(out.n.begin(), out.n.end(),
                               [&](int x) { return x == out.n[0]; });
    if (2 * out.n[0] > nh) out.sign = 1;
    else if (2 * out.n[0] < nh) out.sign = -1;
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration of balanced orientations (oracle). DFS over edges in
// id order with in/out-degree pruning; the first `shard_bits` edges can be
// pinned to a shard index so shards partition the space.
// ---------------------------------------------------------------------------
inline std::uint64_t enumerate_balanced_orientations(
    const LatticeGraph& G, const std::function<void(const Orientation&)>& cb,
    int shard_bits = 0, std::uint32_t shard = 0) {
    require(G.m() <= 30, Errc::too_large, "enumeration capped at 30 edges");
    for (VertexId v = 0; v < G.n(); ++v)
        require(G.vertex_degree(v) % 2 == 0, Errc::bad_input, "odd degree vertex");
    const int m = int(G.m());
    std::vector<int> in(G.n(), 0), out(G.n(), 0);
    std::vector<int> cap(G.n());
    for (VertexId v = 0; v < G.n(); ++v) cap[v] = G.vertex_degree(v) / 2;
    Orientation orient = Orientation::blank(G.m());
    std::uint64_t count = 0;

    std::function<void(int)> go = [&](int e) {
        if (e == m) {
            ++count;
            if (cb) cb(orient);
            return;
        }
        VertexId u = G.edges[e].u, v = G.edges[e].v;
        const bool pinned = e < shard_bits;
        for (int dir = 0; dir < 2; ++dir) {
            if (pinned && (int((shard >> e) & 1) != dir)) continue;
            VertexId t = dir == 0 ? u : v, h = dir == 0 ? v : u;
            if (out[t] == cap[t] || in[h] == cap[h]) continue;
            ++out[t];
            ++in[h];
            orient.head[e] = h;
            go(e + 1);
            --out[t];
            --in[h];
        }
        orient.head[e] = kNoVertex;
    };
    go(0);
    return count;
}

// ---------------------------------------------------------------------------
// Locality probe: rerun a pipeline with all labels outside `region` resampled;
// true when the decoration at v never changes.
// ---------------------------------------------------------------------------
inline LabelField resampled_outside(const LabelField& base, const std::set<VertexId>& region,
                                    std::uint64_t trial) {
    LabelField f = base.with_salt(mix64(channels::probe_resample) + trial);
    LabelField orig = base;
    auto reg = std::make_shared<std::set<VertexId>>(region);
    f.override_fn = [orig, reg](VertexId v, std::uint32_t ch) -> std::optional<std::uint64_t> {
        if (reg->count(v)) return orig.raw(v, ch);
        return std::nullopt;
    };
    return f;
}

inline bool locality_probe(const LatticeGraph& G,
                           const std::function<Decoration(const LabelField&)>& pipeline,
                           const LabelField& base, VertexId v,
                           const std::set<VertexId>& region, int trials) {
    Decoration ref = pipeline(base);
    for (int t = 1; t <= trials; ++t) {
        Decoration probe = pipeline(resampled_outside(base, region, std::uint64_t(t)));
        for (EdgeId e : G.incident(v))
            if (probe.colour[e] != ref.colour[e] || probe.head[e] != ref.head[e]) return false;
    }
    return true;
}

inline std::set<VertexId> ball(const LatticeGraph& G, VertexId v, int radius) {
    std::set<VertexId> out{v};
    std::deque<std::pair<VertexId, int>> q{{v, 0}};
    while (!q.empty()) {
        auto [w, d] = q.front();
        q.pop_front();
        if (d == radius) continue;
        for (EdgeId e : G.incident(w)) {
            VertexId x = G.other(e, w);
            if (out.insert(x).second) q.push_back({x, d + 1});
        }
    }
    return out;
}

} // namespace schreier
