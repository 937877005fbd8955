#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <vector>

#include "schreier/pipelines.hpp"

namespace schreier {

inline void check_perfect_matching(const LatticeGraph& H, const Matching2& M) {
    std::vector<int> cover(H.n(), 0);
    for (auto [a, b] : M) {
        require(H.find_edge(a, b) != kNoEdge, Errc::bad_input, "matching pair is not an edge");
        ++cover[a];
        ++cover[b];
    }
    for (VertexId v = 0; v < H.n(); ++v)
        require(cover[v] == 1, Errc::bad_input, "matching does not cover vertex once");
}

namespace detail {

// one 2-factor of an even-regular multigraph component, via an eulerian
// orientation and a perfect matching of the tail/head bipartite graph
struct SmallGraph {
    int n = 0;
    std::vector<std::array<int, 2>> edges; // endpoints (component-local ids)
};

inline std::vector<int> one_two_factor(const SmallGraph& g, std::uint64_t seed) {
    const int n = g.n, m = int(g.edges.size());
    // eulerian orientation: walk closed trails
    std::vector<std::vector<int>> at(n);
    for (int e = 0; e < m; ++e) {
        at[g.edges[e][0]].push_back(e);
        at[g.edges[e][1]].push_back(e);
    }
    std::vector<int> head(m, -1);
    std::vector<std::uint8_t> used(m, 0);
    for (int e0 = 0; e0 < m; ++e0) {
        if (used[e0]) continue;
        int v = g.edges[e0][0], e = e0;
        while (e >= 0) {
            used[e] = 1;
            int w = g.edges[e][0] == v ? g.edges[e][1] : g.edges[e][0];
            head[e] = w;
            v = w;
            e = -1;
            for (int cand : at[v])
                if (!used[cand]) {
                    e = cand;
                    break;
                }
        }
    }
    // bipartite graph: tails -> heads, k-regular; perfect matching by
    // augmenting paths, scan order rotated by the seed
    std::vector<std::vector<std::pair<int, int>>> out(n); // tail -> (head, edge)
    for (int e = 0; e < m; ++e) {
        int h = head[e], t = g.edges[e][0] == h ? g.edges[e][1] : g.edges[e][0];
        out[t].push_back({h, e});
    }
    std::vector<int> match_head(n, -1), match_edge(n, -1); // per head: tail, edge
    std::vector<std::uint8_t> seen(n, 0);
    std::function<bool(int)> augment = [&](int tail) {
        for (auto [h, e] : out[tail]) {
            if (seen[h]) continue;
            seen[h] = 1;
            if (match_head[h] < 0 || augment(match_head[h])) {
                match_head[h] = tail;
                match_edge[h] = e;
                return true;
            }
        }
        return false;
    };
    for (int i = 0; i < n; ++i) {
        int tail = int((std::uint64_t(i) + seed) % std::uint64_t(n));
        std::fill(seen.begin(), seen.end(), 0);
        bool ok = augment(tail);
        require(ok, Errc::residual_decomposition_failed, "no perfect matching in split graph");
    }
    std::vector<int> picked;
    for (int h = 0; h < n; ++h) picked.push_back(match_edge[h]);
    std::sort(picked.begin(), picked.end());
    return picked;
}

} // namespace detail

// Decompose an even-regular graph component into 2-factors (repeated matching
// extraction); returns per-edge factor index 0..(deg/2 - 1).
inline std::vector<int> two_factorize(const std::vector<std::array<int, 2>>& edges, int n,
                                      std::uint64_t seed) {
    std::vector<int> factor(edges.size(), -1);
    std::vector<int> alive(edges.size());
    std::iota(alive.begin(), alive.end(), 0);
    int round = 0;
    while (!alive.empty()) {
        detail::SmallGraph g;
        g.n = n;
        for (int e : alive) g.edges.push_back(edges[e]);
        auto picked = detail::one_two_factor(g, mix64(seed + std::uint64_t(round)));
        std::vector<std::uint8_t> del(alive.size(), 0);
        for (int p : picked) {
            factor[alive[p]] = round;
            del[p] = 1;
        }
        std::vector<int> rest;
        for (std::size_t i = 0; i < alive.size(); ++i)
            if (!del[i]) rest.push_back(alive[i]);
        alive = std::move(rest);
        ++round;
    }
    return factor;
}

// ---------------------------------------------------------------------------
// Schreier decoration of H x C_m for H with a designated perfect matching:
// 4-independent layers anchor matched double layers, gaps complete the colour
// c_1 2-factor, residual components are 2-factorised into the other colours.
// With `tightened`, gaps are tiled by pairs and one triple, capping c_1
// cycles at 3|V(H)|.
// ---------------------------------------------------------------------------

struct ProductOptions {
    bool tightened = false;
};

inline DecorationRun schreier_product(const LatticeGraph& P, const LatticeGraph& H,
                                      const Matching2& M, const LabelField& field,
                                      const ProductOptions& opt = {}) {
    require(P.kind == LatticeKind::product, Errc::wrong_kind, "product window required");
    require(int(H.n()) == P.cell_size, Errc::bad_input, "product does not match H");
    const int m = P.dims[0], nh = int(H.n());
    require(m >= 10, Errc::unsupported_dims, "need m >= 10 layers");
    check_perfect_matching(H, M);
    const int d = P.degree / 2;

    auto layer_verts = [&](int i) {
        std::vector<VertexId> vs(nh);
        std::iota(vs.begin(), vs.end(), VertexId(i * nh));
        return vs;
    };
    auto cyc_dist = [&](int a, int b) {
        int diff = std::abs(a - b);
        return std::min(diff, m - diff);
    };

    DecorationRun run;
    const LabelField& f = field;

    // 4-independent layer set: radius-4 local maxima of joint layer labels
    std::vector<std::pair<std::uint64_t, int>> lab(m);
    for (int i = 0; i < m; ++i) lab[i] = {f.raw_joint(layer_verts(i), channels::product_layer), i};
    std::vector<int> S;
    for (int i = 0; i < m; ++i) {
        bool maxi = true;
        for (int j = 0; j < m; ++j)
            if (j != i && cyc_dist(i, j) <= 4 && lab[j] > lab[i]) maxi = false;
        if (maxi) S.push_back(i);
    }
    require(!S.empty(), Errc::no_independent_set, "no 4-independent layer found");

    // blocks: each anchor layer pairs with a random neighbour
    std::vector<int> kind(m, 0); // 0 free, 1 in a matched tile
    std::vector<std::array<int, 2>> tiles;
    for (int v : S) {
        int side = f.choose(layer_verts(v), channels::product_side, 2) == 0 ? 1 : m - 1;
        int w = (v + side) % m;
        tiles.push_back({v, w});
        kind[v] = kind[w] = 1;
    }
    // gaps: maximal free runs around the cycle
    std::vector<std::pair<int, int>> gaps; // (start, length)
    for (int i = 0; i < m; ++i) {
        if (kind[i] || !kind[(i + m - 1) % m]) continue;
        int len = 0;
        while (!kind[(i + len) % m]) ++len;
        gaps.push_back({i, len});
    }

    Decoration dec = Decoration::blank(P.m(), d);
    // edge lookup helpers: rung (u, i)-(u, i+1) and intra edges per layer
    std::vector<EdgeId> rung(std::size_t(m) * nh, kNoEdge);
    std::map<std::pair<int, std::pair<int, int>>, EdgeId> intra;
    for (EdgeId e = 0; e < P.m(); ++e) {
        const Edge& ed = P.edges[e];
        if (ed.dir == 0)
            rung[std::size_t(product_layer(P, ed.u)) * nh + product_h_index(P, ed.u)] = e;
        else {
            int i = product_layer(P, ed.u);
            int a = product_h_index(P, ed.u), b = product_h_index(P, ed.v);
            intra[{i, {std::min(a, b), std::max(a, b)}}] = e;
        }
    }
    auto intra_edge = [&](int layer, int a, int b) {
        return intra.at({layer, {std::min(a, b), std::max(a, b)}});
    };
    auto mark_matching = [&](int layer) {
        for (auto [a, b] : M) dec.colour[intra_edge(layer, int(a), int(b))] = 0;
    };
    auto mark_rungs = [&](int from) {
        for (int u = 0; u < nh; ++u) dec.colour[rung[std::size_t(from) * nh + u]] = 0;
    };

    for (auto [a, b] : tiles) {
        mark_matching(a);
        mark_matching(b);
        int from = (b == (a + 1) % m) ? a : b;
        mark_rungs(from);
    }
    for (auto [start, len] : gaps) {
        if (!opt.tightened) {
            mark_matching(start);
            mark_matching((start + len - 1) % m);
            for (int j2 = 0; j2 + 1 < len; ++j2) mark_rungs((start + j2) % m);
        } else {
            int pos = 0;
            while (pos < len) {
                int left = len - pos;
                if (left % 2 == 1 && left >= 3) { // triple
                    int a = (start + pos) % m;
                    mark_matching(a);
                    mark_matching((a + 2) % m);
                    mark_rungs(a);
                    mark_rungs((a + 1) % m);
                    pos += 3;
                } else {
                    int a = (start + pos) % m;
                    mark_matching(a);
                    mark_matching((a + 1) % m);
                    mark_rungs(a);
                    pos += 2;
                }
            }
        }
    }

    // residual components get the remaining colours via 2-factorisation
    {
        std::vector<std::int32_t> comp(P.n(), -1);
        std::int32_t ncomp = 0;
        for (VertexId s = 0; s < P.n(); ++s) {
            if (comp[s] >= 0) continue;
            std::deque<VertexId> q{s};
            comp[s] = ncomp;
            while (!q.empty()) {
                VertexId v = q.front();
                q.pop_front();
                for (EdgeId e : P.incident(v)) {
                    if (dec.colour[e] >= 0) continue;
                    VertexId w = P.other(e, v);
                    if (comp[w] < 0) {
                        comp[w] = ncomp;
                        q.push_back(w);
                    }
                }
            }
            ++ncomp;
        }
        std::vector<std::vector<EdgeId>> comp_edges(ncomp);
        for (EdgeId e = 0; e < P.m(); ++e)
            if (dec.colour[e] < 0) comp_edges[comp[P.edges[e].u]].push_back(e);
        for (std::int32_t cc = 0; cc < ncomp; ++cc) {
            if (comp_edges[cc].empty()) continue;
            // local ids
            std::map<VertexId, int> local;
            std::vector<VertexId> verts;
            for (EdgeId e : comp_edges[cc])
                for (VertexId v : {P.edges[e].u, P.edges[e].v})
                    if (!local.count(v)) {
                        local[v] = int(verts.size());
                        verts.push_back(v);
                    }
            std::vector<std::array<int, 2>> les;
            for (EdgeId e : comp_edges[cc])
                les.push_back({local[P.edges[e].u], local[P.edges[e].v]});
            std::uint64_t seed = f.raw_joint(verts, channels::residual_seed);
            auto factor = two_factorize(les, int(verts.size()), seed);
            for (std::size_t i = 0; i < comp_edges[cc].size(); ++i)
                dec.colour[comp_edges[cc][i]] = std::int16_t(1 + factor[i]);
        }
    }

    finish_decoration(P, f, dec, false, true);
    run.dec = std::move(dec);
    return run;
}

} // namespace schreier
