#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "schreier/decoration.hpp"
#include "schreier/hierarchy.hpp"

namespace schreier {

struct TrialStats {
    int retries = 0;
    int rejected_wrapping_cluster = 0;
    int rejected_ambiguous = 0;
    int rejected_wrapping_cycle = 0;
    int rejected_spacing = 0;
};

struct DecorationRun {
    Decoration dec;
    Orientation orient; // balanced-orientation pipeline only
    HierarchyTree tree;
    TrialStats stats;
    std::vector<int> recoloured;                          // per-vertex (square family)
    std::vector<std::vector<EdgeId>> cluster_boundaries;  // triangular: rerouted, kagome: post-fix
};

// Exact spacing audit: a foreign cluster (not the parent, not a child) within
// graph distance < k of any cluster is a violation.
inline bool is_spaced(const HierarchyTree& T, const LatticeGraph& G, int k) {
    std::vector<int> dist(G.n(), -1);
    std::vector<VertexId> touched;
    std::deque<VertexId> q;
    for (std::size_t c = 0; c < T.size(); ++c) {
        if (T.clusters[c].empty()) continue;
        touched.clear();
        q.clear();
        for (VertexId v : T.clusters[c]) {
            dist[v] = 0;
            touched.push_back(v);
            q.push_back(v);
        }
        bool ok = true;
        while (!q.empty()) {
            VertexId v = q.front();
            q.pop_front();
            if (dist[v] >= k - 1) continue;
            for (EdgeId e : G.incident(v)) {
                VertexId w = G.other(e, v);
                if (dist[w] >= 0) continue;
                std::int32_t cw = T.cluster_of[w];
                if (cw != std::int32_t(c) && cw != T.parent[c] &&
                    T.parent[cw] != std::int32_t(c)) {
                    ok = false;
                    q.clear();
                    break;
                }
                dist[w] = dist[v] + 1;
                touched.push_back(w);
                q.push_back(w);
            }
        }
        for (VertexId v : touched) dist[v] = -1;
        if (!ok) return false;
    }
    return true;
}

template <class Fn>
auto run_with_retries(const LabelField& field, int max_retries, TrialStats& stats, Fn&& body) {
    for (int trial = 0;; ++trial) {
        LabelField f = trial == 0 ? field : field.with_salt(0x7452aa17ULL * std::uint64_t(trial));
        try {
            return body(f);
        } catch (const Error& err) {
            switch (err.code()) {
                case Errc::wrapping_cluster: ++stats.rejected_wrapping_cluster; break;
                case Errc::ambiguous_parent: ++stats.rejected_ambiguous; break;
                case Errc::wrapping_monochrome_cycle: ++stats.rejected_wrapping_cycle; break;
                case Errc::insufficient_spacing: ++stats.rejected_spacing; break;
                default: throw;
            }
            if (trial >= max_retries)
                fail(Errc::retries_exhausted,
                     "trial rejected " + std::to_string(trial + 1) + " times");
            ++stats.retries;
        }
    }
}

namespace detail {

inline int ceil_log2(int k) {
    int m = 0;
    while ((1 << m) < k) ++m;
    return m;
}

// percolation -> tree -> coarsen -> space(target) [-> colorize(c, k)] -> boundary reassignment
inline HierarchyTree spaced_hierarchy(const LatticeGraph& G, const LabelField& f, int target,
                                      int colours, int k, bool reassign) {
    auto cl = percolation_clusters(G, f);
    auto t = build_hierarchy(G, cl);
    const int m = ceil_log2(target) + 1;
    t = coarsen(t, f, m);
    t = space(t, G, target);
    if (colours > 0) t = colorize(t, G, colours, k);
    if (reassign) t = boundary(t, G).tree;
    return t;
}

inline VertexId argmax_label(const LabelField& f, std::span<const VertexId> verts,
                             std::uint32_t channel) {
    VertexId best = verts[0];
    std::uint64_t br = f.raw(best, channel);
    for (VertexId v : verts) {
        std::uint64_t r = f.raw(v, channel);
        if (std::pair(r, v) > std::pair(br, best)) {
            best = v;
            br = r;
        }
    }
    return best;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Square-lattice Schreier decoration. Works on any two-direction square view
// (the plain lattice or a diagonal sublattice of the crossed lattice): odd
// clusters lay monochromatic C4 tilings, even clusters direction bijections,
// and the guard rule amalgamates them.
// ---------------------------------------------------------------------------

struct SquareView {
    const LatticeGraph* g = nullptr;
    std::vector<std::array<std::int32_t, 2>> xy; // integer pattern coordinates

    static SquareView standard(const LatticeGraph& G) {
        SquareView v;
        v.g = &G;
        v.xy.resize(G.n());
        if (G.kind == LatticeKind::square) {
            const int w = G.dims[0];
            for (VertexId u = 0; u < G.n(); ++u) v.xy[u] = {std::int32_t(u) % w, std::int32_t(u) / w};
        } else {
            require(!G.sq_xy.empty(), Errc::wrong_kind, "no square coordinates on this view");
            v.xy = G.sq_xy;
        }
        return v;
    }

    int axis(EdgeId e) const { return g->edges[e].dir; }
    int phase(EdgeId e) const { return int(xy[g->edges[e].u][axis(e)] & 1); }
};

struct SquarePatterns {
    std::vector<std::array<std::uint8_t, 2>> anchor; // odd clusters
    std::vector<std::uint8_t> tau;                   // even clusters
};

inline SquarePatterns square_patterns(const SquareView& V, const HierarchyTree& T,
                                      const LabelField& f) {
    SquarePatterns P;
    P.anchor.assign(T.size(), {0, 0});
    P.tau.assign(T.size(), 0);
    for (std::size_t c = 0; c < T.size(); ++c) {
        if (T.clusters[c].empty()) continue;
        if (T.eta[c] % 2 == 1) {
            VertexId a = detail::argmax_label(f, T.clusters[c], channels::square_anchor);
            std::array<VertexId, 1> one{a};
            std::uint32_t k = f.choose(one, channels::square_anchor_c4, 4);
            P.anchor[c] = {std::uint8_t((V.xy[a][0] + (k & 1)) & 1),
                           std::uint8_t((V.xy[a][1] + (k >> 1)) & 1)};
        } else {
            P.tau[c] = std::uint8_t(f.choose(T.clusters[c], channels::interface_bit, 2));
        }
    }
    return P;
}

struct SquareColouring {
    std::vector<std::int16_t> colour;
    std::vector<int> recoloured; // per vertex, counted at odd-cluster vertices
};

inline SquareColouring square_amalgamate(const SquareView& V, const HierarchyTree& T,
                                         const SquarePatterns& P, int colour_lo = 0) {
    const LatticeGraph& G = *V.g;
    SquareColouring out;
    out.colour.assign(G.m(), -1);
    out.recoloured.assign(G.n(), 0);
    auto inner = [&](std::int32_t c, EdgeId e) {
        int ax = V.axis(e);
        return (V.phase(e) ^ P.anchor[c][ax]) == 0 ? 0 : 1;
    };
    auto interface_col = [&](std::int32_t c, EdgeId e) { return V.axis(e) ^ P.tau[c]; };

    for (EdgeId e = 0; e < G.m(); ++e) {
        std::int32_t cu = T.cluster_of[G.edges[e].u], cv = T.cluster_of[G.edges[e].v];
        int col;
        if (T.eta[cu] % 2 == 0 || T.eta[cv] % 2 == 0) {
            std::int32_t c = (T.eta[cu] % 2 == 0) ? cu : cv;
            col = interface_col(c, e);
        } else {
            require(cu == cv, Errc::insufficient_spacing, "odd clusters touch");
            int want = inner(cu, e);
            col = want;
            for (VertexId v : {G.edges[e].u, G.edges[e].v})
                for (EdgeId g : G.incident(v)) {
                    if (g == e || V.axis(g) == V.axis(e)) continue;
                    VertexId far = G.other(g, v);
                    std::int32_t cf = T.cluster_of[far];
                    if (cf == cu) continue;
                    if (interface_col(cf, g) != inner(cu, g)) col = interface_col(cf, e);
                }
        }
        out.colour[e] = std::int16_t(col + colour_lo);
    }
    // recolouring audit data: edges at odd-cluster vertices vs the inner extension
    for (EdgeId e = 0; e < G.m(); ++e)
        for (VertexId v : {G.edges[e].u, G.edges[e].v}) {
            std::int32_t c = T.cluster_of[v];
            if (T.eta[c] % 2 == 1 && !T.clusters[c].empty())
                if (out.colour[e] - colour_lo != inner(c, e)) out.recoloured[v]++;
        }
    return out;
}

// components must be cycles on a torus (contractible, or the trial is
// rejected); box windows may leave margin paths, oriented along their walk
inline void finish_decoration(const LatticeGraph& G, const LabelField& f, Decoration& dec,
                              bool allow_paths, bool reject_wrapping) {
    auto comps = monochrome_components(G, dec);
    std::vector<MonoComponent> cycles;
    for (auto& mc : comps) {
        if (!mc.is_cycle) {
            require(allow_paths && !mc.verts.empty(), Errc::non_cycle_component,
                    "monochromatic component is not a cycle");
            // orient paths consistently along the walk
            for (std::size_t i = 0; i + 1 < mc.verts.size(); ++i)
                dec.head[mc.edges[i]] = mc.verts[i + 1];
            continue;
        }
        if (reject_wrapping)
            require(mc.contractible, Errc::wrapping_monochrome_cycle,
                    "monochromatic cycle wraps the torus");
        cycles.push_back(std::move(mc));
    }
    orient_cycles(G, cycles, f, dec);
}

struct SquareOptions {
    int k = 8;
    int max_retries = 16;
    int colour_lo = 0; // colour offset (crossed-lattice sublattices)
    // alternative hierarchy source (e.g. the toast construction); must yield a
    // 2-coloured k-spaced tree
    std::function<HierarchyTree(const LatticeGraph&, const LabelField&)> hierarchy_override;
};

inline DecorationRun schreier_square_view(const SquareView& V, const LabelField& field,
                                          const SquareOptions& opt) {
    const LatticeGraph& G = *V.g;
    require(opt.k >= 8, Errc::bad_input, "square construction needs k >= 8");
    DecorationRun run;
    run.dec = run_with_retries(field, opt.max_retries, run.stats, [&](const LabelField& f) {
        auto t = opt.hierarchy_override ? opt.hierarchy_override(G, f)
                                        : detail::spaced_hierarchy(G, f, 2 * opt.k, 2, opt.k, true);
        require(is_spaced(t, G, opt.k), Errc::insufficient_spacing, "spacing audit failed");
        auto pats = square_patterns(V, t, f);
        auto col = square_amalgamate(V, t, pats, opt.colour_lo);
        Decoration dec = Decoration::blank(G.m(), 2);
        dec.colour = col.colour;
        if (G.topology == Topology::box) {
            // leave a margin of width 2k undecorated; only the interior is
            // verified on box windows
            std::vector<int> dist(G.n(), -1);
            std::deque<VertexId> q;
            for (VertexId v = 0; v < G.n(); ++v)
                if (G.vertex_degree(v) < G.degree) {
                    dist[v] = 0;
                    q.push_back(v);
                }
            while (!q.empty()) {
                VertexId v = q.front();
                q.pop_front();
                if (dist[v] >= 2 * opt.k) continue;
                for (EdgeId e : G.incident(v)) {
                    VertexId w = G.other(e, v);
                    if (dist[w] < 0) {
                        dist[w] = dist[v] + 1;
                        q.push_back(w);
                    }
                }
            }
            for (EdgeId e = 0; e < G.m(); ++e)
                if (dist[G.edges[e].u] >= 0 || dist[G.edges[e].v] >= 0) dec.colour[e] = -1;
        }
        finish_decoration(G, f, dec, G.topology == Topology::box,
                          G.topology == Topology::torus);
        run.tree = std::move(t);
        run.recoloured = std::move(col.recoloured);
        return dec;
    });
    return run;
}

inline DecorationRun schreier_square(const LatticeGraph& G, const LabelField& field,
                                     const SquareOptions& opt = {}) {
    require(G.kind == LatticeKind::square, Errc::wrong_kind, "square pipeline needs a square window");
    if (G.topology == Topology::torus)
        require(G.dims[0] % 2 == 0 && G.dims[1] % 2 == 0, Errc::unsupported_dims,
                "C4 patterns need even torus sides");
    return schreier_square_view(SquareView::standard(G), field, opt);
}

// ---------------------------------------------------------------------------
// Triangular lattice (d = 3). Odd clusters fix a direction colour (green at
// level 1, blue at level 3) and tile the remaining square lattice with C4s;
// even clusters carry direction-to-colour bijections.
// ---------------------------------------------------------------------------

namespace detail {

inline std::array<int, 2> tri_sheet_xy(int x, int y, int delta) {
    switch (delta) {
        case 0: return {y + x, -x}; // kept generators (0,1), (-1,1)
        case 1: return {x + y, y};  // kept (1,0), (-1,1)
        default: return {x, y};     // kept (1,0), (0,1)
    }
}

} // namespace detail

struct TriangularOptions {
    int k = 8;
    int max_retries = 16;
};

inline DecorationRun schreier_triangular(const LatticeGraph& G, const LabelField& field,
                                         const TriangularOptions& opt = {}) {
    require(G.kind == LatticeKind::triangular, Errc::wrong_kind, "triangular window required");
    require(G.topology == Topology::torus, Errc::unsupported_dims, "torus windows only");
    require(G.dims[0] % 2 == 0 && G.dims[1] % 2 == 0, Errc::unsupported_dims,
            "C4 patterns need even torus sides");
    require(opt.k >= 8, Errc::bad_input, "triangular construction needs k >= 8");
    const int w = G.dims[0];

    DecorationRun run;
    run.dec = run_with_retries(field, opt.max_retries, run.stats, [&](const LabelField& f) {
        auto t = detail::spaced_hierarchy(G, f, 4 * opt.k, 4, opt.k, true);
        require(is_spaced(t, G, opt.k), Errc::insufficient_spacing, "spacing audit failed");
        const std::int32_t n_cl = std::int32_t(t.size());
        auto kids = t.children();
        auto depth = t.depths();

        // directions: odd sibling groups choose together, avoiding their odd
        // grandparent's direction; the root picks freely
        std::vector<int> delta(n_cl, -1);
        std::vector<std::int32_t> order(n_cl);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::int32_t a, std::int32_t b) { return depth[a] < depth[b]; });
        std::vector<VertexId> group_verts;
        for (std::int32_t c : order) {
            if (t.eta[c] % 2 == 0 || delta[c] >= 0) continue;
            if (c == t.root) {
                delta[c] = int(f.choose(t.clusters[c], channels::tri_direction, 3));
                continue;
            }
            std::int32_t p = t.parent[c]; // even
            std::int32_t gp = t.parent[p];
            group_verts.clear();
            for (std::int32_t sib : kids[p])
                group_verts.insert(group_verts.end(), t.clusters[sib].begin(),
                                   t.clusters[sib].end());
            int avoid = delta[gp];
            int pick = int(f.choose(group_verts, channels::tri_direction, 2));
            int dir = 0;
            for (int cand = 0, cnt = 0; cand < 3; ++cand) {
                if (cand == avoid) continue;
                if (cnt++ == pick) dir = cand;
            }
            for (std::int32_t sib : kids[p]) delta[sib] = dir;
        }
        auto fixed_colour = [&](std::int32_t c) { return t.eta[c] == 1 ? 2 : 1; }; // green / blue

        // C4 anchors per odd cluster (on its own sheet coordinates)
        std::vector<std::array<std::uint8_t, 2>> anchor(n_cl, {0, 0});
        for (std::int32_t c = 0; c < n_cl; ++c)
            if (t.eta[c] % 2 == 1 && !t.clusters[c].empty()) {
                std::uint32_t kk = f.choose(t.clusters[c], channels::tri_anchor, 4);
                anchor[c] = {std::uint8_t(kk & 1), std::uint8_t(kk >> 1)};
            }

        // interface bijections
        std::vector<std::array<int, 3>> pi(n_cl, {-1, -1, -1});
        for (std::int32_t c = 0; c < n_cl; ++c) {
            if (t.eta[c] % 2 == 1 || t.clusters[c].empty()) continue;
            std::int32_t p = t.parent[c];
            std::array<int, 3> m{-1, -1, -1};
            m[delta[p]] = fixed_colour(p);
            if (!kids[c].empty()) {
                std::int32_t ch = kids[c][0];
                m[delta[ch]] = fixed_colour(ch);
                for (int dd = 0; dd < 3; ++dd)
                    if (m[dd] < 0)
                        for (int col = 0; col < 3; ++col)
                            if (col != m[delta[p]] && col != m[delta[ch]]) m[dd] = col;
            } else {
                // two bijections remain; pick one
                int b = int(f.choose(t.clusters[c], channels::tri_interface, 2));
                std::vector<int> dirs, cols;
                for (int dd = 0; dd < 3; ++dd)
                    if (dd != delta[p]) dirs.push_back(dd);
                for (int col = 0; col < 3; ++col)
                    if (col != m[delta[p]]) cols.push_back(col);
                m[dirs[0]] = cols[b];
                m[dirs[1]] = cols[1 - b];
            }
            pi[c] = m;
        }

        // colouring
        auto sheet_axes = [&](int d_drop) {
            std::array<int, 2> a{};
            int idx = 0;
            for (int dd = 0; dd < 3; ++dd)
                if (dd != d_drop) a[idx++] = dd;
            return a; // ascending
        };
        auto sheet_cols = [&](std::int32_t c) {
            std::array<int, 2> cols{};
            int idx = 0;
            for (int col = 0; col < 3; ++col)
                if (col != fixed_colour(c)) cols[idx++] = col;
            return cols; // ascending
        };
        auto inner_col = [&](std::int32_t c, EdgeId e) {
            auto axes = sheet_axes(delta[c]);
            int ax = (G.edges[e].dir == axes[0]) ? 0 : 1;
            VertexId u = G.edges[e].u; // + direction tail
            auto sxy = detail::tri_sheet_xy(int(u) % w, int(u) / w, delta[c]);
            int phase = sxy[ax] & 1;
            auto cols = sheet_cols(c);
            return (phase ^ anchor[c][ax]) == 0 ? cols[0] : cols[1];
        };

        Decoration dec = Decoration::blank(G.m(), 3);
        for (EdgeId e = 0; e < G.m(); ++e) {
            std::int32_t cu = t.cluster_of[G.edges[e].u], cv = t.cluster_of[G.edges[e].v];
            int col;
            if (t.eta[cu] % 2 == 0 || t.eta[cv] % 2 == 0) {
                std::int32_t c = (t.eta[cu] % 2 == 0) ? cu : cv;
                col = pi[c][G.edges[e].dir];
            } else {
                require(cu == cv, Errc::insufficient_spacing, "odd clusters touch");
                if (G.edges[e].dir == delta[cu])
                    col = fixed_colour(cu);
                else {
                    col = inner_col(cu, e);
                    auto axes = sheet_axes(delta[cu]);
                    int other_dir = (G.edges[e].dir == axes[0]) ? axes[1] : axes[0];
                    for (VertexId v : {G.edges[e].u, G.edges[e].v})
                        for (EdgeId g : G.incident(v)) {
                            if (int(G.edges[g].dir) != other_dir) continue;
                            VertexId far = G.other(g, v);
                            std::int32_t cf = t.cluster_of[far];
                            if (cf == cu) continue;
                            if (pi[cf][G.edges[g].dir] != inner_col(cu, g))
                                col = pi[cf][G.edges[e].dir];
                        }
                }
            }
            dec.colour[e] = std::int16_t(col);
        }

        // rerouted boundaries, for verification: boundaries must travel only in
        // the two directions not fixed by the odd cluster of each pair
        auto b = boundary(t, G);
        run.cluster_boundaries.assign(n_cl, {});
        for (std::int32_t c = 0; c < n_cl; ++c) {
            if (std::int32_t(c) == t.root) continue;
            int d_avoid = (t.eta[c] % 2 == 1) ? delta[c] : delta[t.parent[c]];
            std::vector<EdgeId> res;
            for (EdgeId e : b.edges[c]) {
                if (int(G.edges[e].dir) != d_avoid) {
                    res.push_back(e);
                    continue;
                }
                VertexId u = G.edges[e].u, v = G.edges[e].v;
                VertexId apex = kNoVertex;
                for (FaceId fc : G.edge_faces[e])
                    for (VertexId x : G.faces[fc].verts)
                        if (x != u && x != v && t.cluster_of[x] == t.parent[c]) apex = x;
                if (apex == kNoVertex) {
                    res.push_back(e);
                    continue;
                }
                res.push_back(G.find_edge(u, apex));
                res.push_back(G.find_edge(apex, v));
            }
            run.cluster_boundaries[c] = std::move(res);
        }

        // direction-colour lines through the root never bend on a finite
        // window, so wrapping cycles are reported by the census, not rejected
        finish_decoration(G, f, dec, false, false);
        run.tree = std::move(t);
        return dec;
    });
    return run;
}

// ---------------------------------------------------------------------------
// Kagome lattice (d = 2): monochromatic-triangle patterns, boundary triangle
// fix, opposite-colour rule at disagreeing boundaries.
// ---------------------------------------------------------------------------

struct KagomeOptions {
    int k = 4;
    int max_retries = 16;
};

inline DecorationRun schreier_kagome(const LatticeGraph& G, const LabelField& field,
                                     const KagomeOptions& opt = {}) {
    require(G.kind == LatticeKind::kagome, Errc::wrong_kind, "kagome window required");
    require(G.topology == Topology::torus, Errc::unsupported_dims, "torus windows only");
    require(opt.k >= 4, Errc::bad_input, "kagome construction needs k >= 4");

    // each edge lies in exactly one triangle; up = face idx % 3 == 0
    auto triangle_of = [&](EdgeId e) {
        for (FaceId fc : G.edge_faces[e])
            if (G.faces[fc].size() == 3) return fc;
        return kNoFace;
    };

    DecorationRun run;
    run.dec = run_with_retries(field, opt.max_retries, run.stats, [&](const LabelField& f) {
        auto t0 = detail::spaced_hierarchy(G, f, opt.k, 0, 0, false);
        auto b = boundary(t0, G);
        auto& t = b.tree;
        require(is_spaced(t, G, opt.k), Errc::insufficient_spacing, "spacing audit failed");
        const std::int32_t n_cl = std::int32_t(t.size());

        // patterns: bit 0 -> up triangles red, bit 1 -> swapped
        std::vector<std::uint8_t> pat(n_cl, 0);
        for (std::int32_t c = 0; c < n_cl; ++c)
            if (!t.clusters[c].empty())
                pat[c] = std::uint8_t(f.choose(t.clusters[c], channels::kagome_pattern, 2));
        auto pat_colour = [&](std::uint8_t p, FaceId tri) {
            bool up = (tri % 3 == 0);
            return int((up ? 0 : 1) ^ p);
        };

        // triangle fix: two boundary edges of one triangle become the third
        std::vector<std::int32_t> bcluster(G.m(), -1);
        run.cluster_boundaries.assign(n_cl, {});
        for (std::int32_t c = 0; c < n_cl; ++c) {
            if (b.edges[c].empty()) continue;
            std::map<FaceId, std::vector<EdgeId>> per_tri;
            for (EdgeId e : b.edges[c]) per_tri[triangle_of(e)].push_back(e);
            std::vector<EdgeId> fixed;
            for (auto& [tri, es] : per_tri) {
                if (es.size() == 2) {
                    EdgeId third = kNoEdge;
                    for (EdgeId cand : G.faces[tri].edges)
                        if (cand != es[0] && cand != es[1]) third = cand;
                    fixed.push_back(third);
                } else {
                    for (EdgeId e : es) fixed.push_back(e);
                }
            }
            std::sort(fixed.begin(), fixed.end());
            // the fix must leave vertex-disjoint cycles; adjacent full
            // triangles (rare small-cluster degenerations) cannot be repaired
            std::map<VertexId, int> degv;
            for (EdgeId e : fixed) {
                degv[G.edges[e].u]++;
                degv[G.edges[e].v]++;
            }
            for (auto& [v, cnt] : degv)
                require(cnt == 2, Errc::wrapping_monochrome_cycle,
                        "boundary is not vertex-disjoint after the triangle fix");
            for (EdgeId e : fixed) bcluster[e] = c;
            run.cluster_boundaries[c] = std::move(fixed);
        }

        // colouring: patterns everywhere off the boundaries
        auto nonboundary_colour = [&](EdgeId e) {
            std::int32_t cu = t.cluster_of[G.edges[e].u], cv = t.cluster_of[G.edges[e].v];
            std::int32_t govern = cu;
            if (cu != cv) govern = (t.parent[cu] == cv) ? cv : cu; // parent side
            return pat_colour(pat[govern], triangle_of(e));
        };
        Decoration dec = Decoration::blank(G.m(), 2);
        for (EdgeId e = 0; e < G.m(); ++e)
            if (bcluster[e] < 0) dec.colour[e] = std::int16_t(nonboundary_colour(e));

        // boundaries: matching patterns propagate; disagreeing ones complete
        // the per-vertex colour balance by propagation around each cycle (the
        // generic case reduces to the opposite-colour rule)
        for (std::int32_t c = 0; c < n_cl; ++c) {
            const auto& edges = run.cluster_boundaries[c];
            if (edges.empty()) continue;
            if (pat[c] == pat[t.parent[c]]) {
                for (EdgeId e : edges) dec.colour[e] = std::int16_t(pat_colour(pat[c], triangle_of(e)));
                continue;
            }
            std::map<VertexId, std::array<int, 2>> cap; // remaining red/blue slots
            std::map<VertexId, std::vector<EdgeId>> at;
            for (EdgeId e : edges)
                for (VertexId v : {G.edges[e].u, G.edges[e].v}) {
                    if (!cap.count(v)) {
                        std::array<int, 2> seen{0, 0};
                        for (EdgeId g2 : G.incident(v))
                            if (bcluster[g2] < 0) seen[dec.colour[g2]]++;
                        cap[v] = {2 - seen[0], 2 - seen[1]};
                    }
                    at[v].push_back(e);
                }
            bool solvable = true;
            for (auto& [v, cp] : cap)
                if (cp[0] < 0 || cp[1] < 0 || cp[0] + cp[1] != int(at[v].size())) solvable = false;
            // walk the disjoint cycles so the propagation is linear
            std::vector<EdgeId> order;
            {
                std::set<EdgeId> left(edges.begin(), edges.end());
                while (!left.empty()) {
                    EdgeId e0 = *left.begin();
                    left.erase(e0);
                    order.push_back(e0);
                    VertexId v = G.edges[e0].v;
                    for (;;) {
                        EdgeId nxt = kNoEdge;
                        for (EdgeId cand : at[v])
                            if (left.count(cand)) nxt = cand;
                        if (nxt == kNoEdge) break;
                        left.erase(nxt);
                        order.push_back(nxt);
                        v = G.other(nxt, v);
                    }
                }
            }
            const int prefer = int(f.choose(t.clusters[c], channels::kagome_boundary, 2));
            std::map<EdgeId, int> assigned;
            std::function<bool(std::size_t)> solve = [&](std::size_t i) {
                if (i == order.size()) return true;
                EdgeId e = order[i];
                for (int delta = 0; delta < 2; ++delta) {
                    int col = prefer ^ delta;
                    VertexId u = G.edges[e].u, v = G.edges[e].v;
                    if (cap[u][col] == 0 || cap[v][col] == 0) continue;
                    --cap[u][col];
                    --cap[v][col];
                    assigned[e] = col;
                    if (solve(i + 1)) return true;
                    ++cap[u][col];
                    ++cap[v][col];
                }
                return false;
            };
            require(solvable && solve(0), Errc::wrapping_monochrome_cycle,
                    "boundary colouring has no balanced completion");
            for (auto& [e, col] : assigned) dec.colour[e] = std::int16_t(col);
        }

        // mixed triangles straddling a disagreeing interface can defeat the
        // boundary mediation (no boundary edge covers them); such trials are
        // rejected and resampled
        for (VertexId v = 0; v < G.n(); ++v) {
            int red = 0;
            for (EdgeId e : G.incident(v)) red += (dec.colour[e] == 0);
            require(red == 2, Errc::wrapping_monochrome_cycle,
                    "pattern conflict left vertex " + std::to_string(v) + " unbalanced");
        }

        finish_decoration(G, f, dec, false, true);
        run.tree = std::move(t);
        return dec;
    });
    return run;
}

// ---------------------------------------------------------------------------
// (3,4,6,4) lattice (d = 2): triangles red, hexagons blue, each strongly
// oriented by an independent coin. Deterministic colour layer, radius-6 local.
// ---------------------------------------------------------------------------
inline DecorationRun schreier_t3464(const LatticeGraph& G, const LabelField& field) {
    require(G.kind == LatticeKind::t3464, Errc::wrong_kind, "(3,4,6,4) window required");
    DecorationRun run;
    Decoration dec = Decoration::blank(G.m(), 2);
    for (FaceId fc = 0; fc < G.faces.size(); ++fc) {
        const Face& face = G.faces[fc];
        if (face.size() == 4) continue;
        const int col = face.size() == 3 ? 0 : 1;
        const bool fwd = field.choose(face.verts, channels::t3464_orient, 2) == 0;
        for (int i = 0; i < face.size(); ++i) {
            EdgeId e = face.edges[i];
            dec.colour[e] = std::int16_t(col);
            VertexId a = face.verts[i], bb = face.verts[(i + 1) % face.size()];
            dec.head[e] = fwd ? bb : a;
        }
    }
    run.dec = std::move(dec);
    return run;
}

// ---------------------------------------------------------------------------
// Balanced orientation of a planar lattice with all degrees even: chessboard
// face patterns per cluster, boundaries inherit or re-orient eulerianly.
// ---------------------------------------------------------------------------

struct BalancedOptions {
    int k = 8;
    int max_retries = 16;
};

inline std::vector<std::uint8_t> face_chessboard(const LatticeGraph& G) {
    // 2-colour the face-adjacency graph; exists when all degrees are even and
    // the torus sides are compatible
    std::vector<std::uint8_t> par(G.faces.size(), 255);
    std::deque<FaceId> q;
    for (FaceId s = 0; s < G.faces.size(); ++s) {
        if (par[s] != 255) continue;
        par[s] = 0;
        q.push_back(s);
        while (!q.empty()) {
            FaceId fc = q.front();
            q.pop_front();
            for (EdgeId e : G.faces[fc].edges)
                for (FaceId nb : G.edge_faces[e]) {
                    if (nb == kNoFace || nb == fc) continue;
                    if (par[nb] == 255) {
                        par[nb] = std::uint8_t(1 - par[fc]);
                        q.push_back(nb);
                    } else
                        require(par[nb] != par[fc], Errc::unsupported_dims,
                                "faces admit no chessboard colouring on this window");
                }
        }
    }
    return par;
}

inline DecorationRun balanced_orientation_planar(const LatticeGraph& G, const LabelField& field,
                                                 const BalancedOptions& opt = {}) {
    require(G.has_faces(), Errc::face_data_missing, "planar window with faces required");
    require(G.degree % 2 == 0, Errc::wrong_kind, "all degrees must be even");
    int ell = 0;
    for (const Face& fc : G.faces) ell = std::max(ell, fc.size());
    const int target = std::max(opt.k, (ell + 1 + 1) / 2);
    auto face_par = face_chessboard(G);

    DecorationRun run;
    run.orient = run_with_retries(field, opt.max_retries, run.stats, [&](const LabelField& f) {
        auto t0 = detail::spaced_hierarchy(G, f, target, 0, 0, false);
        auto b = boundary(t0, G);
        auto& t = b.tree;
        require(is_spaced(t, G, target), Errc::insufficient_spacing, "spacing audit failed");
        const std::int32_t n_cl = std::int32_t(t.size());

        std::vector<std::uint8_t> pat(n_cl, 0);
        for (std::int32_t c = 0; c < n_cl; ++c)
            if (!t.clusters[c].empty())
                pat[c] = std::uint8_t(f.choose(t.clusters[c], channels::planar_pattern, 2));

        std::vector<std::int32_t> bcluster(G.m(), -1);
        for (std::int32_t c = 0; c < n_cl; ++c)
            for (EdgeId e : b.edges[c]) bcluster[e] = c;

        Orientation orient = Orientation::blank(G.m());
        // pattern orientation: traverse each edge as its white face's ccw cycle does
        auto pattern_head = [&](EdgeId e, std::uint8_t bit) {
            FaceId white = kNoFace;
            for (FaceId fc : G.edge_faces[e])
                if (fc != kNoFace && face_par[fc] != bit) white = fc;
            if (white == kNoFace) {
                // border edge whose only face is black: cw around it
                FaceId black = G.edge_faces[e][0] != kNoFace ? G.edge_faces[e][0]
                                                             : G.edge_faces[e][1];
                const Face& fc = G.faces[black];
                for (int i = 0; i < fc.size(); ++i)
                    if (fc.edges[i] == e) return fc.verts[i];
                return kNoVertex;
            }
            const Face& fc = G.faces[white];
            for (int i = 0; i < fc.size(); ++i)
                if (fc.edges[i] == e) return fc.verts[(i + 1) % fc.size()];
            return kNoVertex;
        };

        for (EdgeId e = 0; e < G.m(); ++e) {
            if (bcluster[e] >= 0) continue;
            std::int32_t cu = t.cluster_of[G.edges[e].u], cv = t.cluster_of[G.edges[e].v];
            std::int32_t govern = cu;
            if (cu != cv) govern = (t.parent[cu] == cv) ? cv : cu;
            orient.head[e] = pattern_head(e, pat[govern]);
        }
        for (std::int32_t c = 0; c < n_cl; ++c) {
            if (b.edges[c].empty()) continue;
            if (pat[c] == pat[t.parent[c]]) {
                for (EdgeId e : b.edges[c]) orient.head[e] = pattern_head(e, pat[c]);
                continue;
            }
            // eulerian orientation of the boundary, per connected component
            std::map<VertexId, std::vector<EdgeId>> at;
            for (EdgeId e : b.edges[c]) {
                at[G.edges[e].u].push_back(e);
                at[G.edges[e].v].push_back(e);
            }
            std::map<EdgeId, std::uint8_t> used;
            for (EdgeId e : b.edges[c]) used[e] = 0;
            const bool flip = f.choose(t.clusters[c], channels::planar_euler, 2) == 1;
            for (EdgeId e0 : b.edges[c]) {
                if (used[e0]) continue;
                // hierholzer walk from e0
                std::vector<std::pair<EdgeId, VertexId>> circuit; // edge, head
                VertexId start = G.edges[e0].u;
                VertexId v = start;
                EdgeId e = e0;
                do {
                    used[e] = 1;
                    VertexId wv = G.other(e, v);
                    circuit.push_back({e, wv});
                    v = wv;
                    e = kNoEdge;
                    for (EdgeId cand : at[v])
                        if (!used[cand]) {
                            e = cand;
                            break;
                        }
                } while (e != kNoEdge);
                for (auto [ce, ch] : circuit)
                    orient.head[ce] = flip ? G.other(ce, ch) : ch;
            }
        }
        run.tree = std::move(t);
        run.cluster_boundaries = std::move(b.edges);
        return orient;
    });
    return run;
}

} // namespace schreier
