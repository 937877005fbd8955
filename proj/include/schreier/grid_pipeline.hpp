#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

#include "schreier/pipelines.hpp"

namespace schreier {

// ---------------------------------------------------------------------------
// Maximal r-discrete subsets: rounds of fresh labels, a vertex joins when its
// ball is clear of the set so far and it strictly dominates its r-ball. The
// ball maximum is computed by r neighbour-max dilations, ties broken by id.
// ---------------------------------------------------------------------------
inline std::vector<VertexId> maximal_r_discrete(const LatticeGraph& G, const LabelField& field,
                                                int r, std::uint32_t channel) {
    const std::size_t n = G.n();
    std::vector<VertexId> centers;
    if (r == 0) { // every vertex qualifies
        centers.resize(n);
        std::iota(centers.begin(), centers.end(), 0);
        return centers;
    }
    std::vector<std::uint8_t> blocked(n, 0); // within distance r of the set
    std::vector<std::pair<std::uint64_t, VertexId>> lab(n), cur(n), nxt(n);
    std::size_t blocked_count = 0;
    std::vector<VertexId> candidates; // unblocked vertices, maintained lazily

    const long max_rounds = 200000;
    for (long round = 0; round < max_rounds && blocked_count < n; ++round) {
        LabelField fr = field.with_salt(0xd15c0000ULL + std::uint64_t(round));
        std::vector<VertexId> added;
        if (n - blocked_count > n / 32) {
            // dense phase: r max-dilations give every vertex its ball maximum
            for (VertexId v = 0; v < n; ++v) {
                lab[v] = {fr.raw(v, channel), v};
                cur[v] = lab[v];
            }
            for (int step = 0; step < r; ++step) {
                for (VertexId v = 0; v < n; ++v) {
                    auto best = cur[v];
                    for (EdgeId e : G.incident(v)) best = std::max(best, cur[G.other(e, v)]);
                    nxt[v] = best;
                }
                std::swap(cur, nxt);
            }
            for (VertexId v = 0; v < n; ++v)
                if (!blocked[v] && cur[v] == lab[v]) added.push_back(v);
        } else {
            // straggler phase: few candidates left, check their balls directly
            if (candidates.empty() || candidates.size() > 4 * (n - blocked_count)) {
                candidates.clear();
                for (VertexId v = 0; v < n; ++v)
                    if (!blocked[v]) candidates.push_back(v);
            }
            std::vector<int> dist(n, -1);
            std::vector<VertexId> touched;
            for (VertexId v : candidates) {
                if (blocked[v]) continue;
                auto mine = std::pair(fr.raw(v, channel), v);
                bool maxi = true;
                std::deque<VertexId> q{v};
                dist[v] = 0;
                touched.assign(1, v);
                while (!q.empty() && maxi) {
                    VertexId x = q.front();
                    q.pop_front();
                    if (dist[x] == r) continue;
                    for (EdgeId e : G.incident(x)) {
                        VertexId w = G.other(e, x);
                        if (dist[w] >= 0) continue;
                        dist[w] = dist[x] + 1;
                        touched.push_back(w);
                        q.push_back(w);
                        if (std::pair(fr.raw(w, channel), w) > mine) {
                            maxi = false;
                            break;
                        }
                    }
                }
                for (VertexId w : touched) dist[w] = -1;
                // simultaneous winners never clash: two vertices within r of
                // each other cannot both strictly dominate their balls
                if (maxi) added.push_back(v);
            }
        }
        if (added.empty()) continue;
        centers.insert(centers.end(), added.begin(), added.end());
        // block everything within distance r of the new centers
        std::vector<int> dist(n, -1);
        std::deque<VertexId> q;
        for (VertexId v : added) {
            dist[v] = 0;
            q.push_back(v);
        }
        while (!q.empty()) {
            VertexId v = q.front();
            q.pop_front();
            if (!blocked[v]) {
                blocked[v] = 1;
                ++blocked_count;
            }
            if (dist[v] == r) continue;
            for (EdgeId e : G.incident(v)) {
                VertexId w = G.other(e, v);
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
    }
    require(blocked_count == n, Errc::bad_input, "r-discrete set failed to become maximal");
    std::sort(centers.begin(), centers.end());
    return centers;
}

// ---------------------------------------------------------------------------
// Toast hierarchy on grids: trimmed nearest-center cells around a maximal
// r0-discrete set, surrounded by the root. Cells keep a strict margin of k to
// each other, so the star tree is k-spaced by construction (audited anyway).
// ---------------------------------------------------------------------------
inline HierarchyTree toast_grid(const LatticeGraph& G, const LabelField& field, int k,
                                int r0 = 0) {
    require(G.kind == LatticeKind::grid_d || G.kind == LatticeKind::square, Errc::wrong_kind,
            "toast construction runs on grids");
    require(G.topology == Topology::torus, Errc::unsupported_dims, "torus windows only");
    if (r0 <= 0) r0 = 4 * k;
    // shrink the centre scale until at least two cells fit the window
    std::vector<VertexId> centers;
    for (;; r0 /= 2) {
        require(r0 >= std::max(k, 1), Errc::window_too_small,
                "window supports fewer than two toast cells");
        centers = maximal_r_discrete(G, field, r0, channels::toast_round(0, 0));
        if (centers.size() >= 2) break;
    }

    // distance fields per center
    const std::size_t n = G.n();
    std::vector<std::vector<int>> dist(centers.size(), std::vector<int>(n, -1));
    for (std::size_t i = 0; i < centers.size(); ++i) {
        std::deque<VertexId> q{centers[i]};
        dist[i][centers[i]] = 0;
        while (!q.empty()) {
            VertexId v = q.front();
            q.pop_front();
            for (EdgeId e : G.incident(v)) {
                VertexId w = G.other(e, v);
                if (dist[i][w] < 0) {
                    dist[i][w] = dist[i][v] + 1;
                    q.push_back(w);
                }
            }
        }
    }

    HierarchyTree t;
    t.clusters.assign(centers.size() + 1, {});
    std::vector<std::int32_t> assign(n, 0); // 0 = root
    for (VertexId v = 0; v < n; ++v) {
        int best = 0;
        for (std::size_t i = 1; i < centers.size(); ++i)
            if (dist[i][v] < dist[std::size_t(best)][v]) best = int(i);
        int second = 1 << 30;
        for (std::size_t i = 0; i < centers.size(); ++i)
            if (int(i) != best) second = std::min(second, dist[i][v]);
        if (dist[std::size_t(best)][v] + k < second) assign[v] = std::int32_t(best) + 1;
    }
    for (VertexId v = 0; v < n; ++v) t.clusters[assign[v]].push_back(v);
    require(!t.clusters[0].empty(), Errc::window_too_small, "toast root is empty");
    // drop cells that the margin consumed
    std::vector<std::int32_t> newid(t.clusters.size(), -1);
    std::int32_t next = 0;
    for (std::size_t c = 0; c < t.clusters.size(); ++c)
        if (c == 0 || !t.clusters[c].empty()) newid[c] = next++;
    HierarchyTree out;
    out.clusters.assign(next, {});
    for (std::size_t c = 0; c < t.clusters.size(); ++c)
        if (newid[c] >= 0) out.clusters[newid[c]] = std::move(t.clusters[c]);
    require(out.clusters.size() >= 2, Errc::window_too_small, "all toast cells vanished");
    out.root = 0;
    out.parent.assign(out.clusters.size(), 0);
    out.parent[0] = 0;
    out.rebuild_cluster_of(n);
    out.spacing = k;
    out.coarsen_rounds = detail::ceil_log2(k) + 1; // spacing achieved directly
    return out;
}

// ---------------------------------------------------------------------------
// Schreier decoration of the d-dimensional grid, d >= 3. Even clusters carry
// direction-to-colour bijections aligned progressively between consecutive
// (2d-2)-levels; odd clusters fix d-2 direction colours and tile the leftover
// plane with C4s of the two colours on which the flanking bijections disagree.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<int> unrank_permutation(int n, std::uint64_t idx) {
    std::vector<int> items(n), out;
    std::iota(items.begin(), items.end(), 0);
    std::uint64_t fact = 1;
    for (int i = 2; i <= n; ++i) fact *= std::uint64_t(i);
    for (int i = n; i >= 1; --i) {
        fact /= std::uint64_t(i);
        int pick = int(idx / fact);
        idx %= fact;
        out.push_back(items[pick]);
        items.erase(items.begin() + pick);
    }
    return out;
}

} // namespace detail

struct GridOptions {
    int k = 8;
    int max_retries = 16;
    // alternative hierarchy source; must be a (2d-2)-coloured k-spaced tree
    std::function<HierarchyTree(const LatticeGraph&, const LabelField&)> hierarchy_override;
};

struct GridRun {
    Decoration dec;
    HierarchyTree tree;
    TrialStats stats;
    // per odd cluster with both flanks: (parent-side, child-side) bijections
    std::vector<std::pair<std::vector<int>, std::vector<int>>> flank_patterns;
};

inline GridRun schreier_grid(const LatticeGraph& G, const LabelField& field,
                             const GridOptions& opt = {}) {
    require(G.kind == LatticeKind::grid_d && G.rank >= 3, Errc::wrong_kind,
            "grid pipeline needs d >= 3");
    for (int s : G.dims)
        require(s % 2 == 0, Errc::unsupported_dims, "C4 patterns need even torus sides");
    const int d = G.rank;
    const int c = 2 * d - 2;

    GridRun run;
    run.dec = run_with_retries(field, opt.max_retries, run.stats, [&](const LabelField& f) {
        HierarchyTree t;
        if (opt.hierarchy_override)
            t = opt.hierarchy_override(G, f);
        else
            t = colorize(toast_grid(G, f, c * opt.k), G, c, opt.k);
        require(is_spaced(t, G, opt.k), Errc::insufficient_spacing, "spacing audit failed");
        const std::int32_t n_cl = std::int32_t(t.size());
        auto kids = t.children();

        std::uint64_t dfact = 1;
        for (int i = 2; i <= d; ++i) dfact *= std::uint64_t(i);

        // ancestor walk: j-th ancestor or -1 when the chain hits the root first
        auto ancestor = [&](std::int32_t cl, int j) {
            while (j-- > 0) {
                if (cl == t.root) return std::int32_t(-1);
                cl = t.parent[cl];
            }
            return cl;
        };

        // groups of (2d-2)-numbered clusters keyed by their (2d-2)-ancestor
        std::vector<std::vector<int>> pi(n_cl); // even clusters: dir -> colour
        std::map<std::int32_t, std::vector<std::int32_t>> groups;
        for (std::int32_t cl = 0; cl < n_cl; ++cl)
            if (t.eta[cl] == c) groups[ancestor(cl, c)].push_back(cl);
        for (auto& [key, members] : groups) {
            std::vector<VertexId> verts;
            for (std::int32_t cl : members)
                verts.insert(verts.end(), t.clusters[cl].begin(), t.clusters[cl].end());
            std::uint64_t idx = f.raw_joint(verts, channels::gridd_interface) % dfact;
            auto perm = detail::unrank_permutation(d, idx);
            for (std::int32_t cl : members) pi[cl] = perm;
        }

        // middle even levels 2, 4, ..., 2d-4, aligning c_1..c_i with the level above
        for (int lvl = 2; lvl <= c - 2; lvl += 2) {
            const int i = lvl / 2;
            for (std::int32_t cl = 0; cl < n_cl; ++cl) {
                if (t.eta[cl] != lvl) continue;
                std::int32_t above = ancestor(cl, c - lvl);
                require(above >= 0 && t.eta[above] == c, Errc::bad_input,
                        "missing interface ancestor");
                // grandchildren all share a pattern; with none, copy from above
                std::int32_t gc0 = -1;
                for (std::int32_t ch : kids[cl])
                    for (std::int32_t gc : kids[ch])
                        if (gc0 < 0) gc0 = gc;
                if (gc0 < 0) {
                    pi[cl] = pi[above];
                    continue;
                }
                pi[cl] = pi[gc0];
                // align the direction of colour c_i (= i-1 zero-based)
                const int colour = i - 1;
                int dir_above = -1, dir_here = -1;
                for (int dd = 0; dd < d; ++dd) {
                    if (pi[above][dd] == colour) dir_above = dd;
                    if (pi[cl][dd] == colour) dir_here = dd;
                }
                if (dir_above != dir_here)
                    std::swap(pi[cl][dir_above], pi[cl][dir_here]);
            }
        }

        // odd clusters: C4 colour pair and direction map
        std::vector<std::vector<int>> dirmap(n_cl); // odd: dir -> colour (fixed part basis)
        std::vector<std::array<int, 2>> c4_dirs(n_cl, {-1, -1});
        std::vector<std::array<int, 2>> c4_cols(n_cl, {-1, -1});
        std::vector<std::array<std::uint8_t, 2>> anchor(n_cl, {0, 0});
        for (std::int32_t cl = 0; cl < n_cl; ++cl) {
            if (t.eta[cl] % 2 == 0 || t.clusters[cl].empty()) continue;
            std::vector<int> pp, pc;
            if (cl == t.root) {
                if (!kids[cl].empty())
                    pp = pi[kids[cl][0]]; // align the root with its children
                else {
                    std::uint64_t idx = f.raw_joint(t.clusters[cl], channels::gridd_inner) % dfact;
                    pp = detail::unrank_permutation(d, idx);
                }
            } else
                pp = pi[t.parent[cl]];
            if (!kids[cl].empty()) pc = pi[kids[cl][0]];

            std::vector<int> disagree;
            if (!pc.empty())
                for (int dd = 0; dd < d; ++dd)
                    if (pp[dd] != pc[dd]) disagree.push_back(pp[dd]);
            std::array<int, 2> pair{-1, -1};
            if (disagree.size() == 2) {
                std::sort(disagree.begin(), disagree.end());
                pair = {disagree[0], disagree[1]};
            } else {
                require(disagree.empty(), Errc::bad_input,
                        "flanking interfaces differ by more than a transposition");
                std::uint32_t pick =
                    f.choose(t.clusters[cl], channels::gridd_inner, std::uint32_t(d * (d - 1) / 2));
                std::uint32_t s2 = 0;
                for (int a = 0; a < d && pair[0] < 0; ++a)
                    for (int b = a + 1; b < d; ++b)
                        if (s2++ == pick) {
                            pair = {a, b};
                            break;
                        }
            }
            c4_cols[cl] = pair;
            dirmap[cl] = pp;
            int idx2 = 0;
            for (int dd = 0; dd < d; ++dd)
                if (pp[dd] == pair[0] || pp[dd] == pair[1]) c4_dirs[cl][idx2++] = dd;
            std::uint32_t kk = f.choose(t.clusters[cl], channels::gridd_anchor, 4);
            anchor[cl] = {std::uint8_t(kk & 1), std::uint8_t(kk >> 1)};

            if (!pc.empty() && cl != t.root)
                run.flank_patterns.push_back({pp, pc});
        }

        // colouring
        auto coord = [&](VertexId v, int axis) { return int(G.coord(v)[axis]); };
        auto inner_col = [&](std::int32_t cl, EdgeId e) {
            const int dd = G.edges[e].dir;
            if (dd != c4_dirs[cl][0] && dd != c4_dirs[cl][1]) return dirmap[cl][dd];
            int ax = (dd == c4_dirs[cl][0]) ? 0 : 1;
            int phase = coord(G.edges[e].u, dd) & 1;
            return (phase ^ anchor[cl][ax]) == 0 ? c4_cols[cl][0] : c4_cols[cl][1];
        };
        Decoration dec = Decoration::blank(G.m(), d);
        for (EdgeId e = 0; e < G.m(); ++e) {
            std::int32_t cu = t.cluster_of[G.edges[e].u], cv = t.cluster_of[G.edges[e].v];
            int col;
            if (t.eta[cu] % 2 == 0 || t.eta[cv] % 2 == 0) {
                std::int32_t ecl = (t.eta[cu] % 2 == 0) ? cu : cv;
                col = pi[ecl][G.edges[e].dir];
            } else {
                require(cu == cv, Errc::insufficient_spacing, "odd clusters touch");
                col = inner_col(cu, e);
                const int dd = G.edges[e].dir;
                if (dd == c4_dirs[cu][0] || dd == c4_dirs[cu][1]) {
                    const int other = (dd == c4_dirs[cu][0]) ? c4_dirs[cu][1] : c4_dirs[cu][0];
                    for (VertexId v : {G.edges[e].u, G.edges[e].v})
                        for (EdgeId g : G.incident(v)) {
                            if (int(G.edges[g].dir) != other) continue;
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
        // full-torus direction lines cannot bend inside a finite window; the
        // census reports them as wrapping instead of rejecting the trial
        finish_decoration(G, f, dec, false, false);
        run.tree = std::move(t);
        return dec;
    });
    return run;
}

} // namespace schreier
