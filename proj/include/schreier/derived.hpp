#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "schreier/verify.hpp"

namespace schreier {

// Proper edge colouring with 2d classes; colour class c_i splits into
// c_i_light = 2i and c_i_dark = 2i+1 (zero-based colour i).
struct EdgeColouring {
    int classes = 0;
    std::vector<std::int16_t> colour;
};

struct EdgeMatching {
    std::vector<EdgeId> edges;
};

// Split every monochromatic cycle into its two alternation classes, one of
// the two picked by a fair coin per cycle. Odd cycles cannot split.
inline EdgeColouring proper_colouring_from_decoration(const LatticeGraph& G,
                                                      const Decoration& dec,
                                                      const LabelField& field) {
    EdgeColouring ec;
    ec.classes = 2 * dec.d;
    ec.colour.assign(G.m(), -1);
    auto comps = monochrome_components(G, dec);
    for (const auto& mc : comps) {
        require(mc.is_cycle, Errc::non_cycle_component, "colour class is not a cycle cover");
        require(mc.edges.size() % 2 == 0, Errc::odd_cycle,
                "odd monochromatic cycle (graph not bipartite?)");
        std::uint32_t flip = field.choose(mc.verts, channels::light_dark, 2);
        for (std::size_t i = 0; i < mc.edges.size(); ++i)
            ec.colour[mc.edges[i]] = std::int16_t(2 * mc.colour + ((i + flip) % 2));
    }
    return ec;
}

inline Report check_proper(const LatticeGraph& G, const EdgeColouring& ec) {
    Report rep;
    bool pass = true;
    std::string witness;
    for (VertexId v = 0; v < G.n() && pass; ++v) {
        std::vector<int> seen(ec.classes, 0);
        for (EdgeId e : G.incident(v)) {
            if (ec.colour[e] < 0) continue;
            if (++seen[ec.colour[e]] > 1) {
                pass = false;
                witness = "vertex " + std::to_string(v) + " class " +
                          std::to_string(ec.colour[e]);
            }
        }
    }
    rep.add("proper_colouring", pass, witness);
    return rep;
}

inline EdgeMatching matching_from_colouring(const LatticeGraph& G, const EdgeColouring& ec,
                                            int cls) {
    for (EdgeId e = 0; e < G.m(); ++e)
        require(ec.colour[e] >= 0, Errc::incomplete_colouring,
                "edge " + std::to_string(e) + " uncoloured");
    EdgeMatching m;
    for (EdgeId e = 0; e < G.m(); ++e)
        if (ec.colour[e] == cls) m.edges.push_back(e);
    return m;
}

inline Report check_perfect(const LatticeGraph& G, const EdgeMatching& m) {
    Report rep;
    std::vector<int> cover(G.n(), 0);
    for (EdgeId e : m.edges) {
        cover[G.edges[e].u]++;
        cover[G.edges[e].v]++;
    }
    bool pass = true;
    std::string witness;
    for (VertexId v = 0; v < G.n(); ++v)
        if (cover[v] != 1) {
            pass = false;
            witness = "vertex " + std::to_string(v) + " covered " + std::to_string(cover[v]);
            break;
        }
    rep.add("perfect_matching", pass, witness);
    return rep;
}

// ---------------------------------------------------------------------------
// Decorated K_{2d} template for line-graph lifting. Roles 2i / 2i+1 are
// c_i-in / c_i-out. A proper (2d-1)-colouring comes from the round-robin
// 1-factorization; the orientation condition couples each colour's matching
// with the in/out pairing, whose union is a disjoint set of even cycles, so
// alternating along them always solves it.
// ---------------------------------------------------------------------------
struct CliqueTemplate {
    int d = 0;
    std::vector<std::vector<int>> colour;       // role x role -> colour in [2d-1]
    std::vector<std::vector<std::uint8_t>> into; // into[role][colour]
};

inline const CliqueTemplate& clique_template(int d) {
    static std::map<int, CliqueTemplate> cache;
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;

    CliqueTemplate t;
    t.d = d;
    const int n = 2 * d, rounds = n - 1;
    t.colour.assign(n, std::vector<int>(n, -1));
    // circle method: round j matches (j, n-1) and (j-s, j+s) mod n-1
    for (int j = 0; j < rounds; ++j) {
        t.colour[j][n - 1] = t.colour[n - 1][j] = j;
        for (int s = 1; s < d; ++s) {
            int a = ((j - s) % rounds + rounds) % rounds;
            int b = (j + s) % rounds;
            t.colour[a][b] = t.colour[b][a] = j;
        }
    }
    t.into.assign(n, std::vector<std::uint8_t>(rounds, 0));
    std::vector<int> mate(n);
    for (int j = 0; j < rounds; ++j) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (t.colour[a][b] == j) mate[a] = b;
        // union of the colour-j matching and the in/out pairing is a disjoint
        // set of even cycles; alternate bits around each
        std::vector<std::uint8_t> done(n, 0);
        for (int s = 0; s < n; ++s) {
            if (done[s]) continue;
            int v = s;
            std::uint8_t bit = 0;
            bool via_matching = true;
            while (!done[v]) {
                done[v] = 1;
                t.into[v][j] = bit;
                v = via_matching ? mate[v] : (v ^ 1);
                via_matching = !via_matching;
                bit = std::uint8_t(1 - bit);
            }
        }
    }
    // the defining condition, by construction: into[2i][j] != into[2i+1][j]
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < rounds; ++j)
            require(t.into[2 * i][j] != t.into[2 * i + 1][j], Errc::bad_input,
                    "template condition failed");
    return cache.emplace(d, std::move(t)).first->second;
}

// Stamp the fixed decorated template onto every clique of L(G). Each L-vertex
// is c_i-in in its head clique and c_i-out in its tail clique.
inline Decoration lift_to_line_graph(const LatticeGraph& G, const Decoration& dec,
                                     const LatticeGraph& LG, const CliqueIncidence& inc,
                                     [[maybe_unused]] const LabelField& field) {
    for (EdgeId e = 0; e < G.m(); ++e)
        require(dec.colour[e] >= 0 && dec.colour[e] < dec.d && dec.head[e] != kNoVertex,
                Errc::invalid_source_decoration, "undecorated edge " + std::to_string(e));
    require(check_schreier(G, dec).ok(), Errc::invalid_source_decoration,
            "source decoration is not a Schreier decoration");
    const int d = dec.d;
    const auto& tpl = clique_template(d);
    Decoration out = Decoration::blank(LG.m(), 2 * d - 1);

    // role of G-edge e within the clique of G-vertex w
    auto role = [&](EdgeId e, VertexId w) {
        return 2 * int(dec.colour[e]) + (dec.head[e] == w ? 0 : 1);
    };
    for (EdgeId le = 0; le < LG.m(); ++le) {
        EdgeId e1 = LG.edges[le].u, e2 = LG.edges[le].v; // L-vertices are G-edges
        // the clique this L-edge lives in is the G-vertex its two edges share
        auto c1 = inc.cliques[e1], c2 = inc.cliques[e2];
        VertexId w = (c1[0] == c2[0] || c1[0] == c2[1]) ? c1[0] : c1[1];
        int r1 = role(e1, w), r2 = role(e2, w);
        int j = tpl.colour[r1][r2];
        out.colour[le] = std::int16_t(j);
        out.head[le] = tpl.into[r1][j] ? VertexId(e1) : VertexId(e2);
    }
    return out;
}

// Perfect matching of L(G) from a balanced orientation of G (even d): each
// clique pairs up its d in-vertices.
inline EdgeMatching line_graph_matching(const LatticeGraph& G, const Orientation& orient,
                                        const LatticeGraph& LG, const CliqueIncidence& inc,
                                        const LabelField& field) {
    const int d = G.degree / 2;
    require(d % 2 == 0, Errc::odd_d, "needs even d");
    require(unbalanced_vertices(G, orient).empty(), Errc::not_balanced,
            "orientation is not balanced");
    (void)inc;
    // L-edge lookup
    std::map<std::pair<EdgeId, EdgeId>, EdgeId> ledge;
    for (EdgeId le = 0; le < LG.m(); ++le)
        ledge[{std::min(LG.edges[le].u, LG.edges[le].v),
               std::max(LG.edges[le].u, LG.edges[le].v)}] = le;
    EdgeMatching m;
    for (VertexId w = 0; w < G.n(); ++w) {
        std::vector<std::pair<std::uint64_t, EdgeId>> ins;
        for (EdgeId e : G.incident(w))
            if (orient.head[e] == w)
                ins.push_back({field.raw(VertexId(e), channels::line_match), e});
        std::sort(ins.begin(), ins.end());
        require(int(ins.size()) == d, Errc::not_balanced, "in-degree is not d");
        for (std::size_t i = 0; i + 1 < ins.size(); i += 2) {
            EdgeId a = ins[i].second, b = ins[i + 1].second;
            m.edges.push_back(ledge.at({std::min(a, b), std::max(a, b)}));
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// The crossed square lattice decomposes into the axis lattice and the two
// diagonal lattices; each runs the square pipeline with its own colours.
// ---------------------------------------------------------------------------
struct SubLattice {
    LatticeGraph g;
    std::vector<VertexId> to_parent_vertex; // local -> crossed-lattice vertex
    std::vector<EdgeId> to_parent_edge;     // local -> crossed-lattice edge
};

inline SubLattice axis_sublattice(const LatticeGraph& X) {
    SubLattice s;
    s.g = build_square(X.dims[0], X.dims[1], X.topology);
    s.to_parent_vertex.resize(X.n());
    std::iota(s.to_parent_vertex.begin(), s.to_parent_vertex.end(), 0);
    s.to_parent_edge.assign(s.g.m(), kNoEdge);
    std::map<std::pair<VertexId, VertexId>, EdgeId> axis_edges;
    for (EdgeId e = 0; e < X.m(); ++e)
        if (X.edges[e].dir < 2)
            axis_edges[{std::min(X.edges[e].u, X.edges[e].v),
                        std::max(X.edges[e].u, X.edges[e].v)}] = e;
    for (EdgeId e = 0; e < s.g.m(); ++e)
        s.to_parent_edge[e] = axis_edges.at({std::min(s.g.edges[e].u, s.g.edges[e].v),
                                             std::max(s.g.edges[e].u, s.g.edges[e].v)});
    return s;
}

inline SubLattice diag_sublattice(const LatticeGraph& X, int parity) {
    const int w = X.dims[0], h = X.dims[1];
    require(w % 4 == 0 && h % 4 == 0, Errc::unsupported_dims,
            "diagonal C4 patterns need sides divisible by 4");
    SubLattice s;
    LatticeGraph& g = s.g;
    g.kind = LatticeKind::custom;
    g.tag = "square_view";
    g.topology = X.topology;
    g.dims = {w, h};
    g.rank = 2;
    g.cell_size = 1;
    g.degree = 4;
    g.coord_dim = 2;

    std::vector<std::int32_t> local(X.n(), -1);
    for (VertexId v = 0; v < X.n(); ++v) {
        int x = int(v) % w, y = int(v) / w;
        if ((x + y) % 2 != parity) continue;
        local[v] = std::int32_t(s.to_parent_vertex.size());
        s.to_parent_vertex.push_back(v);
        g.coords.push_back(x);
        g.coords.push_back(y);
        g.sq_xy.push_back({(x + y - parity) / 2, (x - y - parity + 2 * h) / 2});
    }
    auto at = [&](int x, int y) {
        x = ((x % w) + w) % w;
        y = ((y % h) + h) % h;
        return VertexId(y * w + x);
    };
    auto add = [&](VertexId pu, VertexId pv, int dir, int dx, int dy) {
        EdgeId pe = kNoEdge;
        for (EdgeId e : X.incident(pu))
            if (X.other(e, pu) == pv && X.edges[e].dir >= 2) pe = e;
        require(pe != kNoEdge, Errc::bad_input, "missing diagonal");
        Shift sh = zero_shift();
        sh[0] = std::int16_t(dx);
        sh[1] = std::int16_t(dy);
        detail::add_edge(g.edges, VertexId(local[pu]), VertexId(local[pv]), dir, sh);
        g.evec.push_back(dx);
        g.evec.push_back(dy);
        s.to_parent_edge.push_back(pe);
    };
    for (VertexId v = 0; v < X.n(); ++v) {
        if (local[v] < 0) continue;
        int x = int(v) % w, y = int(v) / w;
        add(v, at(x + 1, y + 1), 0, 1, 1);  // +u axis
        add(v, at(x + 1, y - 1), 1, 1, -1); // +v axis
    }
    // faces: diamonds around the opposite-parity vertices
    for (VertexId c = 0; c < X.n(); ++c) {
        int x = int(c) % w, y = int(c) / w;
        if ((x + y) % 2 == parity) continue;
        Face fc;
        for (auto [dx, dy] : {std::pair{-1, 0}, {0, -1}, {1, 0}, {0, 1}})
            fc.verts.push_back(VertexId(local[at(x + dx, y + dy)]));
        g.faces.push_back(std::move(fc));
    }
    g.finalize();
    return s;
}

struct SquareDiagRun {
    Decoration dec;
    TrialStats stats;
};

inline SquareDiagRun square_diag_decorate(const LatticeGraph& X, const LabelField& field,
                                          int k = 8) {
    require(X.kind == LatticeKind::square_diag, Errc::wrong_kind, "crossed lattice required");
    require(X.topology == Topology::torus, Errc::unsupported_dims, "torus windows only");
    SquareDiagRun out;
    out.dec = Decoration::blank(X.m(), 4);

    auto run_view = [&](const SubLattice& s, int colour_lo, std::uint64_t salt) {
        SquareOptions opt;
        opt.k = k;
        opt.colour_lo = 0;
        auto view = SquareView::standard(s.g);
        auto run = schreier_square_view(view, field.with_salt(salt), opt);
        out.stats.retries += run.stats.retries;
        out.stats.rejected_wrapping_cluster += run.stats.rejected_wrapping_cluster;
        out.stats.rejected_ambiguous += run.stats.rejected_ambiguous;
        out.stats.rejected_wrapping_cycle += run.stats.rejected_wrapping_cycle;
        out.stats.rejected_spacing += run.stats.rejected_spacing;
        for (EdgeId e = 0; e < s.g.m(); ++e) {
            EdgeId pe = s.to_parent_edge[e];
            out.dec.colour[pe] = std::int16_t(run.dec.colour[e] + colour_lo);
            out.dec.head[pe] = s.to_parent_vertex[run.dec.head[e]];
        }
    };
    run_view(axis_sublattice(X), 0, 0x0a15);
    run_view(diag_sublattice(X, 0), 2, 0x0d1a60);
    run_view(diag_sublattice(X, 1), 2, 0x0d1a61);
    return out;
}

} // namespace schreier
