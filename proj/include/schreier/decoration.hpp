#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "schreier/lattice.hpp"
#include "schreier/rng.hpp"

namespace schreier {

// Edge colouring plus orientation. head == kNoVertex means unoriented,
// colour == -1 undecorated (box margins).
struct Decoration {
    int d = 1;
    std::vector<std::int16_t> colour; // per edge
    std::vector<VertexId> head;       // per edge

    static Decoration blank(std::size_t m, int d) {
        Decoration dec;
        dec.d = d;
        dec.colour.assign(m, -1);
        dec.head.assign(m, kNoVertex);
        return dec;
    }
    VertexId tail(const LatticeGraph& G, EdgeId e) const { return G.other(e, head[e]); }
};

struct Orientation {
    std::vector<VertexId> head;

    static Orientation blank(std::size_t m) {
        Orientation o;
        o.head.assign(m, kNoVertex);
        return o;
    }
};

struct MonoComponent {
    int colour = 0;
    bool is_cycle = false;
    bool contractible = false;          // for cycles: zero winding in every axis
    std::vector<VertexId> verts;        // walk order for cycles/paths
    std::vector<EdgeId> edges;          // edges[i] joins verts[i], verts[i+1]
};

// Components of each colour class. A valid decoration has 2-regular colour
// classes, so every component is a cycle; paths (box margins) and irregular
// blobs are classified too.
inline std::vector<MonoComponent> monochrome_components(const LatticeGraph& G,
                                                        const Decoration& dec) {
    std::vector<MonoComponent> out;
    std::vector<std::uint8_t> seen(G.m(), 0);
    for (EdgeId e0 = 0; e0 < G.m(); ++e0) {
        if (seen[e0] || dec.colour[e0] < 0) continue;
        const int col = dec.colour[e0];
        // gather the component over shared endpoints within the colour class
        std::vector<EdgeId> comp;
        std::deque<EdgeId> q{e0};
        seen[e0] = 1;
        while (!q.empty()) {
            EdgeId e = q.front();
            q.pop_front();
            comp.push_back(e);
            for (VertexId v : {G.edges[e].u, G.edges[e].v})
                for (EdgeId f : G.incident(v))
                    if (!seen[f] && dec.colour[f] == col) {
                        seen[f] = 1;
                        q.push_back(f);
                    }
        }
        // vertex degrees within the component
        std::map<VertexId, std::vector<EdgeId>> at;
        for (EdgeId e : comp) {
            at[G.edges[e].u].push_back(e);
            at[G.edges[e].v].push_back(e);
        }
        MonoComponent mc;
        mc.colour = col;
        int deg1 = 0;
        bool simple = true;
        VertexId start = at.begin()->first;
        for (auto& [v, es] : at) {
            if (es.size() == 1) {
                ++deg1;
                start = v;
            } else if (es.size() != 2)
                simple = false;
        }
        if (simple && (deg1 == 0 || deg1 == 2)) {
            mc.is_cycle = (deg1 == 0);
            // walk
            VertexId v = start;
            EdgeId prev = kNoEdge;
            mc.verts.push_back(v);
            Shift wind = zero_shift();
            for (std::size_t i = 0; i < comp.size(); ++i) {
                EdgeId e = kNoEdge;
                for (EdgeId cand : at[v])
                    if (cand != prev) {
                        e = cand;
                        break;
                    }
                if (e == kNoEdge) break;
                Shift st = G.shift_from(e, v);
                for (int r = 0; r < kMaxRank; ++r) wind[r] = std::int16_t(wind[r] + st[r]);
                v = G.other(e, v);
                prev = e;
                mc.edges.push_back(e);
                if (i + 1 < comp.size() || !mc.is_cycle) mc.verts.push_back(v);
            }
            if (mc.is_cycle) {
                bool zero = true;
                for (int r = 0; r < kMaxRank; ++r) zero &= (wind[r] == 0);
                mc.contractible = zero;
            }
        } else {
            mc.edges = comp; // unordered; not a cycle or path
        }
        out.push_back(std::move(mc));
    }
    return out;
}

// Strong orientation of every monochromatic cycle: the cycle's edge with the
// largest joint label leads, oriented from its larger-labelled endpoint to the
// smaller (vertex-id tiebreak); the rest follows around.
inline void orient_cycles(const LatticeGraph& G, const std::vector<MonoComponent>& comps,
                          const LabelField& field, Decoration& dec, bool reverse = false) {
    for (const MonoComponent& mc : comps) {
        require(mc.is_cycle, Errc::non_cycle_component,
                "colour class component is not a cycle");
        std::pair<std::uint64_t, EdgeId> best{0, kNoEdge};
        for (EdgeId e : mc.edges) {
            std::array<VertexId, 2> pair{G.edges[e].u, G.edges[e].v};
            std::uint64_t r = field.raw_joint(pair, channels::orient_pick);
            if (best.second == kNoEdge || std::pair(r, e) > std::pair(best.first, best.second))
                best = {r, e};
        }
        const EdgeId lead = best.second;
        const Edge& le = G.edges[lead];
        auto key = [&](VertexId v) { return std::pair(field.raw(v, channels::orient_dir), v); };
        VertexId lead_tail = key(le.u) > key(le.v) ? le.u : le.v;
        if (reverse) lead_tail = G.other(lead, lead_tail);
        // find lead position in the walk; verts[i] -> verts[i+1] via edges[i]
        const std::size_t n = mc.edges.size();
        std::size_t pos = 0;
        while (mc.edges[pos] != lead) ++pos;
        bool forward = (mc.verts[pos] == lead_tail);
        for (std::size_t i = 0; i < n; ++i) {
            VertexId a = mc.verts[i], b = mc.verts[(i + 1) % n];
            dec.head[mc.edges[i]] = forward ? b : a;
        }
    }
}

} // namespace schreier
