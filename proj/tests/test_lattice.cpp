#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "schreier/lattice.hpp"

using namespace schreier;

namespace {

// backtracking isomorphism for small regular graphs
bool isomorphic(const LatticeGraph& a, const LatticeGraph& b) {
    if (a.n() != b.n() || a.m() != b.m()) return false;
    const int n = int(a.n());
    auto nbrs = [](const LatticeGraph& g, VertexId v) {
        std::set<VertexId> out;
        for (EdgeId e : g.incident(v)) out.insert(g.other(e, v));
        return out;
    };
    std::vector<std::set<VertexId>> na(n), nb(n);
    for (int v = 0; v < n; ++v) {
        na[v] = nbrs(a, VertexId(v));
        nb[v] = nbrs(b, VertexId(v));
    }
    std::vector<int> map_ab(n, -1), used(n, 0);
    // order a's vertices by BFS for locality
    std::vector<int> order, seen(n, 0);
    order.push_back(0);
    seen[0] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (VertexId w : na[order[i]])
            if (!seen[w]) {
                seen[w] = 1;
                order.push_back(int(w));
            }
    std::function<bool(std::size_t)> go = [&](std::size_t k) {
        if (k == order.size()) return true;
        int v = order[k];
        for (int w = 0; w < n; ++w) {
            if (used[w] || nb[w].size() != na[v].size()) continue;
            bool ok = true;
            for (VertexId x : na[v]) {
                if (map_ab[x] >= 0 && !nb[w].count(VertexId(map_ab[x]))) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            map_ab[v] = w;
            used[w] = 1;
            if (go(k + 1)) return true;
            map_ab[v] = -1;
            used[w] = 0;
        }
        return false;
    };
    return go(0);
}

int count_triangles(const LatticeGraph& g) {
    int t = 0;
    for (VertexId v = 0; v < g.n(); ++v)
        for (EdgeId e1 : g.incident(v)) {
            VertexId a = g.other(e1, v);
            if (a < v) continue;
            for (EdgeId e2 : g.incident(v)) {
                VertexId b = g.other(e2, v);
                if (b <= a) continue;
                if (g.find_edge(a, b) != kNoEdge) ++t;
            }
        }
    return t;
}

} // namespace

TEST_CASE("square torus window counts") {
    auto g = build_archimedean(LatticeKind::square, 4, 4, Topology::torus);
    CHECK(g.n() == 16);
    CHECK(g.m() == 32);
    CHECK(g.faces.size() == 16);
    for (const Face& f : g.faces) CHECK(f.size() == 4);
    for (VertexId v = 0; v < g.n(); ++v) CHECK(g.vertex_degree(v) == 4);
    std::set<int> dirs;
    for (const Edge& e : g.edges) dirs.insert(e.dir);
    CHECK(dirs.size() == 2);
}

TEST_CASE("triangular torus window counts") {
    auto g = build_archimedean(LatticeKind::triangular, 3, 3, Topology::torus);
    CHECK(g.n() == 9);
    CHECK(g.m() == 27);
    CHECK(g.faces.size() == 18);
    for (const Face& f : g.faces) CHECK(f.size() == 3);
    std::set<int> dirs;
    for (const Edge& e : g.edges) dirs.insert(e.dir);
    CHECK(dirs.size() == 3);
}

TEST_CASE("kagome torus window counts") {
    auto g = build_archimedean(LatticeKind::kagome, 4, 4, Topology::torus);
    CHECK(g.n() == 48);
    CHECK(g.m() == 96);
    CHECK(g.faces.size() == 48); // Euler: F = E - V
    int tri = 0, hex = 0;
    for (const Face& f : g.faces) {
        if (f.size() == 3) ++tri;
        if (f.size() == 6) ++hex;
    }
    CHECK(tri == 32);
    CHECK(hex == 16);
    std::set<int> dirs;
    for (const Edge& e : g.edges) dirs.insert(e.dir);
    CHECK(dirs.size() == 3);
}

TEST_CASE("t3464 faces read (3,4,6,4) around every vertex") {
    auto g = build_archimedean(LatticeKind::t3464, 3, 3, Topology::torus);
    CHECK(g.n() == 54);
    CHECK(g.m() == 108);
    CHECK(g.faces.size() == 54);
    std::set<int> dirs;
    for (const Edge& e : g.edges) dirs.insert(e.dir);
    CHECK(dirs.size() == 6);

    // rotational order of incident faces at each vertex
    for (VertexId v = 0; v < g.n(); ++v) {
        auto es = g.incident(v);
        REQUIRE(es.size() == 4);
        std::vector<std::pair<double, EdgeId>> ang;
        for (EdgeId e : es) {
            double sgn = (g.edges[e].u == v) ? 1.0 : -1.0;
            ang.push_back({std::atan2(sgn * g.evec[2 * e + 1], sgn * g.evec[2 * e]), e});
        }
        std::sort(ang.begin(), ang.end());
        std::vector<int> sizes;
        for (int i = 0; i < 4; ++i) {
            EdgeId e1 = ang[i].second, e2 = ang[(i + 1) % 4].second;
            // face shared by consecutive edges
            FaceId shared = kNoFace;
            for (FaceId f1 : g.edge_faces[e1])
                for (FaceId f2 : g.edge_faces[e2])
                    if (f1 == f2) shared = f1;
            REQUIRE(shared != kNoFace);
            sizes.push_back(g.faces[shared].size());
        }
        bool ok = false;
        const std::vector<int> want = {3, 4, 6, 4};
        for (int r = 0; r < 4; ++r) {
            std::vector<int> rot(4);
            for (int i = 0; i < 4; ++i) rot[i] = sizes[(i + r) % 4];
            if (rot == want) ok = true;
        }
        CHECK(ok);
    }
}

TEST_CASE("torus translation by one cell is an automorphism preserving direction classes") {
    for (auto kind : {LatticeKind::square, LatticeKind::triangular, LatticeKind::kagome,
                      LatticeKind::t3464}) {
        auto g = build_archimedean(kind, 4, 4, Topology::torus);
        const int w = g.dims[0], cs = g.cell_size;
        auto shift = [&](VertexId v) {
            int cell = int(v) / cs, intra = int(v) % cs;
            int x = cell % w, y = cell / w;
            int nx = (x + 1) % w;
            return VertexId((y * w + nx) * cs + intra);
        };
        std::map<std::pair<VertexId, VertexId>, int> edge_dir;
        for (const Edge& e : g.edges) {
            edge_dir[{std::min(e.u, e.v), std::max(e.u, e.v)}] = e.dir;
        }
        for (const Edge& e : g.edges) {
            VertexId a = shift(e.u), b = shift(e.v);
            auto it = edge_dir.find({std::min(a, b), std::max(a, b)});
            REQUIRE(it != edge_dir.end());
            CHECK(it->second == e.dir);
        }
    }
}

TEST_CASE("grid_d builder") {
    auto g = build_grid(3, {4, 4, 4}, Topology::torus);
    CHECK(g.n() == 64);
    CHECK(g.m() == 192); // 6-regular
    CHECK(g.faces.empty());
    std::set<int> dirs;
    for (const Edge& e : g.edges) dirs.insert(e.dir);
    CHECK(dirs.size() == 3);

    // all sides even -> bipartite (parity 2-colouring)
    for (const Edge& e : g.edges) {
        auto parity = [&](VertexId v) {
            int s = 0;
            for (int a = 0; a < 3; ++a) s += int(g.coord(v)[a]);
            return s & 1;
        };
        CHECK(parity(e.u) != parity(e.v));
    }

    // d = 2 delegates to the square builder
    auto g2 = build_grid(2, {5, 5}, Topology::torus);
    auto sq = build_archimedean(LatticeKind::square, 5, 5, Topology::torus);
    CHECK(g2.kind == sq.kind);
    CHECK(g2.n() == sq.n());
    CHECK(g2.m() == sq.m());

    CHECK_THROWS_AS(build_grid(1, {5}, Topology::torus), Error);
}

TEST_CASE("product with cycle") {
    auto k3 = make_complete(3);
    auto g = build_product_cycle(k3, 4);
    CHECK(g.n() == 12);
    CHECK(g.m() == 24);
    for (VertexId v = 0; v < g.n(); ++v) CHECK(g.vertex_degree(v) == 4);

    auto c4 = make_cycle(4);
    auto g2 = build_product_cycle(c4, 6);
    CHECK(g2.n() == 24);
    for (VertexId v = 0; v < g2.n(); ++v) CHECK(g2.vertex_degree(v) == 4);
    // bipartite: layer parity + cycle parity
    for (const Edge& e : g2.edges) {
        auto parity = [&](VertexId v) {
            return (product_layer(g2, v) + product_h_index(g2, v)) & 1;
        };
        CHECK(parity(e.u) != parity(e.v));
    }

    auto k44 = make_complete_bipartite(4, 4);
    auto g3 = build_product_cycle(k44, 5);
    CHECK(g3.n() == 40);
    for (VertexId v = 0; v < g3.n(); ++v) CHECK(g3.vertex_degree(v) == 6);

    auto p = make_custom(3, {{0, 1}, {1, 2}}, "path"); // not regular
    CHECK_THROWS_AS(build_product_cycle(p, 5), Error);
}

TEST_CASE("line graph basics") {
    auto c4 = make_cycle(4);
    auto [l, inc] = line_graph(c4);
    CHECK(l.n() == 4);
    CHECK(l.m() == 4);
    CHECK(isomorphic(l, c4));
    // line_graph of a 2-regular graph is identity up to isomorphism twice over
    auto [ll, inc2] = line_graph(l);
    CHECK(isomorphic(ll, c4));

    auto sq = build_archimedean(LatticeKind::square, 4, 4, Topology::torus);
    auto [lsq, incsq] = line_graph(sq);
    CHECK(lsq.n() == 32);
    for (VertexId v = 0; v < lsq.n(); ++v) CHECK(lsq.vertex_degree(v) == 6);
    // every L-vertex in exactly two cliques, each clique has 2d members
    std::map<VertexId, int> clique_size;
    for (auto& pr : incsq.cliques) {
        clique_size[pr[0]]++;
        clique_size[pr[1]]++;
    }
    for (auto& [w, sz] : clique_size) CHECK(sz == 4);
}

TEST_CASE("line graph of the hexagonal lattice is the Kagome lattice") {
    auto hex = build_hexagonal(4, 4, Topology::torus);
    CHECK(hex.n() == 32);
    CHECK(hex.m() == 48);
    auto [l, inc] = line_graph(hex);
    auto kag = build_archimedean(LatticeKind::kagome, 4, 4, Topology::torus);
    CHECK(l.n() == kag.n());
    CHECK(l.m() == kag.m());
    CHECK(count_triangles(l) == count_triangles(kag));
    CHECK(isomorphic(l, kag));
}

TEST_CASE("guards of a square edge") {
    auto g = build_archimedean(LatticeKind::square, 4, 4, Topology::torus);
    for (EdgeId e = 0; e < g.m(); ++e) {
        auto gs = guards(g, e);
        CHECK(gs.size() == 4);
        for (EdgeId x : gs) {
            CHECK(g.edges[x].dir != g.edges[e].dir);
            // symmetric: e is a guard of each of its guards
            auto back = guards(g, x);
            CHECK(std::find(back.begin(), back.end(), e) != back.end());
        }
        // guards + the 2 collinear incident edges = all 6 incident edges
        std::set<EdgeId> incident;
        for (VertexId v : {g.edges[e].u, g.edges[e].v})
            for (EdgeId f : g.incident(v))
                if (f != e) incident.insert(f);
        CHECK(incident.size() == 6);
        int collinear = 0;
        for (EdgeId f : incident)
            if (g.edges[f].dir == g.edges[e].dir) ++collinear;
        CHECK(collinear == 2);
    }
    auto t = build_archimedean(LatticeKind::triangular, 4, 4, Topology::torus);
    CHECK_THROWS_AS((void)guards(t, 0), Error);
}

TEST_CASE("augmented adjacency oracle") {
    auto g = build_archimedean(LatticeKind::square, 4, 4, Topology::torus);
    std::map<FaceId, FaceCoin> choice;
    for (FaceId f = 0; f < g.faces.size(); ++f) choice[f] = FaceCoin::yellow_connects;
    AugmentedAdjacency aug(g, choice);

    std::vector<std::uint8_t> colour(g.n(), kYellow);
    // opposite corners of face 0: (0,0) and (1,1)
    const Face& f0 = g.faces[0];
    VertexId a = f0.verts[0], c = f0.verts[2];
    CHECK(aug.linked(a, c, colour));
    colour[c] = kGreen;
    CHECK(!aug.linked(a, c, colour));
    // edge-adjacent same-colour vertices connect regardless of coins
    std::map<FaceId, FaceCoin> green_choice;
    for (FaceId f = 0; f < g.faces.size(); ++f) green_choice[f] = FaceCoin::green_connects;
    AugmentedAdjacency aug2(g, green_choice);
    std::vector<std::uint8_t> ycol(g.n(), kYellow);
    CHECK(aug2.linked(g.edges[0].u, g.edges[0].v, ycol));

    // triangular face connects same-colour corners under any coin
    auto t = build_archimedean(LatticeKind::triangular, 4, 4, Topology::torus);
    AugmentedAdjacency augt(t, std::map<FaceId, FaceCoin>{});
    std::vector<std::uint8_t> tcol(t.n(), kGreen);
    const Face& tf = t.faces[0];
    CHECK(augt.linked(tf.verts[0], tf.verts[2], tcol));

    // missing coins on non-triangular faces are rejected
    CHECK_THROWS_AS(AugmentedAdjacency(g, std::map<FaceId, FaceCoin>{}), Error);
}

TEST_CASE("box topology keeps interior degrees and skips wrap") {
    auto g = build_archimedean(LatticeKind::square, 5, 5, Topology::box);
    CHECK(g.n() == 25);
    CHECK(g.m() == 40); // 2*5*4 per axis
    int four = 0;
    for (VertexId v = 0; v < g.n(); ++v)
        if (g.vertex_degree(v) == 4) ++four;
    CHECK(four == 9); // interior 3x3
}

TEST_CASE("square_diag window") {
    auto g = build_square_diag(4, 4, Topology::torus);
    CHECK(g.n() == 16);
    CHECK(g.m() == 64);
    for (VertexId v = 0; v < g.n(); ++v) CHECK(g.vertex_degree(v) == 8);
    std::set<int> dirs;
    for (const Edge& e : g.edges) dirs.insert(e.dir);
    CHECK(dirs.size() == 4);
}

TEST_CASE("unsupported dims are rejected") {
    CHECK_THROWS_AS(build_archimedean(LatticeKind::square, 2, 4, Topology::torus), Error);
    CHECK_THROWS_AS(build_grid(3, {4, 4}, Topology::torus), Error);
}
