#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "schreier/core.hpp"

namespace schreier {

enum class LatticeKind : std::uint8_t {
    square,
    triangular,
    kagome,
    t3464,
    square_diag,
    grid_d,
    product,
    line_graph,
    custom,
};

enum class Topology : std::uint8_t { torus, box };

inline const char* kind_name(LatticeKind k) {
    switch (k) {
        case LatticeKind::square: return "square";
        case LatticeKind::triangular: return "triangular";
        case LatticeKind::kagome: return "kagome";
        case LatticeKind::t3464: return "t3464";
        case LatticeKind::square_diag: return "square_diag";
        case LatticeKind::grid_d: return "grid_d";
        case LatticeKind::product: return "product";
        case LatticeKind::line_graph: return "line_graph";
        case LatticeKind::custom: return "custom";
    }
    return "?";
}

inline constexpr int kMaxRank = 4;
using Shift = std::array<std::int16_t, kMaxRank>; // displacement in fundamental-cell coords

inline Shift zero_shift() { return {0, 0, 0, 0}; }

inline Shift negate(Shift s) {
    for (auto& x : s) x = std::int16_t(-x);
    return s;
}

struct Edge {
    VertexId u = 0, v = 0;
    std::uint16_t dir = 0; // translation/axis class
    Shift shift = zero_shift(); // cell(v) - cell(u), before torus wrap
};

struct Face {
    std::vector<VertexId> verts; // counter-clockwise cycle
    std::vector<EdgeId> edges;   // edges[i] joins verts[i], verts[i+1]
    std::vector<Shift> lifts;    // cell lift of verts[i] relative to verts[0]
    int size() const { return int(verts.size()); }
};

// Finite window of a lattice. Immutable after construction; all queries pure.
struct LatticeGraph {
    LatticeKind kind = LatticeKind::custom;
    Topology topology = Topology::torus;
    std::string tag; // free-form subtype for custom graphs ("hexagonal", "c4", ...)
    std::vector<int> dims; // cells per axis
    int rank = 0;          // number of translation axes (= dims.size())
    int cell_size = 1;     // vertices per fundamental cell
    int degree = 0;        // regular degree (interior degree for boxes)
    int coord_dim = 2;

    std::vector<double> coords; // n() * coord_dim
    std::vector<double> evec;   // m() * coord_dim, true euclidean edge vector u->v (planar kinds)
    std::vector<Edge> edges;
    std::vector<Face> faces;
    std::vector<std::array<FaceId, 2>> edge_faces; // planar kinds on torus: both set
    std::vector<std::array<std::int32_t, 2>> sq_xy; // integer coords for square-structured views

    std::vector<std::uint32_t> inc_off; // CSR incidence: vertex -> edge ids
    std::vector<EdgeId> inc_edges;

    std::size_t n() const { return inc_off.empty() ? 0 : inc_off.size() - 1; }
    std::size_t m() const { return edges.size(); }

    VertexId other(EdgeId e, VertexId v) const {
        const Edge& ed = edges[e];
        return ed.u == v ? ed.v : ed.u;
    }

    std::span<const EdgeId> incident(VertexId v) const {
        return {inc_edges.data() + inc_off[v], inc_edges.data() + inc_off[v + 1]};
    }

    int vertex_degree(VertexId v) const { return int(inc_off[v + 1] - inc_off[v]); }

    // shift of edge e traversed from v
    Shift shift_from(EdgeId e, VertexId v) const {
        return edges[e].u == v ? edges[e].shift : negate(edges[e].shift);
    }

    bool has_faces() const { return !faces.empty(); }

    EdgeId find_edge(VertexId a, VertexId b) const {
        for (EdgeId e : incident(a))
            if (other(e, a) == b) return e;
        return kNoEdge;
    }

    const double* coord(VertexId v) const { return coords.data() + std::size_t(v) * coord_dim; }

    std::uint64_t descriptor_hash() const;

    void finalize(); // builds CSR, edge_faces, lifts; validates construction invariants
};

namespace detail {

inline void add_edge(std::vector<Edge>& es, VertexId u, VertexId v, int dir, Shift sh) {
    Edge e;
    e.u = u;
    e.v = v;
    e.dir = std::uint16_t(dir);
    e.shift = sh;
    es.push_back(e);
}

inline std::int64_t fold_hash(std::int64_t h, std::int64_t x) {
    return std::int64_t(mix64(std::uint64_t(h) ^ std::uint64_t(x)));
}

} // namespace detail

inline std::uint64_t LatticeGraph::descriptor_hash() const {
    std::int64_t h = 0x5851f42d4c957f2dLL;
    h = detail::fold_hash(h, int(kind));
    h = detail::fold_hash(h, int(topology));
    for (char c : tag) h = detail::fold_hash(h, c);
    for (int d : dims) h = detail::fold_hash(h, d);
    h = detail::fold_hash(h, std::int64_t(n()));
    h = detail::fold_hash(h, std::int64_t(m()));
    h = detail::fold_hash(h, degree);
    return std::uint64_t(h);
}

inline void LatticeGraph::finalize() {
    const std::size_t nv = coords.size() / std::size_t(std::max(coord_dim, 1));
    inc_off.assign(nv + 1, 0);
    for (const Edge& e : edges) {
        require(e.u < nv && e.v < nv && e.u != e.v, Errc::bad_input, "edge endpoint out of range");
        ++inc_off[e.u + 1];
        ++inc_off[e.v + 1];
    }
    for (std::size_t i = 1; i <= nv; ++i) inc_off[i] += inc_off[i - 1];
    inc_edges.assign(inc_off[nv], 0);
    std::vector<std::uint32_t> cursor(inc_off.begin(), inc_off.end() - 1);
    for (EdgeId e = 0; e < edges.size(); ++e) {
        inc_edges[cursor[edges[e].u]++] = e;
        inc_edges[cursor[edges[e].v]++] = e;
    }

    if (!faces.empty()) {
        edge_faces.assign(edges.size(), {kNoFace, kNoFace});
        for (FaceId f = 0; f < faces.size(); ++f) {
            Face& fc = faces[f];
            const int s = fc.size();
            require(s >= 3, Errc::bad_input, "face too small");
            fc.edges.resize(s);
            fc.lifts.assign(s, zero_shift());
            Shift acc = zero_shift();
            for (int i = 0; i < s; ++i) {
                VertexId a = fc.verts[i], b = fc.verts[(i + 1) % s];
                EdgeId e = find_edge(a, b);
                require(e != kNoEdge, Errc::bad_input, "face cycle not adjacent");
                fc.edges[i] = e;
                fc.lifts[i] = acc;
                Shift step = shift_from(e, a);
                for (int r = 0; r < kMaxRank; ++r) acc[r] = std::int16_t(acc[r] + step[r]);
            }
            for (int r = 0; r < kMaxRank; ++r)
                require(acc[r] == 0, Errc::bad_input, "face cycle does not close");
            // orient counter-clockwise in the embedding
            if (coord_dim == 2 && !evec.empty()) {
                double area = 0, px = 0, py = 0;
                for (int i = 0; i < s; ++i) {
                    EdgeId e = fc.edges[i];
                    double sgn = (edges[e].u == fc.verts[i]) ? 1.0 : -1.0;
                    double dx = sgn * evec[2 * e], dy = sgn * evec[2 * e + 1];
                    area += px * dy - py * dx;
                    px += dx;
                    py += dy;
                }
                if (area < 0) {
                    std::reverse(fc.verts.begin(), fc.verts.end());
                    std::rotate(fc.verts.begin(), fc.verts.end() - 1, fc.verts.end());
                    // recompute edges + lifts for the reversed cycle
                    Shift acc2 = zero_shift();
                    std::vector<EdgeId> es(s);
                    std::vector<Shift> ls(s);
                    for (int i = 0; i < s; ++i) {
                        VertexId a = fc.verts[i], b = fc.verts[(i + 1) % s];
                        EdgeId e = find_edge(a, b);
                        es[i] = e;
                        ls[i] = acc2;
                        Shift step = shift_from(e, a);
                        for (int r = 0; r < kMaxRank; ++r) acc2[r] = std::int16_t(acc2[r] + step[r]);
                    }
                    fc.edges = std::move(es);
                    fc.lifts = std::move(ls);
                }
            }
            for (int i = 0; i < s; ++i) {
                EdgeId e = fc.edges[i];
                if (edge_faces[e][0] == kNoFace)
                    edge_faces[e][0] = f;
                else {
                    require(edge_faces[e][1] == kNoFace, Errc::bad_input, "edge on three faces");
                    edge_faces[e][1] = f;
                }
            }
        }
        if (topology == Topology::torus) {
            for (EdgeId e = 0; e < edges.size(); ++e)
                require(edge_faces[e][1] != kNoFace, Errc::bad_input, "torus edge with one face");
            // Euler count on the torus: |F| = |E| - |V|
            require(faces.size() == m() - n(), Errc::bad_input, "Euler count violated");
        }
    }

    if (topology == Topology::torus && degree > 0) {
        for (VertexId v = 0; v < nv; ++v)
            require(vertex_degree(v) == degree, Errc::bad_input, "regularity violated");
    }
}

// ---------------------------------------------------------------------------
// Builders. Stable vertex ids: row-major over fundamental cells (first axis
// fastest), then intra-cell index: id = cell_index * cell_size + intra.
// ---------------------------------------------------------------------------

namespace detail {

struct CellSpace {
    std::vector<int> dims;
    Topology topology;
    int cell_size;

    std::int64_t cell_count() const {
        std::int64_t c = 1;
        for (int d : dims) c *= d;
        return c;
    }

    // returns (vertex id, wrap shift applied) or kNoVertex when outside a box
    VertexId at(std::vector<int> cell, int intra) const {
        for (std::size_t a = 0; a < dims.size(); ++a) {
            if (topology == Topology::box) {
                if (cell[a] < 0 || cell[a] >= dims[a]) return kNoVertex;
            } else {
                cell[a] = ((cell[a] % dims[a]) + dims[a]) % dims[a];
            }
        }
        std::int64_t idx = 0;
        for (std::size_t a = dims.size(); a-- > 0;) idx = idx * dims[a] + cell[a];
        return VertexId(idx * cell_size + intra);
    }
};

inline void push_coord(std::vector<double>& cs, double x, double y) {
    cs.push_back(x);
    cs.push_back(y);
}

// planar builder helper: edge between (cell, intra) and (cell+delta, intra2)
struct PlanarBuilder {
    LatticeGraph g;
    CellSpace cs;
    std::array<double, 2> a1{}, a2{};                 // cell basis
    std::vector<std::array<double, 2>> intra_pos;     // intra-cell offsets

    void init(LatticeKind kind, int w, int h, Topology topo, int cell_size,
              std::array<double, 2> b1, std::array<double, 2> b2,
              std::vector<std::array<double, 2>> offs, int degree) {
        require(w >= 3 && h >= 3, Errc::unsupported_dims, "window must be at least 3x3 cells");
        g.kind = kind;
        g.topology = topo;
        g.dims = {w, h};
        g.rank = 2;
        g.cell_size = cell_size;
        g.degree = degree;
        g.coord_dim = 2;
        cs = {g.dims, topo, cell_size};
        a1 = b1;
        a2 = b2;
        intra_pos = std::move(offs);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                for (int i = 0; i < cell_size; ++i)
                    push_coord(g.coords, x * a1[0] + y * a2[0] + intra_pos[i][0],
                               x * a1[1] + y * a2[1] + intra_pos[i][1]);
    }

    void edge(int x, int y, int ia, int dx, int dy, int ib, int dir) {
        VertexId u = cs.at({x, y}, ia);
        VertexId v = cs.at({x + dx, y + dy}, ib);
        if (u == kNoVertex || v == kNoVertex) return;
        Shift sh = zero_shift();
        sh[0] = std::int16_t(dx);
        sh[1] = std::int16_t(dy);
        add_edge(g.edges, u, v, dir, sh);
        double ex = dx * a1[0] + dy * a2[0] + intra_pos[ib][0] - intra_pos[ia][0];
        double ey = dx * a1[1] + dy * a2[1] + intra_pos[ib][1] - intra_pos[ia][1];
        g.evec.push_back(ex);
        g.evec.push_back(ey);
    }

    // face given as (dx, dy, intra) triples; skipped if any corner is outside a box
    void face(int x, int y, std::initializer_list<std::array<int, 3>> corners) {
        Face f;
        for (const auto& c : corners) {
            VertexId v = cs.at({x + c[0], y + c[1]}, c[2]);
            if (v == kNoVertex) return;
            f.verts.push_back(v);
        }
        g.faces.push_back(std::move(f));
    }
};

} // namespace detail

inline LatticeGraph build_square(int w, int h, Topology topo) {
    detail::PlanarBuilder b;
    b.init(LatticeKind::square, w, h, topo, 1, {1, 0}, {0, 1}, {{0, 0}}, 4);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            b.edge(x, y, 0, 1, 0, 0, 0);
            b.edge(x, y, 0, 0, 1, 0, 1);
            b.face(x, y, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
        }
    b.g.finalize();
    return std::move(b.g);
}

inline LatticeGraph build_triangular(int w, int h, Topology topo) {
    detail::PlanarBuilder b;
    b.init(LatticeKind::triangular, w, h, topo, 1, {1, 0}, {0.5, std::sqrt(3.0) / 2}, {{0, 0}}, 6);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            b.edge(x, y, 0, 1, 0, 0, 0);
            b.edge(x, y, 0, 0, 1, 0, 1);
            b.edge(x, y, 0, -1, 1, 0, 2);
            b.face(x, y, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
            b.face(x, y, {{1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
        }
    b.g.finalize();
    return std::move(b.g);
}

inline LatticeGraph build_kagome(int w, int h, Topology topo) {
    const double s3 = std::sqrt(3.0);
    detail::PlanarBuilder b;
    b.init(LatticeKind::kagome, w, h, topo, 3, {2, 0}, {1, s3},
           {{0, 0}, {1, 0}, {0.5, s3 / 2}}, 4);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            b.edge(x, y, 0, 0, 0, 1, 0);  // A-B
            b.edge(x, y, 0, 0, 0, 2, 1);  // A-C
            b.edge(x, y, 1, 0, 0, 2, 2);  // B-C
            b.edge(x, y, 1, 1, 0, 0, 0);  // B-A(+1,0)
            b.edge(x, y, 2, 0, 1, 0, 1);  // C-A(0,+1)
            b.edge(x, y, 1, 1, -1, 2, 2); // B-C(+1,-1)
            b.face(x, y, {{0, 0, 0}, {0, 0, 1}, {0, 0, 2}});            // up triangle
            b.face(x, y, {{0, 0, 1}, {1, -1, 2}, {1, 0, 0}});           // down triangle
            b.face(x, y, {{0, 0, 1}, {1, 0, 0}, {1, 0, 2}, {0, 1, 1}, {0, 1, 0}, {0, 0, 2}}); // hexagon
        }
    b.g.finalize();
    return std::move(b.g);
}

inline LatticeGraph build_t3464(int w, int h, Topology topo) {
    const double s3 = std::sqrt(3.0);
    const double L = 1.0 + s3;
    std::vector<std::array<double, 2>> hex(6);
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < 6; ++k)
        hex[k] = {std::cos(pi / 6 + k * pi / 3), std::sin(pi / 6 + k * pi / 3)};
    detail::PlanarBuilder b;
    b.init(LatticeKind::t3464, w, h, topo, 6, {L, 0}, {L / 2, L * s3 / 2}, hex, 4);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            for (int k = 0; k < 6; ++k) b.edge(x, y, k, 0, 0, (k + 1) % 6, k % 3); // hexagon
            b.edge(x, y, 0, 1, 0, 2, 3);
            b.edge(x, y, 5, 1, 0, 3, 3);
            b.edge(x, y, 1, 0, 1, 3, 4);
            b.edge(x, y, 0, 0, 1, 4, 4);
            b.edge(x, y, 2, -1, 1, 4, 5);
            b.edge(x, y, 1, -1, 1, 5, 5);
            b.face(x, y, {{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {0, 0, 4}, {0, 0, 5}});
            b.face(x, y, {{0, 0, 5}, {0, 0, 0}, {1, 0, 2}, {1, 0, 3}}); // square, dir 0
            b.face(x, y, {{0, 0, 0}, {0, 0, 1}, {0, 1, 3}, {0, 1, 4}}); // square, dir 1
            b.face(x, y, {{0, 0, 1}, {0, 0, 2}, {-1, 1, 4}, {-1, 1, 5}}); // square, dir 2
            b.face(x, y, {{0, 0, 0}, {1, 0, 2}, {0, 1, 4}});              // triangle
            b.face(x, y, {{0, 0, 1}, {0, 1, 3}, {-1, 1, 5}});             // triangle
        }
    b.g.finalize();
    return std::move(b.g);
}

inline LatticeGraph build_square_diag(int w, int h, Topology topo) {
    detail::PlanarBuilder b;
    b.init(LatticeKind::square_diag, w, h, topo, 1, {1, 0}, {0, 1}, {{0, 0}}, 8);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            b.edge(x, y, 0, 1, 0, 0, 0);
            b.edge(x, y, 0, 0, 1, 0, 1);
            b.edge(x, y, 0, 1, 1, 0, 2); // NE diagonal
            // NW diagonal, from (x+1, y) to (x, y+1)
            VertexId u = b.cs.at({x + 1, y}, 0), v = b.cs.at({x, y + 1}, 0);
            if (u != kNoVertex && v != kNoVertex) {
                Shift sh = zero_shift();
                sh[0] = -1;
                sh[1] = 1;
                detail::add_edge(b.g.edges, u, v, 3, sh);
                b.g.evec.push_back(-1);
                b.g.evec.push_back(1);
            }
        }
    // not a plane graph; no faces
    b.g.finalize();
    return std::move(b.g);
}

// 3-regular honeycomb, provided to exercise line_graph (its line graph is the
// Kagome lattice). Not a decoration target.
inline LatticeGraph build_hexagonal(int w, int h, Topology topo) {
    const double s3 = std::sqrt(3.0);
    detail::PlanarBuilder b;
    b.init(LatticeKind::custom, w, h, topo, 2, {s3, 0}, {s3 / 2, 1.5}, {{0, 0}, {0, 1}}, 3);
    b.g.tag = "hexagonal";
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            b.edge(x, y, 0, 0, 0, 1, 0);
            b.edge(x, y, 1, 0, 1, 0, 1);
            b.edge(x, y, 1, -1, 1, 0, 2);
            b.face(x, y, {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 1}, {1, 0, 0}, {1, -1, 1}});
        }
    b.g.finalize();
    return std::move(b.g);
}

inline LatticeGraph build_archimedean(LatticeKind kind, int w, int h, Topology topo) {
    switch (kind) {
        case LatticeKind::square: return build_square(w, h, topo);
        case LatticeKind::triangular: return build_triangular(w, h, topo);
        case LatticeKind::kagome: return build_kagome(w, h, topo);
        case LatticeKind::t3464: return build_t3464(w, h, topo);
        default: fail(Errc::wrong_kind, "not an even-degree Archimedean kind");
    }
}

inline LatticeGraph build_grid(int d, const std::vector<int>& sides, Topology topo) {
    require(d >= 2, Errc::unsupported_dims, "grid dimension must be at least 2");
    require(int(sides.size()) == d, Errc::unsupported_dims, "need one side per axis");
    for (int s : sides) require(s >= 3, Errc::unsupported_dims, "side must be at least 3");
    if (d == 2) return build_square(sides[0], sides[1], topo);
    require(d <= kMaxRank, Errc::unsupported_dims, "grid dimension too large");

    LatticeGraph g;
    g.kind = LatticeKind::grid_d;
    g.topology = topo;
    g.dims = sides;
    g.rank = d;
    g.cell_size = 1;
    g.degree = 2 * d;
    g.coord_dim = d;
    detail::CellSpace cs{sides, topo, 1};
    const std::int64_t nc = cs.cell_count();
    g.coords.resize(std::size_t(nc) * d);
    std::vector<int> cell(d, 0);
    for (std::int64_t idx = 0; idx < nc; ++idx) {
        for (int a = 0; a < d; ++a) g.coords[std::size_t(idx) * d + a] = cell[a];
        for (int a = 0; a < d; ++a) {
            if (++cell[a] < sides[a]) break;
            cell[a] = 0;
        }
    }
    std::vector<int> c(d, 0);
    for (std::int64_t idx = 0; idx < nc; ++idx) {
        for (int a = 0; a < d; ++a) {
            std::vector<int> c2 = c;
            c2[a] += 1;
            VertexId v = cs.at(c2, 0);
            if (v != kNoVertex) {
                Shift sh = zero_shift();
                sh[a] = 1;
                detail::add_edge(g.edges, VertexId(idx), v, a, sh);
            }
        }
        for (int a = 0; a < d; ++a) {
            if (++c[a] < sides[a]) break;
            c[a] = 0;
        }
    }
    g.finalize();
    return g;
}

// Small finite graphs (products, oracles). Vertices on a circle.
inline LatticeGraph make_custom(int n, const std::vector<std::pair<int, int>>& edge_list,
                                const std::string& tag) {
    LatticeGraph g;
    g.kind = LatticeKind::custom;
    g.topology = Topology::box;
    g.tag = tag;
    g.rank = 0;
    g.cell_size = 1;
    g.coord_dim = 2;
    g.dims = {n};
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i)
        detail::push_coord(g.coords, std::cos(2 * pi * i / n), std::sin(2 * pi * i / n));
    std::vector<int> deg(n, 0);
    for (auto [a, bb] : edge_list) {
        detail::add_edge(g.edges, VertexId(a), VertexId(bb), 0, zero_shift());
        ++deg[a];
        ++deg[bb];
    }
    g.degree = n ? deg[0] : 0;
    for (int x : deg)
        if (x != g.degree) g.degree = -1; // irregular
    g.finalize();
    return g;
}

inline LatticeGraph make_cycle(int n) {
    require(n >= 3, Errc::unsupported_dims, "cycle needs at least 3 vertices");
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < n; ++i) es.push_back({i, (i + 1) % n});
    return make_custom(n, es, "c" + std::to_string(n));
}

inline LatticeGraph make_complete(int n) {
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) es.push_back({i, j});
    return make_custom(n, es, "k" + std::to_string(n));
}

inline LatticeGraph make_complete_bipartite(int a, int b) {
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) es.push_back({i, a + j});
    return make_custom(a + b, es, "k" + std::to_string(a) + "_" + std::to_string(b));
}

// Cartesian product H x C_m, the finite stand-in for H x P. Layer i holds
// vertices [i*|V(H)|, (i+1)*|V(H)|). Rung edges get direction class 0,
// intra-layer edges class 1.
inline LatticeGraph build_product_cycle(const LatticeGraph& H, int m) {
    require(m >= 4, Errc::unsupported_dims, "cycle factor needs m >= 4");
    require(H.degree >= 2 && H.degree % 2 == 0, Errc::non_regular_input,
            "H must be regular of even degree");
    LatticeGraph g;
    g.kind = LatticeKind::product;
    g.topology = Topology::torus;
    g.tag = H.tag;
    g.dims = {m};
    g.rank = 1;
    g.cell_size = int(H.n());
    g.degree = H.degree + 2;
    g.coord_dim = 2;
    const int nh = int(H.n());
    for (int i = 0; i < m; ++i)
        for (int u = 0; u < nh; ++u)
            detail::push_coord(g.coords, double(i), double(u));
    for (int i = 0; i < m; ++i) {
        const VertexId base = VertexId(i * nh);
        const VertexId nbase = VertexId(((i + 1) % m) * nh);
        Shift sh = zero_shift();
        sh[0] = 1;
        for (int u = 0; u < nh; ++u)
            detail::add_edge(g.edges, base + u, nbase + u, 0, sh); // rung
        for (const Edge& e : H.edges)
            detail::add_edge(g.edges, base + e.u, base + e.v, 1, zero_shift());
    }
    g.finalize();
    return g;
}

inline int product_layer(const LatticeGraph& g, VertexId v) { return int(v) / g.cell_size; }
inline int product_h_index(const LatticeGraph& g, VertexId v) { return int(v) % g.cell_size; }

// Line graph. L(G) vertex ids equal G edge ids; every L(G) vertex lies in the
// two cliques of its endpoints.
struct CliqueIncidence {
    std::vector<std::array<VertexId, 2>> cliques; // L-vertex -> (clique of u, clique of v)
};

inline std::pair<LatticeGraph, CliqueIncidence> line_graph(const LatticeGraph& G) {
    require(G.degree >= 2, Errc::non_regular_input, "line graph needs a regular input");
    LatticeGraph g;
    g.kind = LatticeKind::line_graph;
    g.topology = G.topology;
    g.tag = std::string(kind_name(G.kind)) + (G.tag.empty() ? "" : ":" + G.tag);
    g.dims = G.dims;
    g.rank = G.rank;
    g.cell_size = 1;
    g.degree = 2 * (G.degree - 1);
    g.coord_dim = G.coord_dim;
    const std::size_t ne = G.m();
    g.coords.resize(ne * g.coord_dim);
    // anchor each L-vertex at the cell of its G-edge tail; coords at midpoint
    for (EdgeId e = 0; e < ne; ++e)
        for (int a = 0; a < g.coord_dim; ++a) {
            double mid;
            if (!G.evec.empty() && G.coord_dim == 2)
                mid = G.coord(G.edges[e].u)[a] + 0.5 * G.evec[2 * e + a];
            else
                mid = 0.5 * (G.coord(G.edges[e].u)[a] + G.coord(G.edges[e].v)[a]);
            g.coords[std::size_t(e) * g.coord_dim + a] = mid;
        }
    CliqueIncidence inc;
    inc.cliques.resize(ne);
    for (EdgeId e = 0; e < ne; ++e) inc.cliques[e] = {G.edges[e].u, G.edges[e].v};
    // one clique per G-vertex
    for (VertexId w = 0; w < G.n(); ++w) {
        auto es = G.incident(w);
        for (std::size_t i = 0; i < es.size(); ++i)
            for (std::size_t j = i + 1; j < es.size(); ++j) {
                EdgeId a = es[i], b = es[j];
                // cell shift between anchors (tails) via w
                Shift sa = (G.edges[a].u == w) ? zero_shift() : G.edges[a].shift;
                Shift sb = (G.edges[b].u == w) ? zero_shift() : G.edges[b].shift;
                Shift sh = zero_shift();
                for (int r = 0; r < kMaxRank; ++r) sh[r] = std::int16_t(sb[r] - sa[r]);
                // anchor(a) -> w is +sa when a points away... anchor(x) = cell of tail;
                // w->anchor(b) is -sb if edges[b].u==w else ... handled above: shift from
                // anchor(a) to anchor(b) through w = (cell(w)-cell(tail a)) + (cell(tail b)-cell(w))
                detail::add_edge(g.edges, VertexId(std::min(a, b)), VertexId(std::max(a, b)), 0, sh);
            }
    }
    g.finalize();
    return {std::move(g), std::move(inc)};
}

using Matching2 = std::vector<std::pair<VertexId, VertexId>>;

// deterministic perfect matching of a small graph, by backtracking
inline Matching2 canonical_matching(const LatticeGraph& H) {
    std::vector<std::uint8_t> used(H.n(), 0);
    Matching2 M;
    std::function<bool(std::size_t)> go = [&](std::size_t picked) {
        if (picked * 2 == H.n()) return true;
        VertexId v = 0;
        while (used[v]) ++v;
        used[v] = 1;
        for (EdgeId e : H.incident(v)) {
            VertexId w = H.other(e, v);
            if (used[w]) continue;
            used[w] = 1;
            M.push_back({v, w});
            if (go(picked + 1)) return true;
            M.pop_back();
            used[w] = 0;
        }
        used[v] = 0;
        return false;
    };
    require(go(0), Errc::bad_input, "graph has no perfect matching");
    return M;
}

// Guards of a square-lattice edge: the four incident edges perpendicular to it
// (those sharing a C4 with it). Works on any two-direction square view.
inline std::vector<EdgeId> guards(const LatticeGraph& G, EdgeId e) {
    const bool square_like =
        (G.kind == LatticeKind::square) || (G.kind == LatticeKind::custom && G.tag == "square_view");
    require(square_like, Errc::wrong_kind, "guards defined on the square lattice");
    std::vector<EdgeId> out;
    const Edge& ed = G.edges[e];
    for (VertexId v : {ed.u, ed.v})
        for (EdgeId f : G.incident(v))
            if (f != e && G.edges[f].dir != ed.dir) out.push_back(f);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Augmented adjacency: the percolation connectivity rule. Same-colour vertices
// are linked when edge-adjacent, or co-facial in a triangle, or co-facial in a
// face whose coin matches their colour.
// ---------------------------------------------------------------------------

enum class FaceCoin : std::uint8_t { yellow_connects = 0, green_connects = 1 };
inline constexpr std::uint8_t kYellow = 0, kGreen = 1;

struct AugmentedAdjacency {
    const LatticeGraph* g = nullptr;
    std::vector<std::uint8_t> coin; // per face; 2 = triangle (always connects)

    AugmentedAdjacency(const LatticeGraph& G, const std::map<FaceId, FaceCoin>& face_choice)
        : g(&G) {
        require(G.has_faces(), Errc::face_data_missing, "augmented adjacency needs faces");
        coin.assign(G.faces.size(), 2);
        for (FaceId f = 0; f < G.faces.size(); ++f) {
            if (G.faces[f].size() == 3) continue;
            auto it = face_choice.find(f);
            require(it != face_choice.end(), Errc::missing_face_choice,
                    "no coin for non-triangular face " + std::to_string(f));
            coin[f] = std::uint8_t(it->second);
        }
    }

    AugmentedAdjacency(const LatticeGraph& G, std::vector<std::uint8_t> coins)
        : g(&G), coin(std::move(coins)) {}

    // direct link between same-colour u, v (connectivity closure is the
    // cluster computation's job)
    bool linked(VertexId u, VertexId v, std::span<const std::uint8_t> colour) const {
        if (u == v || colour[u] != colour[v]) return false;
        for (EdgeId e : g->incident(u))
            if (g->other(e, u) == v) return true;
        for (FaceId f = 0; f < g->faces.size(); ++f) {
            const Face& fc = g->faces[f];
            bool has_u = false, has_v = false;
            for (VertexId w : fc.verts) {
                has_u |= (w == u);
                has_v |= (w == v);
            }
            if (has_u && has_v && (coin[f] == 2 || coin[f] == colour[u])) return true;
        }
        return false;
    }
};

} // namespace schreier
