#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "schreier/decoration.hpp"
#include "schreier/hierarchy.hpp"
#include "schreier/lattice.hpp"

namespace schreier {

using nlohmann::json;

inline json graph_to_json(const LatticeGraph& G) {
    json j;
    j["kind"] = kind_name(G.kind);
    if (!G.tag.empty()) j["tag"] = G.tag;
    j["dims"] = G.dims;
    j["topology"] = G.topology == Topology::torus ? "torus" : "box";
    json vs = json::array();
    for (VertexId v = 0; v < G.n(); ++v) {
        json coords = json::array();
        for (int a = 0; a < G.coord_dim; ++a) coords.push_back(G.coord(v)[a]);
        vs.push_back({{"id", v}, {"coords", coords}});
    }
    j["vertices"] = std::move(vs);
    json es = json::array();
    for (EdgeId e = 0; e < G.m(); ++e)
        es.push_back({{"id", e}, {"u", G.edges[e].u}, {"v", G.edges[e].v}, {"dir", G.edges[e].dir}});
    j["edges"] = std::move(es);
    json fs = json::array();
    for (const Face& fc : G.faces) fs.push_back(fc.verts);
    j["faces"] = std::move(fs);
    return j;
}

// Compact descriptor sufficient to rebuild the standard windows.
struct GraphSpec {
    std::string pipeline_kind; // square, triangular, kagome, t3464, grid, square_diag, product
    std::vector<int> dims;
    Topology topology = Topology::torus;
    std::string product_h; // c4, k44, k3, k5, k33...
    int m = 0;
};

inline LatticeGraph make_h_graph(const std::string& tag) {
    if (tag.rfind("c", 0) == 0 && tag.size() > 1 && std::isdigit(tag[1]))
        return make_cycle(std::stoi(tag.substr(1)));
    if (tag.rfind("k", 0) == 0) {
        auto us = tag.find('_');
        if (us != std::string::npos)
            return make_complete_bipartite(std::stoi(tag.substr(1, us - 1)),
                                           std::stoi(tag.substr(us + 1)));
        return make_complete(std::stoi(tag.substr(1)));
    }
    fail(Errc::bad_input, "unknown finite graph tag: " + tag);
}

inline LatticeGraph build_from_spec(const GraphSpec& s) {
    if (s.pipeline_kind == "square")
        return build_square(s.dims.at(0), s.dims.at(1), s.topology);
    if (s.pipeline_kind == "triangular")
        return build_triangular(s.dims.at(0), s.dims.at(1), s.topology);
    if (s.pipeline_kind == "kagome")
        return build_kagome(s.dims.at(0), s.dims.at(1), s.topology);
    if (s.pipeline_kind == "t3464")
        return build_t3464(s.dims.at(0), s.dims.at(1), s.topology);
    if (s.pipeline_kind == "square_diag")
        return build_square_diag(s.dims.at(0), s.dims.at(1), s.topology);
    if (s.pipeline_kind == "grid")
        return build_grid(int(s.dims.size()), s.dims, s.topology);
    if (s.pipeline_kind == "product")
        return build_product_cycle(make_h_graph(s.product_h), s.m);
    fail(Errc::bad_input, "unknown graph spec kind: " + s.pipeline_kind);
}

// Import of a full graph document; user-supplied windows come back as
// `custom` kind with explicit faces.
inline LatticeGraph graph_from_json(const json& j) {
    LatticeGraph g;
    const std::string kind = j.at("kind").get<std::string>();
    g.kind = LatticeKind::custom;
    for (int k = 0; k <= int(LatticeKind::custom); ++k)
        if (kind == kind_name(LatticeKind(k))) g.kind = LatticeKind(k);
    g.tag = j.value("tag", std::string{});
    g.topology = j.at("topology").get<std::string>() == "box" ? Topology::box : Topology::torus;
    g.dims = j.value("dims", std::vector<int>{});
    g.rank = 0;
    g.cell_size = 1;
    g.coord_dim = 2;
    const auto& vs = j.at("vertices");
    for (const auto& jv : vs) {
        auto coords = jv.at("coords").get<std::vector<double>>();
        require(coords.size() >= 2, Errc::bad_input, "vertex needs 2d coordinates");
        g.coords.push_back(coords[0]);
        g.coords.push_back(coords[1]);
    }
    for (const auto& je : j.at("edges")) {
        Edge e;
        e.u = je.at("u").get<VertexId>();
        e.v = je.at("v").get<VertexId>();
        e.dir = je.value("dir", 0);
        g.edges.push_back(e);
        g.evec.push_back(g.coords[2 * e.v] - g.coords[2 * e.u]);
        g.evec.push_back(g.coords[2 * e.v + 1] - g.coords[2 * e.u + 1]);
    }
    for (const auto& jf : j.value("faces", json::array())) {
        Face fc;
        fc.verts = jf.get<std::vector<VertexId>>();
        g.faces.push_back(std::move(fc));
    }
    std::vector<int> deg(vs.size(), 0);
    for (const Edge& e : g.edges) {
        deg[e.u]++;
        deg[e.v]++;
    }
    g.degree = deg.empty() ? 0 : deg[0];
    for (int d : deg)
        if (d != g.degree) g.degree = -1;
    if (g.topology == Topology::torus && g.degree < 0)
        fail(Errc::bad_input, "irregular torus import");
    g.finalize();
    return g;
}

inline json spec_to_json(const GraphSpec& s) {
    json j;
    j["kind"] = s.pipeline_kind;
    j["dims"] = s.dims;
    j["topology"] = s.topology == Topology::torus ? "torus" : "box";
    if (!s.product_h.empty()) {
        j["product_h"] = s.product_h;
        j["m"] = s.m;
    }
    return j;
}

inline GraphSpec spec_from_json(const json& j) {
    GraphSpec s;
    s.pipeline_kind = j.at("kind").get<std::string>();
    s.dims = j.at("dims").get<std::vector<int>>();
    s.topology = j.at("topology").get<std::string>() == "box" ? Topology::box : Topology::torus;
    if (j.contains("product_h")) {
        s.product_h = j.at("product_h").get<std::string>();
        s.m = j.at("m").get<int>();
    }
    return s;
}

struct DecorationFile {
    GraphSpec spec;
    std::uint64_t seed = 0;
    std::string pipeline;
    json params;
    int retries = 0;
    int rejected_trials = 0;
    Decoration dec;
};

inline json decoration_to_json(const DecorationFile& df, const LatticeGraph& G) {
    json j;
    j["schema"] = 1;
    j["graph"] = spec_to_json(df.spec);
    j["seed"] = df.seed;
    j["pipeline"] = df.pipeline;
    j["params"] = df.params.is_null() ? json::object() : df.params;
    j["retries"] = df.retries;
    j["rejected_trials"] = df.rejected_trials;
    j["d"] = df.dec.d;
    json es = json::array();
    for (EdgeId e = 0; e < G.m(); ++e) {
        VertexId head = df.dec.head[e];
        VertexId tail = head == kNoVertex ? kNoVertex : G.other(e, head);
        json je = {{"id", e}, {"colour", df.dec.colour[e]}};
        if (head == kNoVertex) {
            je["tail"] = nullptr;
            je["head"] = nullptr;
        } else {
            je["tail"] = tail;
            je["head"] = head;
        }
        es.push_back(std::move(je));
    }
    j["edges"] = std::move(es);
    return j;
}

inline DecorationFile decoration_from_json(const json& j, LatticeGraph& G_out) {
    require(j.contains("schema") && j.at("schema").get<int>() == 1, Errc::bad_input,
            "unsupported schema");
    DecorationFile df;
    df.spec = spec_from_json(j.at("graph"));
    df.seed = j.at("seed").get<std::uint64_t>();
    df.pipeline = j.at("pipeline").get<std::string>();
    df.params = j.value("params", json::object());
    df.retries = j.value("retries", 0);
    df.rejected_trials = j.value("rejected_trials", 0);
    G_out = build_from_spec(df.spec);
    const int d = j.at("d").get<int>();
    df.dec = Decoration::blank(G_out.m(), d);
    for (const auto& je : j.at("edges")) {
        EdgeId e = je.at("id").get<EdgeId>();
        require(e < G_out.m(), Errc::bad_input, "edge id out of range");
        df.dec.colour[e] = je.at("colour").get<std::int16_t>();
        if (!je.at("head").is_null()) {
            VertexId head = je.at("head").get<VertexId>();
            VertexId tail = je.at("tail").get<VertexId>();
            require((G_out.edges[e].u == head && G_out.edges[e].v == tail) ||
                        (G_out.edges[e].u == tail && G_out.edges[e].v == head),
                    Errc::bad_input, "edge endpoints do not match the graph");
            df.dec.head[e] = head;
        }
    }
    return df;
}

inline json hierarchy_to_json(const HierarchyTree& T,
                              const std::vector<std::vector<EdgeId>>* boundaries, int retries) {
    json j;
    json cs = json::array();
    for (std::size_t c = 0; c < T.size(); ++c) {
        json jc = {{"id", c}, {"parent", T.parent[c]}, {"vertices", T.clusters[c]}};
        if (!T.eta.empty()) jc["eta"] = T.eta[c];
        if (boundaries && c < boundaries->size()) jc["boundary_edges"] = (*boundaries)[c];
        cs.push_back(std::move(jc));
    }
    j["clusters"] = std::move(cs);
    j["spacing"] = T.spacing;
    j["retries"] = retries;
    return j;
}

inline void write_text_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        require(bool(out), Errc::bad_input, "cannot open " + tmp);
        out << text;
    }
    require(std::rename(tmp.c_str(), path.c_str()) == 0, Errc::bad_input,
            "cannot move into place: " + path);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(bool(in), Errc::bad_input, "cannot open " + path);
    return json::parse(in);
}

} // namespace schreier
