#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "schreier/json_io.hpp"
#include "schreier/pipelines.hpp"
#include "schreier/svg.hpp"
#include "schreier/verify.hpp"

using namespace schreier;

TEST_CASE("graph export carries the documented fields") {
    auto g = build_square(4, 4, Topology::torus);
    auto j = graph_to_json(g);
    CHECK(j.at("kind") == "square");
    CHECK(j.at("topology") == "torus");
    CHECK(j.at("vertices").size() == 16);
    CHECK(j.at("edges").size() == 32);
    CHECK(j.at("faces").size() == 16);
    CHECK(j.at("edges")[0].contains("dir"));
    CHECK(j.at("vertices")[0].contains("coords"));
}

TEST_CASE("decoration files replay byte-identically and survive a round trip") {
    auto g = build_t3464(6, 6, Topology::torus);
    LabelField f(99, g.descriptor_hash());
    auto run = schreier_t3464(g, f);

    DecorationFile df;
    df.spec = {"t3464", {6, 6}, Topology::torus, "", 0};
    df.seed = 99;
    df.pipeline = "t3464";
    df.dec = run.dec;
    std::string one = decoration_to_json(df, g).dump(1);
    std::string two = decoration_to_json(df, g).dump(1);
    CHECK(one == two);

    LatticeGraph g2;
    auto back = decoration_from_json(json::parse(one), g2);
    CHECK(g2.n() == g.n());
    CHECK(back.dec.colour == run.dec.colour);
    CHECK(back.dec.head == run.dec.head);
    CHECK(check_schreier(g2, back.dec).ok());
    CHECK(decoration_to_json(back, g2).dump(1) == one);
}

TEST_CASE("product and grid specs rebuild") {
    GraphSpec s;
    s.pipeline_kind = "product";
    s.product_h = "k4_4";
    s.m = 10;
    s.dims = {10};
    auto p = build_from_spec(s);
    CHECK(p.kind == LatticeKind::product);
    CHECK(p.n() == 80);

    GraphSpec gs;
    gs.pipeline_kind = "grid";
    gs.dims = {6, 6, 6};
    auto g = build_from_spec(gs);
    CHECK(g.kind == LatticeKind::grid_d);
    CHECK(g.n() == 216);

    auto rt = spec_from_json(spec_to_json(s));
    CHECK(rt.pipeline_kind == s.pipeline_kind);
    CHECK(rt.product_h == s.product_h);
    CHECK(rt.m == s.m);
}

TEST_CASE("hierarchy dump carries clusters, parents and spacing") {
    auto g = build_square(16, 16, Topology::torus);
    LabelField f(7, g.descriptor_hash());
    auto run = schreier_square(g, f);
    auto j = hierarchy_to_json(run.tree, nullptr, run.stats.retries);
    CHECK(j.contains("clusters"));
    CHECK(j.contains("spacing"));
    CHECK(j.contains("retries"));
    CHECK(j.at("clusters").size() == run.tree.size());
    CHECK(j.at("clusters")[0].contains("parent"));
    CHECK(j.at("clusters")[0].contains("eta"));
}

TEST_CASE("svg rendering is byte-stable and draws every edge with an arrowhead") {
    auto g = build_square(16, 16, Topology::torus);
    LabelField f(3, g.descriptor_hash());
    auto run = schreier_square(g, f);
    std::string svg1 = render_svg(g, run.dec);
    std::string svg2 = render_svg(g, run.dec);
    CHECK(svg1 == svg2);
    std::size_t lines = 0, pos = 0;
    while ((pos = svg1.find("<line", pos)) != std::string::npos) {
        ++lines;
        pos += 5;
    }
    CHECK(lines == 512); // |E| = 2|V| coloured arrows
    std::size_t arrows = 0;
    pos = 0;
    while ((pos = svg1.find("<path", pos)) != std::string::npos) {
        ++arrows;
        pos += 5;
    }
    CHECK(arrows == 512);
}

TEST_CASE("graph documents round-trip through import") {
    auto g = build_kagome(3, 3, Topology::torus);
    auto j = graph_to_json(g);
    auto back = graph_from_json(j);
    CHECK(back.n() == g.n());
    CHECK(back.m() == g.m());
    CHECK(back.faces.size() == g.faces.size());
    CHECK(back.degree == 4);
    // a custom window with user-supplied faces
    json cj;
    cj["kind"] = "custom";
    cj["topology"] = "box";
    cj["vertices"] = json::array();
    for (int i = 0; i < 4; ++i) {
        double x = (i == 1 || i == 2) ? 1.0 : 0.0;
        double y = i >= 2 ? 1.0 : 0.0;
        cj["vertices"].push_back({{"id", i}, {"coords", {x, y}}});
    }
    cj["edges"] = json::array();
    int id = 0;
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {3, 0}})
        cj["edges"].push_back({{"id", id++}, {"u", a}, {"v", b}, {"dir", 0}});
    cj["faces"] = json::array({{0, 1, 2, 3}});
    auto cg = graph_from_json(cj);
    CHECK(cg.n() == 4);
    CHECK(cg.m() == 4);
    CHECK(cg.faces.size() == 1);
}

TEST_CASE("grid rendering needs a slice") {
    auto g = build_grid(3, {6, 6, 6}, Topology::torus);
    Decoration dec = Decoration::blank(g.m(), 3);
    for (EdgeId e = 0; e < g.m(); ++e) {
        dec.colour[e] = std::int16_t(g.edges[e].dir);
        dec.head[e] = g.edges[e].v;
    }
    CHECK_THROWS_AS((void)render_svg(g, dec), Error);
    RenderOptions ro;
    ro.slice_axis = 2;
    ro.slice = 0;
    auto svg = render_svg(g, dec, ro);
    CHECK(svg.find("<svg") == 0);
}
