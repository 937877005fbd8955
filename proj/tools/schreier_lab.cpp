// Command-line front end: generate decorations, verify files, render SVGs,
// and run the experiment suites.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "schreier/derived.hpp"
#include "schreier/experiments.hpp"
#include "schreier/grid_pipeline.hpp"
#include "schreier/json_io.hpp"
#include "schreier/product_pipeline.hpp"
#include "schreier/svg.hpp"
#include "schreier/verify.hpp"

using namespace schreier;

namespace {

std::vector<int> parse_dims(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s) {
        if (c == 'x' || c == 'X' || c == ',') {
            out.push_back(std::stoi(cur));
            cur.clear();
        } else
            cur.push_back(c);
    }
    if (!cur.empty()) out.push_back(std::stoi(cur));
    return out;
}

struct GenerateConfig {
    std::string pipeline = "square";
    std::string kind; // balanced: which planar lattice
    std::string dims = "64x64";
    std::string topology = "torus";
    int k = 0;
    int d = 0;
    std::uint64_t seed = 1;
    int max_retries = 16;
    std::string out = "decoration.json";
    std::string render;
    int slice = -1;
    std::string dump_hierarchy;
    std::string product_h = "c4";
    int m = 12;
    bool tightened = false;
};

int cmd_generate(const GenerateConfig& cfg) {
    GraphSpec spec;
    spec.topology = cfg.topology == "box" ? Topology::box : Topology::torus;
    spec.dims = parse_dims(cfg.dims);
    json params;
    params["max_retries"] = cfg.max_retries;

    DecorationFile df;
    df.seed = cfg.seed;
    df.pipeline = cfg.pipeline;

    HierarchyTree tree;
    std::vector<std::vector<EdgeId>> boundaries;
    bool have_tree = false;
    LatticeGraph g;

    auto finish = [&](Decoration dec, const TrialStats& stats) {
        df.dec = std::move(dec);
        df.retries = stats.retries;
        df.rejected_trials = stats.rejected_wrapping_cluster + stats.rejected_ambiguous +
                             stats.rejected_wrapping_cycle + stats.rejected_spacing;
    };

    if (cfg.pipeline == "square" || cfg.pipeline == "triangular" || cfg.pipeline == "kagome" ||
        cfg.pipeline == "t3464") {
        spec.pipeline_kind = cfg.pipeline;
        g = build_from_spec(spec);
        LabelField f(cfg.seed, g.descriptor_hash());
        if (cfg.pipeline == "square") {
            SquareOptions opt;
            if (cfg.k) opt.k = cfg.k;
            opt.max_retries = cfg.max_retries;
            params["k"] = opt.k;
            auto run = schreier_square(g, f, opt);
            tree = run.tree;
            have_tree = true;
            finish(std::move(run.dec), run.stats);
        } else if (cfg.pipeline == "triangular") {
            TriangularOptions opt;
            if (cfg.k) opt.k = cfg.k;
            opt.max_retries = cfg.max_retries;
            params["k"] = opt.k;
            auto run = schreier_triangular(g, f, opt);
            tree = run.tree;
            boundaries = run.cluster_boundaries;
            have_tree = true;
            finish(std::move(run.dec), run.stats);
        } else if (cfg.pipeline == "kagome") {
            KagomeOptions opt;
            if (cfg.k) opt.k = cfg.k;
            opt.max_retries = cfg.max_retries;
            params["k"] = opt.k;
            auto run = schreier_kagome(g, f, opt);
            tree = run.tree;
            boundaries = run.cluster_boundaries;
            have_tree = true;
            finish(std::move(run.dec), run.stats);
        } else {
            auto run = schreier_t3464(g, f);
            finish(std::move(run.dec), run.stats);
        }
    } else if (cfg.pipeline == "grid") {
        spec.pipeline_kind = "grid";
        g = build_from_spec(spec);
        LabelField f(cfg.seed, g.descriptor_hash());
        GridOptions opt;
        if (cfg.k) opt.k = cfg.k;
        opt.max_retries = cfg.max_retries;
        params["k"] = opt.k;
        require(cfg.d == 0 || cfg.d == int(spec.dims.size()), Errc::bad_input,
                "--d disagrees with --dims");
        auto run = schreier_grid(g, f, opt);
        tree = run.tree;
        have_tree = true;
        finish(std::move(run.dec), run.stats);
    } else if (cfg.pipeline == "product") {
        spec.pipeline_kind = "product";
        spec.product_h = cfg.product_h;
        spec.m = cfg.m;
        spec.dims = {cfg.m};
        auto h = make_h_graph(cfg.product_h);
        g = build_product_cycle(h, cfg.m);
        LabelField f(cfg.seed, g.descriptor_hash());
        ProductOptions opt;
        opt.tightened = cfg.tightened;
        params["tightened"] = cfg.tightened;
        params["h"] = cfg.product_h;
        auto run = schreier_product(g, h, canonical_matching(h), f, opt);
        finish(std::move(run.dec), run.stats);
    } else if (cfg.pipeline == "square-diag") {
        spec.pipeline_kind = "square_diag";
        g = build_from_spec(spec);
        LabelField f(cfg.seed, g.descriptor_hash());
        int k = cfg.k ? cfg.k : 8;
        params["k"] = k;
        auto run = square_diag_decorate(g, f, k);
        finish(std::move(run.dec), run.stats);
    } else if (cfg.pipeline == "colouring" || cfg.pipeline == "matching") {
        // proper 2d-colouring of an even square torus, or one of its classes
        spec.pipeline_kind = "square";
        g = build_from_spec(spec);
        LabelField f(cfg.seed, g.descriptor_hash());
        SquareOptions opt;
        if (cfg.k) opt.k = cfg.k;
        opt.max_retries = cfg.max_retries;
        params["k"] = opt.k;
        params["artifact"] = cfg.pipeline;
        auto run = schreier_square(g, f, opt);
        auto ec = proper_colouring_from_decoration(g, run.dec, f);
        Decoration dec = Decoration::blank(g.m(), ec.classes);
        if (cfg.pipeline == "colouring") {
            dec.colour = ec.colour;
        } else {
            dec.d = 2;
            auto mm = matching_from_colouring(g, ec, 0);
            for (EdgeId e = 0; e < g.m(); ++e) dec.colour[e] = 0;
            for (EdgeId e : mm.edges) dec.colour[e] = 1;
        }
        finish(std::move(dec), run.stats);
    } else if (cfg.pipeline == "balanced") {
        spec.pipeline_kind = cfg.kind.empty() ? "square" : cfg.kind;
        g = build_from_spec(spec);
        LabelField f(cfg.seed, g.descriptor_hash());
        BalancedOptions opt;
        if (cfg.k) opt.k = cfg.k;
        opt.max_retries = cfg.max_retries;
        params["k"] = opt.k;
        auto run = balanced_orientation_planar(g, f, opt);
        Decoration dec = Decoration::blank(g.m(), 1);
        for (EdgeId e = 0; e < g.m(); ++e) {
            dec.colour[e] = 0;
            dec.head[e] = run.orient.head[e];
        }
        tree = run.tree;
        boundaries = run.cluster_boundaries;
        have_tree = true;
        finish(std::move(dec), run.stats);
    } else {
        fail(Errc::bad_input, "unknown pipeline: " + cfg.pipeline);
    }

    df.spec = spec;
    df.params = params;
    write_text_atomic(cfg.out, decoration_to_json(df, g).dump(1));
    std::printf("wrote %s (seed %llu, %d retries, %d rejected trials)\n", cfg.out.c_str(),
                (unsigned long long)df.seed, df.retries, df.rejected_trials);
    if (!cfg.dump_hierarchy.empty() && have_tree) {
        write_text_atomic(cfg.dump_hierarchy,
                          hierarchy_to_json(tree, boundaries.empty() ? nullptr : &boundaries,
                                            df.retries)
                              .dump(1));
        std::printf("wrote %s\n", cfg.dump_hierarchy.c_str());
    }
    if (!cfg.render.empty()) {
        RenderOptions ro;
        if (g.coord_dim > 2) {
            require(cfg.slice >= 0, Errc::wrong_kind, "grids need --slice for rendering");
            ro.slice_axis = g.coord_dim - 1;
            ro.slice = cfg.slice;
        }
        if (!boundaries.empty()) ro.boundaries = &boundaries;
        write_text_atomic(cfg.render, render_svg(g, df.dec, ro));
        std::printf("wrote %s\n", cfg.render.c_str());
    }
    return 0;
}

int cmd_verify(const std::string& path) {
    json j;
    try {
        j = read_json_file(path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "malformed input: %s\n", e.what());
        return 2;
    }
    LatticeGraph g;
    DecorationFile df;
    try {
        df = decoration_from_json(j, g);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "malformed input: %s\n", e.what());
        return 2;
    }
    Report rep;
    if (df.pipeline == "balanced") {
        Orientation o = Orientation::blank(g.m());
        o.head = df.dec.head;
        rep = check_balanced(g, o);
    } else if (df.pipeline == "colouring") {
        EdgeColouring ec;
        ec.classes = df.dec.d;
        ec.colour = df.dec.colour;
        rep = check_proper(g, ec);
        bool complete = true;
        for (EdgeId e = 0; e < g.m(); ++e) complete &= (ec.colour[e] >= 0);
        rep.add("complete", complete, "uncoloured edge");
    } else if (df.pipeline == "matching") {
        EdgeMatching mm;
        for (EdgeId e = 0; e < g.m(); ++e)
            if (df.dec.colour[e] == 1) mm.edges.push_back(e);
        rep = check_perfect(g, mm);
    } else {
        rep = check_schreier(g, df.dec);
        auto cc = component_census(g, df.dec);
        bool margins = false;
        for (EdgeId e = 0; e < g.m(); ++e) margins |= (df.dec.colour[e] < 0);
        if (margins) // box windows clip margin components into paths
            rep.add("margin_components_reported", true, std::to_string(cc.non_cycles));
        else
            rep.add("components_are_cycles", cc.all_cycles(),
                    std::to_string(cc.non_cycles) + " non-cycles");
        rep.add("wrapping_cycles_reported", true, std::to_string(cc.wrapping_cycles));
    }
    json out;
    out["file"] = path;
    json items = json::array();
    for (const auto& it : rep.items)
        items.push_back({{"name", it.name}, {"pass", it.pass}, {"witness", it.witness}});
    out["checks"] = items;
    out["ok"] = rep.ok();
    std::printf("%s\n", out.dump(1).c_str());
    return rep.ok() ? 0 : 1;
}

int cmd_render(const std::string& path, const std::string& out_svg, int slice,
               const std::string& hierarchy_path) {
    json j = read_json_file(path);
    LatticeGraph g;
    auto df = decoration_from_json(j, g);
    RenderOptions ro;
    if (g.coord_dim > 2) {
        require(slice >= 0, Errc::wrong_kind,
                "NonPlanarKind: use --slice to render a plane of a grid");
        ro.slice_axis = g.coord_dim - 1;
        ro.slice = slice;
    }
    std::vector<std::vector<EdgeId>> boundaries;
    if (!hierarchy_path.empty()) {
        json hj = read_json_file(hierarchy_path);
        for (const auto& c : hj.at("clusters"))
            boundaries.push_back(c.value("boundary_edges", std::vector<EdgeId>{}));
        ro.boundaries = &boundaries;
    }
    write_text_atomic(out_svg, render_svg(g, df.dec, ro));
    std::printf("wrote %s\n", out_svg.c_str());
    return 0;
}

int cmd_experiment(const std::string& suite) {
    std::vector<experiments::CriterionResult> results;
    try {
        results = experiments::run_suite(suite);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %s — %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all &= r.pass;
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finitary factor decorations of lattice windows"};
    app.require_subcommand(1);

    GenerateConfig gc;
    auto* gen = app.add_subcommand("generate", "run a decoration pipeline and write JSON");
    gen->add_option("--pipeline", gc.pipeline,
                    "square|triangular|kagome|t3464|grid|product|square-diag|balanced|"
                    "colouring|matching");
    gen->add_option("--kind", gc.kind, "lattice kind for the balanced pipeline");
    gen->add_option("--dims", gc.dims, "cells per axis, e.g. 64x64 or 48x48x48");
    gen->add_option("--topology", gc.topology, "torus|box");
    gen->add_option("--k", gc.k, "spacing parameter (pipeline default when omitted)");
    gen->add_option("--d", gc.d, "grid dimension (validated against --dims)");
    gen->add_option("--seed", gc.seed, "master seed");
    gen->add_option("--max-retries", gc.max_retries, "rejection-sampling budget");
    gen->add_option("--out", gc.out, "output decoration JSON");
    gen->add_option("--render", gc.render, "also write an SVG here");
    gen->add_option("--slice", gc.slice, "grid slice for rendering");
    gen->add_option("--dump-hierarchy", gc.dump_hierarchy, "write the hierarchy JSON here");
    gen->add_option("--product-h", gc.product_h, "finite factor H (c4, k44, k3, k5, ...)");
    gen->add_option("--m", gc.m, "cycle length for products");
    gen->add_flag("--tightened", gc.tightened, "cap product c1 cycles at 3|V(H)|");

    std::string verify_path;
    auto* ver = app.add_subcommand("verify", "check a decoration file, exit 1 on failure");
    ver->add_option("file", verify_path, "decoration JSON")->required();

    std::string render_path, render_out = "out.svg", render_hier;
    int render_slice = -1;
    auto* ren = app.add_subcommand("render", "draw a decoration as SVG");
    ren->add_option("file", render_path, "decoration JSON")->required();
    ren->add_option("--out", render_out, "output SVG path");
    ren->add_option("--slice", render_slice, "grid slice");
    ren->add_option("--hierarchy", render_hier, "overlay boundaries from a hierarchy JSON");

    std::string suite = "all";
    auto* exp = app.add_subcommand("experiment", "run an acceptance/oracle suite");
    exp->add_option("--suite", suite, "suite name or 'all'");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(gc);
        if (ver->parsed()) return cmd_verify(verify_path);
        if (ren->parsed()) return cmd_render(render_path, render_out, render_slice, render_hier);
        if (exp->parsed()) return cmd_experiment(suite);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        if (e.code() == Errc::retries_exhausted) return 3;
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    return 0;
}
