#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "schreier/decoration.hpp"
#include "schreier/lattice.hpp"

namespace schreier {

// Deterministic SVG rendering of a planar decoration: edge colours as stroke
// colours, orientation as arrowheads, optional cluster boundaries as thick
// overlays. Byte-stable for a fixed input.
namespace svg_detail {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", x);
    return buf;
}

inline const char* palette(int colour) {
    static const char* colours[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    return colours[colour & 7];
}

} // namespace svg_detail

struct RenderOptions {
    double scale = 24;
    int slice_axis = -1; // grids with d >= 3: render the plane slice_axis == slice
    int slice = 0;
    const std::vector<std::vector<EdgeId>>* boundaries = nullptr;
};

inline std::string render_svg(const LatticeGraph& G, const Decoration& dec,
                              const RenderOptions& opt = {}) {
    using svg_detail::num;
    require(G.coord_dim >= 2, Errc::wrong_kind, "no embedding to draw");
    const bool sliced = G.coord_dim > 2;
    require(!sliced || opt.slice_axis >= 0, Errc::wrong_kind,
            "non-planar window: pick a slice");

    auto visible = [&](VertexId v) {
        return !sliced || int(G.coord(v)[opt.slice_axis]) == opt.slice;
    };
    // projected 2D position
    auto pos = [&](VertexId v, double& x, double& y) {
        int ax = 0, ay = 1;
        if (sliced) {
            std::vector<int> axes;
            for (int a = 0; a < G.coord_dim; ++a)
                if (a != opt.slice_axis) axes.push_back(a);
            ax = axes[0];
            ay = axes[1];
        }
        x = G.coord(v)[ax] * opt.scale;
        y = G.coord(v)[ay] * opt.scale;
    };

    double maxx = 0, maxy = 0;
    for (VertexId v = 0; v < G.n(); ++v) {
        if (!visible(v)) continue;
        double x, y;
        pos(v, x, y);
        maxx = std::max(maxx, x);
        maxy = std::max(maxy, y);
    }
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(maxx + 2 * opt.scale) +
           "\" height=\"" + num(maxy + 2 * opt.scale) + "\" viewBox=\"" + num(-opt.scale) + " " +
           num(-opt.scale) + " " + num(maxx + 2 * opt.scale) + " " + num(maxy + 2 * opt.scale) +
           "\">\n";
    out += "<g stroke-width=\"" + num(opt.scale * 0.08) + "\" fill=\"none\">\n";

    for (EdgeId e = 0; e < G.m(); ++e) {
        const Edge& ed = G.edges[e];
        if (!visible(ed.u) || !visible(ed.v)) continue;
        if (sliced && ed.dir == opt.slice_axis) continue;
        double x1, y1, x2, y2;
        pos(ed.u, x1, y1);
        if (!G.evec.empty() && G.coord_dim == 2) {
            x2 = x1 + G.evec[2 * e] * opt.scale;
            y2 = y1 + G.evec[2 * e + 1] * opt.scale;
        } else {
            pos(ed.v, x2, y2);
            // straight wrap edges on grid slices draw shortened stubs
            if (std::abs(x2 - x1) > 1.5 * opt.scale || std::abs(y2 - y1) > 1.5 * opt.scale) {
                x2 = x1 + (x2 > x1 ? -0.4 : 0.4) * opt.scale * (std::abs(x2 - x1) > 1 ? 1 : 0);
                y2 = y1 + (y2 > y1 ? -0.4 : 0.4) * opt.scale * (std::abs(y2 - y1) > 1 ? 1 : 0);
            }
        }
        const char* col = dec.colour[e] >= 0 ? svg_detail::palette(dec.colour[e]) : "#cccccc";
        out += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
               "\" y2=\"" + num(y2) + "\" stroke=\"" + col + "\"/>\n";
        if (dec.head[e] != kNoVertex) {
            // arrowhead at 2/3 along, pointing to the head
            double hx = x2, hy = y2, tx = x1, ty = y1;
            if (dec.head[e] == ed.u) {
                std::swap(hx, tx);
                std::swap(hy, ty);
            }
            double mx = tx + (hx - tx) * 0.6667, my = ty + (hy - ty) * 0.6667;
            double dx = hx - tx, dy = hy - ty;
            double len = std::sqrt(dx * dx + dy * dy);
            if (len > 1e-9) {
                dx /= len;
                dy /= len;
                double s = opt.scale * 0.22;
                out += "<path d=\"M " + num(mx) + " " + num(my) + " L " +
                       num(mx - s * dx + s * 0.5 * dy) + " " + num(my - s * dy - s * 0.5 * dx) +
                       " L " + num(mx - s * dx - s * 0.5 * dy) + " " +
                       num(my - s * dy + s * 0.5 * dx) + " Z\" fill=\"" + col + "\" stroke=\"none\"/>\n";
            }
        }
    }
    if (opt.boundaries) {
        out += "<g stroke=\"#000000\" stroke-width=\"" + num(opt.scale * 0.18) +
               "\" stroke-opacity=\"0.5\">\n";
        for (const auto& cluster_edges : *opt.boundaries)
            for (EdgeId e : cluster_edges) {
                const Edge& ed = G.edges[e];
                if (!visible(ed.u) || !visible(ed.v)) continue;
                double x1, y1, x2, y2;
                pos(ed.u, x1, y1);
                x2 = x1 + (G.evec.empty() ? 0 : G.evec[2 * e] * opt.scale);
                y2 = y1 + (G.evec.empty() ? 0 : G.evec[2 * e + 1] * opt.scale);
                out += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                       "\" y2=\"" + num(y2) + "\"/>\n";
            }
        out += "</g>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

} // namespace schreier
