#include "horolab/svg.hpp"

#include <cmath>
#include <cstdio>

namespace horolab {

namespace {

const double kSize = 720, kCx = 360, kCy = 360, kR = 320;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5f", v);
    return buf;
}

// Orthographic projection to the drawing plane (ball3 drops the third
// coordinate); y axis flipped into screen coordinates.
void project(const Vec3& x, double& px, double& py) {
    px = kCx + kR * x[0];
    py = kCy - kR * x[1];
}

std::string circle(double px, double py, double r, const std::string& fill, double opacity) {
    return "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"" + num(r) + "\" fill=\"" +
           fill + "\" fill-opacity=\"" + num(opacity) + "\"/>\n";
}

std::string escape_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else if (c == '"')
            out += "&quot;";
        else
            out += c;
    }
    return out;
}

std::string verdict_color(const Verdict& v) {
    if (v.radial.passed) return "#2a9d3c";                                      // radial
    if (v.horospheric.passed || v.horospheric_busemann.passed) return "#2b6cb0"; // horospheric
    if (v.big_horospheric.passed) return "#e8a33d";                              // big only
    return "#c0392b";                                                            // none
}

} // namespace

std::string render_svg(Model model, const OrbitSet* orbit, const AtomicMeasure* mu,
                       const std::vector<Verdict>* verdicts, const nlohmann::json& legend) {
    bool any = (orbit && !orbit->entries.empty()) || (mu && !mu->atoms.empty()) ||
               (verdicts && !verdicts->empty());
    if (!any) throw PreconditionError("render needs at least one nonempty layer");

    // legend block height depends on the wrapped parameter text
    std::string params = legend.dump();
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < params.size(); i += 96) lines.push_back(params.substr(i, 96));
    double legend_h = 60 + 16 * double(lines.size());
    double height = kSize + legend_h;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kSize) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(kSize) + " " + num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<circle cx=\"" + num(kCx) + "\" cy=\"" + num(kCy) + "\" r=\"" + num(kR) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";

    if (orbit) {
        for (std::size_t i = 0; i < orbit->entries.size(); i++) {
            InteriorPoint p = orbit->entry_ball_point(i);
            double px, py;
            project(p.x, px, py);
            out += circle(px, py, 1.4, "#888888", 0.6);
        }
    }
    if (mu) {
        double wmax = 0;
        for (double w : mu->weights) wmax = std::max(wmax, w);
        for (std::size_t i = 0; i < mu->atoms.size(); i++) {
            double px, py;
            project(mu->atoms[i].x, px, py);
            double r = 1.0 + 12.0 * std::sqrt(mu->weights[i] / (wmax > 0 ? wmax : 1.0));
            out += circle(px, py, r, "#2b6cb0", 0.55);
        }
    }
    if (verdicts) {
        for (const Verdict& v : *verdicts) {
            double px, py;
            project(v.xi.x, px, py);
            out += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) +
                   "\" r=\"6.00000\" fill=\"none\" stroke=\"" + verdict_color(v) +
                   "\" stroke-width=\"2\"/>\n";
        }
    }

    double ty = kSize + 24;
    out += "<text x=\"20\" y=\"" + num(ty) +
           "\" font-family=\"monospace\" font-size=\"13\">radial #2a9d3c  horospheric #2b6cb0  "
           "big-only #e8a33d  none #c0392b</text>\n";
    ty += 20;
    for (const std::string& line : lines) {
        out += "<text x=\"20\" y=\"" + num(ty) + "\" font-family=\"monospace\" font-size=\"11\">" +
               escape_text(line) + "</text>\n";
        ty += 16;
    }
    out += "</svg>\n";
    return out;
}

} // namespace horolab
