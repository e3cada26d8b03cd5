#include "skilldtw/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace skilldtw {

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string open_svg(double w, double h)
{
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\" font-family=\"sans-serif\" font-size=\"10\">\n"
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string line(double x1, double y1, double x2, double y2, const std::string& style)
{
    return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\" " +
           style + "/>\n";
}

std::string text(double x, double y, const std::string& s, const std::string& extra = "")
{
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\"" + extra + ">" + escape(s) + "</text>\n";
}

const char* kSkillColor(const std::string& skill)
{
    if (skill == "N") return "#d62728";
    if (skill == "I") return "#ff7f0e";
    return "#2ca02c";
}

}  // namespace

std::string dendrogram_svg(const std::vector<Merge>& dendrogram, std::size_t n, const std::vector<std::string>& labels)
{
    const double margin = 40, step = 18, plot_h = 300;
    const double w = 2 * margin + step * double(std::max<std::size_t>(n, 1));
    const double h = plot_h + 2 * margin + 40;
    std::string out = open_svg(w, h);
    if (n == 0 || dendrogram.size() + 1 != n) return out + "</svg>\n";

    double top = 0;
    for (const auto& m : dendrogram) top = std::max(top, m.height);
    if (top <= 0) top = 1;
    auto y_of = [&](double height) { return margin + plot_h * (1.0 - height / top); };

    // Leaf order from a left-first walk of the tree.
    std::vector<double> x(2 * n - 1), y(2 * n - 1, y_of(0));
    std::size_t next = 0;
    std::function<void(std::size_t)> place = [&](std::size_t node) {
        if (node < n) {
            x[node] = margin + step * (double(next++) + 0.5);
            out += text(x[node], margin + plot_h + 14, node < labels.size() ? labels[node] : std::to_string(node),
                        " text-anchor=\"end\" transform=\"rotate(-90 " + num(x[node]) + " " + num(margin + plot_h + 14) +
                            ")\"");
            return;
        }
        const auto& m = dendrogram[node - n];
        place(m.left);
        place(m.right);
        x[node] = 0.5 * (x[m.left] + x[m.right]);
        y[node] = y_of(m.height);
    };
    place(2 * n - 2);
    const std::string style = "stroke=\"black\" stroke-width=\"1\"";
    for (std::size_t t = 0; t < dendrogram.size(); ++t) {
        const auto& m = dendrogram[t];
        const double yy = y_of(m.height);
        out += line(x[m.left], y[m.left], x[m.left], yy, style);
        out += line(x[m.right], y[m.right], x[m.right], yy, style);
        out += line(x[m.left], yy, x[m.right], yy, style);
    }
    out += line(margin - 5, margin, margin - 5, margin + plot_h, style);
    out += text(margin - 8, margin + 4, num(top), " text-anchor=\"end\"");
    out += text(margin - 8, margin + plot_h + 4, "0", " text-anchor=\"end\"");
    return out + "</svg>\n";
}

std::string envelope_svg(const Envelope& env, const std::vector<Series>& overlays, const std::vector<std::string>& variables)
{
    const double margin = 40, panel_w = 600, panel_h = 120, gap = 30;
    const Index V = env.upper.cols(), n = env.length();
    const double h = 2 * margin + double(V) * (panel_h + gap);
    std::string out = open_svg(panel_w + 2 * margin, h);
    const char* palette[] = {"#1f77b4", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    for (Index v = 0; v < V; ++v) {
        double lo = env.lower.col(v).minCoeff(), hi = env.upper.col(v).maxCoeff();
        for (const auto& s : overlays)
            if (s.rows() == n) {
                lo = std::min(lo, s.col(v).minCoeff());
                hi = std::max(hi, s.col(v).maxCoeff());
            }
        if (hi - lo <= 0) hi = lo + 1;
        const double top = margin + double(v) * (panel_h + gap);
        auto px = [&](Index i) { return margin + panel_w * (n > 1 ? double(i) / double(n - 1) : 0.5); };
        auto py = [&](double val) { return top + panel_h * (1.0 - (val - lo) / (hi - lo)); };
        std::string band;
        for (Index i = 0; i < n; ++i) band += num(px(i)) + "," + num(py(env.upper(i, v))) + " ";
        for (Index i = n - 1; i >= 0; --i) band += num(px(i)) + "," + num(py(env.lower(i, v))) + " ";
        out += "<polygon points=\"" + band + "\" fill=\"#cfe3f3\" stroke=\"#6baed6\"/>\n";
        for (std::size_t k = 0; k < overlays.size(); ++k) {
            if (overlays[k].rows() != n) continue;
            std::string pts;
            for (Index i = 0; i < n; ++i) pts += num(px(i)) + "," + num(py(overlays[k](i, v))) + " ";
            out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + palette[k % 7] + "\" stroke-width=\"1\"/>\n";
        }
        out += text(margin, top - 4, std::size_t(v) < variables.size() ? variables[v] : "v" + std::to_string(v));
    }
    return out + "</svg>\n";
}

std::string heatmap_svg(const Eigen::MatrixXd& cost, const WarpPath& path)
{
    const Index n = cost.rows(), m = cost.cols();
    const Index rn = std::min<Index>(n, 200), rm = std::min<Index>(m, 200);
    const double cell = 3, margin = 30;
    std::string out = open_svg(2 * margin + cell * double(rm), 2 * margin + cell * double(rn));
    if (n == 0 || m == 0) return out + "</svg>\n";
    double hi = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j)
            if (std::isfinite(cost(i, j))) hi = std::max(hi, cost(i, j));
    if (hi <= 0) hi = 1;
    for (Index bi = 0; bi < rn; ++bi) {
        for (Index bj = 0; bj < rm; ++bj) {
            const double c = cost(bi * n / rn, bj * m / rm);
            std::string fill = "#ffffff";
            if (std::isfinite(c)) {
                const int g = int(std::lround(255.0 * (1.0 - c / hi)));
                char buf[8];
                std::snprintf(buf, sizeof buf, "#%02x%02xff", g, g);
                fill = buf;
            }
            out += "<rect x=\"" + num(margin + cell * double(bj)) + "\" y=\"" + num(margin + cell * double(bi)) +
                   "\" width=\"" + num(cell) + "\" height=\"" + num(cell) + "\" fill=\"" + fill + "\"/>\n";
        }
    }
    std::string pts;
    for (const auto& [i, j] : path)
        pts += num(margin + cell * (double(j) * double(rm) / double(m) + 0.5)) + "," +
               num(margin + cell * (double(i) * double(rn) / double(n) + 0.5)) + " ";
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    return out + "</svg>\n";
}

std::string composition_svg(const std::vector<ClusterComposition>& report)
{
    const double margin = 40, bar_w = 40, gap = 20, plot_h = 200;
    const double w = 2 * margin + double(report.size()) * (bar_w + gap);
    std::string out = open_svg(std::max(w, 200.0), plot_h + 2 * margin + 20);
    for (std::size_t c = 0; c < report.size(); ++c) {
        const double x = margin + double(c) * (bar_w + gap);
        double y = margin + plot_h;
        for (const char* skill : {"N", "I", "E"}) {
            const auto it = report[c].by_skill.find(skill);
            if (it == report[c].by_skill.end()) continue;
            const double hgt = plot_h * it->second;
            y -= hgt;
            out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(bar_w) + "\" height=\"" + num(hgt) +
                   "\" fill=\"" + kSkillColor(skill) + "\"/>\n";
        }
        out += text(x + bar_w / 2, margin + plot_h + 14,
                    "C" + std::to_string(report[c].cluster) + " (" + std::to_string(report[c].size) + ")",
                    " text-anchor=\"middle\"");
    }
    out += text(margin, margin - 10, "N red, I orange, E green");
    return out + "</svg>\n";
}

}  // namespace skilldtw
