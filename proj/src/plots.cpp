#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cmsbm/error.hpp"
#include "cmsbm/harness.hpp"

namespace cmsbm {

namespace {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

std::string render(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                   const std::vector<Series>& series, double x0, double x1, double y0, double y1, bool diagonal) {
    const double w = 520, h = 380, left = 60, right = 150, top = 40, bottom = 50;
    const double pw = w - left - right, ph = h - top - bottom;
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 <= y0) y1 = y0 + 1.0;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
    s << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw) << "\" height=\""
      << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        s << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(top + ph + 16)
          << "\" text-anchor=\"middle\" font-size=\"10\">" << fixed(xv) << "</text>\n";
        s << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(sy(yv) + 3)
          << "\" text-anchor=\"end\" font-size=\"10\">" << fixed(yv) << "</text>\n";
    }
    s << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(h - 12)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(xlabel) << "</text>\n";
    s << "<text x=\"14\" y=\"" << fixed(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
      << fixed(top + ph / 2) << ")\">" << escape(ylabel) << "</text>\n";
    if (diagonal)
        s << "<line x1=\"" << fixed(sx(x0)) << "\" y1=\"" << fixed(sy(y0)) << "\" x2=\"" << fixed(sx(x1)) << "\" y2=\""
          << fixed(sy(y1)) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[i].points.size(); ++k) {
            const auto& [x, y] = series[i].points[k];
            s << (k ? " " : "") << fixed(sx(x)) << ',' << fixed(sy(y));
        }
        s << "\"/>\n";
        const double ly = top + 12 + 16.0 * static_cast<double>(i);
        s << "<line x1=\"" << fixed(left + pw + 10) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(left + pw + 28)
          << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        s << "<text x=\"" << fixed(left + pw + 32) << "\" y=\"" << fixed(ly + 4) << "\" font-size=\"10\">"
          << escape(series[i].label) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::vector<std::pair<double, double>> roc_points(std::vector<double> pos, std::vector<double> neg) {
    std::vector<double> thresholds(pos);
    thresholds.insert(thresholds.end(), neg.begin(), neg.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (double t : thresholds) {
        const auto tp = std::count_if(pos.begin(), pos.end(), [&](double v) { return v >= t; });
        const auto fp = std::count_if(neg.begin(), neg.end(), [&](double v) { return v >= t; });
        pts.emplace_back(static_cast<double>(fp) / static_cast<double>(neg.size()),
                         static_cast<double>(tp) / static_cast<double>(pos.size()));
    }
    return pts;
}

template <class T>
std::vector<T> ordered_unique(const std::vector<T>& v) {
    std::vector<T> out;
    for (const auto& x : v)
        if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> emit_plots(const std::string& text) {
    const auto records = parse_records_csv(text);
    if (records.empty()) throw Error(ErrorKind::SchemaMismatch, "records csv holds no rows");
    std::vector<std::string> arms, variants;
    for (const auto& r : records) {
        arms.push_back(r.arm_id);
        variants.push_back(r.variant);
    }
    arms = ordered_unique(arms);
    variants = ordered_unique(variants);
    const bool detection = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.hypothesis == 'Q'; });
    std::map<std::string, double> arm_f;
    for (const auto& r : records) arm_f[r.arm_id] = r.f_intro;
    double fmin = INFINITY, fmax = -INFINITY;
    for (const auto& [a, f] : arm_f) {
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
    }
    if (fmin == fmax) {
        fmin -= 0.5;
        fmax += 0.5;
    }
    std::vector<std::pair<std::string, std::string>> out;
    if (detection) {
        std::vector<Series> auc_series;
        for (const auto& v : variants) {
            std::vector<Series> roc;
            Series auc{v, {}};
            for (const auto& a : arms) {
                std::vector<double> pos, neg;
                std::optional<double> auc_value;
                for (const auto& r : records) {
                    if (r.arm_id != a || r.variant != v || !std::isfinite(r.value)) continue;
                    (r.hypothesis == 'P' ? pos : neg).push_back(r.value);
                    auc_value = r.auc;
                }
                if (pos.empty() || neg.empty()) continue;
                roc.push_back({a + " (F=" + fixed(arm_f[a]) + ")", roc_points(pos, neg)});
                if (auc_value) auc.points.emplace_back(arm_f[a], *auc_value);
            }
            out.emplace_back("roc_" + v + ".svg",
                             render("ROC, variant " + v, "false positive rate", "true positive rate", roc, 0, 1, 0, 1, true));
            auc_series.push_back(std::move(auc));
        }
        out.emplace_back("auc_vs_F.svg", render("AUC against F", "F", "AUC", auc_series, fmin, fmax, 0.4, 1.0, false));
    } else {
        std::vector<Series> cos_series;
        for (const auto& v : variants) {
            Series s{v, {}};
            for (const auto& a : arms) {
                double sum = 0.0;
                int cnt = 0;
                for (const auto& r : records)
                    if (r.arm_id == a && r.variant == v && r.cosine && std::isfinite(*r.cosine)) {
                        sum += *r.cosine;
                        ++cnt;
                    }
                if (cnt) s.points.emplace_back(arm_f[a], sum / cnt);
            }
            cos_series.push_back(std::move(s));
        }
        out.emplace_back("cosine_vs_F.svg",
                         render("Cosine similarity against F", "F", "mean cosine", cos_series, fmin, fmax, -0.1, 1.0, false));
    }
    return out;
}

}  // namespace cmsbm
