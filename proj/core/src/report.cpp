#include "cvaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "cvaudit/stats/bootstrap.hpp"

namespace cvaudit {

namespace {

using stats::Table;

// Minimal deterministic SVG canvas: enough for line charts, dot plots and
// bar charts with axes.
class Svg {
public:
    Svg(double width, double height) : width_(width), height_(height) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
            << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
        os_ << "<rect width=\"" << width_ << "\" height=\"" << height_ << "\" fill=\"white\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& color,
              double stroke = 1.0) {
        os_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
            << "\" stroke=\"" << color << "\" stroke-width=\"" << stroke << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  double stroke = 1.5) {
        os_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke
            << "\" points=\"";
        for (const auto& [x, y] : pts) os_ << x << "," << y << " ";
        os_ << "\"/>\n";
    }

    void circle(double x, double y, double r, const std::string& color) {
        os_ << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"" << color
            << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& color,
              double opacity = 1.0) {
        os_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
            << "\" fill=\"" << color << "\" fill-opacity=\"" << opacity << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 11,
              const std::string& anchor = "start") {
        os_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
            << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << escape(s)
            << "</text>\n";
    }

    void save(const std::filesystem::path& file) {
        os_ << "</svg>\n";
        std::ofstream out(file);
        if (!out) throw IoError("cannot write " + file.string());
        out << os_.str();
    }

private:
    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '&') out += "&amp;";
            else if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else out.push_back(c);
        }
        return out;
    }

    double width_, height_;
    std::ostringstream os_;
};

const std::vector<std::string>& palette() {
    static const std::vector<std::string> kColors = {
        "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
        "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd"};
    return kColors;
}

struct Frame {
    double x0, y0, x1, y1;  // plot area in canvas coordinates
    double xmin, xmax, ymin, ymax;

    double tx(double x) const { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); }
    double ty(double y) const { return y1 - (y - ymin) / (ymax - ymin) * (y1 - y0); }
};

void draw_axes(Svg& svg, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
    svg.line(f.x0, f.y1, f.x1, f.y1, "#333333");
    svg.line(f.x0, f.y0, f.x0, f.y1, "#333333");
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.xmin + (f.xmax - f.xmin) * i / 4.0;
        const double yv = f.ymin + (f.ymax - f.ymin) * i / 4.0;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", xv);
        svg.text(f.tx(xv), f.y1 + 14, buf, 10, "middle");
        std::snprintf(buf, sizeof(buf), "%g", yv);
        svg.text(f.x0 - 4, f.ty(yv) + 3, buf, 10, "end");
    }
    svg.text((f.x0 + f.x1) / 2, f.y1 + 30, xlabel, 11, "middle");
    svg.text(f.x0, f.y0 - 8, ylabel, 11, "start");
}

void write_histogram(const Table& table, const std::filesystem::path& dir,
                     const ReportOptions& opt, const std::string& reference) {
    const int bw = std::max(1, opt.histogram_bin_width);
    const int nbins = (100 + bw - 1) / bw;
    std::map<std::string, std::vector<long>> counts;
    std::map<std::string, long> totals;
    for (size_t i = 0; i < table.n(); ++i) {
        const std::string eth{to_string(table.ethnicity[i])};
        auto& c = counts[eth];
        if (c.empty()) c.assign(nbins, 0);
        const int bin = std::min(nbins - 1, (static_cast<int>(table.score[i]) - 1) / bw);
        ++c[bin];
        ++totals[eth];
    }

    std::ofstream csv(dir / "score_histogram.csv");
    if (!csv) throw IoError("cannot write score_histogram.csv");
    csv << "bin_lo,bin_hi,ethnicity,relative_frequency\n";
    for (const auto& [eth, c] : counts) {
        for (int b = 0; b < nbins; ++b) {
            csv << (b * bw + 1) << "," << std::min(100, (b + 1) * bw) << "," << eth << ","
                << static_cast<double>(c[b]) / static_cast<double>(totals[eth]) << "\n";
        }
    }

    // Reference vs pooled-others bars.
    std::vector<double> ref_freq(nbins, 0.0), other_freq(nbins, 0.0);
    long other_total = 0;
    for (const auto& [eth, t] : totals)
        if (eth != reference) other_total += t;
    for (const auto& [eth, c] : counts) {
        for (int b = 0; b < nbins; ++b) {
            if (eth == reference)
                ref_freq[b] = static_cast<double>(c[b]) / static_cast<double>(totals[eth]);
            else
                other_freq[b] += static_cast<double>(c[b]) / static_cast<double>(other_total);
        }
    }
    double ymax = 0.0;
    for (int b = 0; b < nbins; ++b) ymax = std::max({ymax, ref_freq[b], other_freq[b]});

    Svg svg(640, 400);
    Frame f{60, 30, 610, 350, 0, 100, 0, ymax * 1.1 + 1e-9};
    draw_axes(svg, f, "invitation score", "relative frequency");
    for (int b = 0; b < nbins; ++b) {
        const double x_lo = b * bw + 1, x_hi = std::min(100, (b + 1) * bw);
        const double w = f.tx(x_hi) - f.tx(x_lo);
        svg.rect(f.tx(x_lo), f.ty(other_freq[b]), w / 2, f.y1 - f.ty(other_freq[b]), "#55a868", 0.8);
        svg.rect(f.tx(x_lo) + w / 2, f.ty(ref_freq[b]), w / 2, f.y1 - f.ty(ref_freq[b]), "#4c3a8c", 0.8);
    }
    svg.text(70, 20, reference + " (dark) vs pooled others (light)", 11);
    svg.save(dir / "score_histogram.svg");
}

void write_mem(const Table& table, const std::filesystem::path& dir, const ReportOptions& opt) {
    stats::ModelSpec spec;
    spec.kind = stats::ModelKind::Eq1;
    const stats::DesignMatrix design = stats::build_design(table, spec);
    stats::FitResult fit = stats::fit_ols(design);
    stats::BootstrapOptions bopt;
    bopt.replications = std::max(100, opt.bootstrap_replications);
    bopt.seed = opt.seed;
    stats::wild_cluster_bootstrap(fit, design, bopt);
    const auto mems = stats::marginal_effects_at_mean(fit, design, "ethnicity");

    std::ofstream csv(dir / "mem_ethnicity.csv");
    if (!csv) throw IoError("cannot write mem_ethnicity.csv");
    csv << "ethnicity,estimate,ci_lo,ci_hi\n";
    double lo = 1e300, hi = -1e300;
    for (const auto& m : mems) {
        csv << m.level << "," << m.estimate << "," << m.ci_lo << "," << m.ci_hi << "\n";
        lo = std::min(lo, m.ci_lo);
        hi = std::max(hi, m.ci_hi);
    }

    Svg svg(640, 400);
    const double pad = (hi - lo) * 0.15 + 1e-9;
    Frame f{150, 30, 610, 360, lo - pad, hi + pad, 0, static_cast<double>(mems.size())};
    svg.line(f.x0, f.y1, f.x1, f.y1, "#333333");
    for (size_t i = 0; i < mems.size(); ++i) {
        const double y = f.y0 + (f.y1 - f.y0) * (static_cast<double>(i) + 0.5) /
                                     static_cast<double>(mems.size());
        svg.text(f.x0 - 6, y + 3, mems[i].level, 10, "end");
        svg.line(f.tx(mems[i].ci_lo), y, f.tx(mems[i].ci_hi), y, "#4c72b0", 2.0);
        svg.circle(f.tx(mems[i].estimate), y, 3.5, "#c44e52");
    }
    for (int i = 0; i <= 4; ++i) {
        const double xv = (lo - pad) + (hi - lo + 2 * pad) * i / 4.0;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", xv);
        svg.text(f.tx(xv), f.y1 + 14, buf, 10, "middle");
    }
    svg.text((f.x0 + f.x1) / 2, f.y1 + 30, "predicted invitation score (MEM, 95% CI)", 11, "middle");
    svg.save(dir / "mem_ethnicity.svg");
}

void write_name_table(const Table& table, const std::filesystem::path& dir,
                      const ReportOptions& opt) {
    struct NameStats {
        Ethnicity ethnicity;
        Gender gender;
        long count = 0;
        double sum = 0.0;
        long invited = 0;
    };
    std::map<std::string, NameStats> names;
    for (size_t i = 0; i < table.n(); ++i) {
        const std::string key = table.first[i] + " " + table.last[i];
        auto& s = names[key];
        s.ethnicity = table.ethnicity[i];
        s.gender = table.gender[i];
        ++s.count;
        s.sum += table.score[i];
        s.invited += table.score[i] >= opt.invitation_cutoff ? 1 : 0;
    }

    std::ofstream csv(dir / "name_scores.csv");
    if (!csv) throw IoError("cannot write name_scores.csv");
    csv << "name,ethnicity,gender,count,mean_score,invitation_probability\n";
    for (const auto& [name, s] : names) {
        csv << name << "," << to_string(s.ethnicity) << "," << to_string(s.gender) << "," << s.count
            << "," << s.sum / static_cast<double>(s.count) << ","
            << static_cast<double>(s.invited) / static_cast<double>(s.count) << "\n";
    }

    Svg svg(640, 420);
    Frame f{150, 30, 610, 380, 1, 100, 0, 18};
    draw_axes(svg, f, "mean invitation score by name", "");
    int row = 0;
    for (Ethnicity e : kAllEthnicities) {
        for (Gender g : kAllGenders) {
            const double y = f.ty(17.5 - row);
            svg.text(f.x0 - 6, y + 3,
                     std::string(to_string(e)) + "/" + std::string(to_string(g)), 9, "end");
            size_t color = static_cast<size_t>(e);
            for (const auto& [name, s] : names) {
                if (s.ethnicity != e || s.gender != g) continue;
                svg.circle(f.tx(s.sum / static_cast<double>(s.count)), y, 3.0,
                           palette()[color % palette().size()]);
            }
            ++row;
        }
    }
    svg.save(dir / "name_scores.svg");
}

void write_curves(const Table& table, const std::filesystem::path& dir) {
    stats::SweepOptions opts;
    const stats::SweepResult by_eth = stats::threshold_sweep(table, opts);
    write_sweep_csv(by_eth, dir / "cutoff_curves.csv");

    stats::SweepOptions pooled_opts;
    pooled_opts.pool_minority = true;
    const stats::SweepResult pooled = stats::threshold_sweep(table, pooled_opts);
    write_sweep_csv(pooled, dir / "sweep_minority.csv");

    Svg svg(720, 440);
    Frame f{60, 30, 690, 390, 1, 100, 0, 1};
    draw_axes(svg, f, "cutoff score", "invitation probability");
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    for (const auto& c : by_eth.cells)
        series[c.group].emplace_back(f.tx(c.cutoff), f.ty(c.probability));
    size_t k = 0;
    for (const auto& [group, pts] : series) {
        const auto& color = palette()[k % palette().size()];
        svg.polyline(pts, color);
        svg.text(f.x1 - 80, f.y0 + 12 + 12 * static_cast<double>(k), group, 9);
        svg.rect(f.x1 - 92, f.y0 + 5 + 12 * static_cast<double>(k), 8, 8, color);
        ++k;
    }
    svg.save(dir / "cutoff_curves.svg");
}

}  // namespace

void write_report(const Table& table, const std::filesystem::path& out_dir,
                  const ReportOptions& options) {
    if (table.n() == 0) throw ValidationError("report: empty analysis table");
    std::filesystem::create_directories(out_dir);
    const std::string reference = "Dutch";
    write_histogram(table, out_dir, options, reference);
    write_mem(table, out_dir, options);
    write_name_table(table, out_dir, options);
    write_curves(table, out_dir);
}

}  // namespace cvaudit
