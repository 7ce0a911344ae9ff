#pragma once

// CSV tables and static SVG line charts for the batch front-end.
//
// The CSV is the authoritative artifact: one header row, one record per
// sample, and numbers printed with 17 significant digits so identical runs
// produce identical bytes.  Every table must carry an err column; the
// constructor enforces it so no value ships without its estimate.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace casimir {

/// One numeric cell, formatted for byte-reproducible output.
inline std::string format_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : cols_(std::move(columns)) {
        if (cols_.empty()) throw std::invalid_argument("CsvTable: no columns");
        if (std::find(cols_.begin(), cols_.end(), "err") == cols_.end())
            throw std::invalid_argument("CsvTable: an err column is required");
    }

    void add_row(std::vector<double> values) {
        if (values.size() != cols_.size())
            throw std::invalid_argument("CsvTable: row width does not match header");
        rows_.push_back(std::move(values));
    }

    const std::vector<std::string>& columns() const { return cols_; }
    std::size_t row_count() const { return rows_.size(); }

    std::size_t column_index(const std::string& col) const {
        const auto it = std::find(cols_.begin(), cols_.end(), col);
        if (it == cols_.end()) throw std::invalid_argument("CsvTable: no column " + col);
        return static_cast<std::size_t>(it - cols_.begin());
    }

    double at(std::size_t row, const std::string& col) const {
        return rows_.at(row)[column_index(col)];
    }

    double column_max_abs(const std::string& col) const {
        const std::size_t j = column_index(col);
        double m = 0.0;
        for (const auto& r : rows_) m = std::max(m, std::abs(r[j]));
        return m;
    }

    void write(std::ostream& os) const {
        for (std::size_t j = 0; j < cols_.size(); ++j)
            os << cols_[j] << (j + 1 < cols_.size() ? ',' : '\n');
        for (const auto& r : rows_)
            for (std::size_t j = 0; j < r.size(); ++j)
                os << format_cell(r[j]) << (j + 1 < r.size() ? ',' : '\n');
    }

    /// Binary mode keeps '\n' record separators on every platform.
    void save(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("CsvTable: cannot open " + path);
        write(os);
        if (!os) throw std::runtime_error("CsvTable: write failed for " + path);
    }

private:
    std::vector<std::string> cols_;
    std::vector<std::vector<double>> rows_;
};

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgOptions {
    int width = 720;
    int height = 440;
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;  ///< decade scale for convergence profiles
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v, bool log_scale) {
    char buf[32];
    if (log_scale)
        std::snprintf(buf, sizeof buf, "%.2g", std::pow(10.0, v));
    else
        std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace detail

/**
 * @brief Minimal static SVG 1.1 line chart: framed plot area, five ticks per
 *        axis, one polyline per series, legend when labels are present.
 *        log_y plots log10 of the positive samples; non-finite points are
 *        dropped rather than propagated into coordinates.
 */
inline void write_svg_lines(std::ostream& os, const std::vector<SvgSeries>& series,
                            const SvgOptions& opt = {}) {
    const double W = opt.width, H = opt.height;
    const double L = 76, R = 18, T = 42, B = 54;

    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!opt.log_y || y > 0.0);
    };
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool any = false;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double yy = opt.log_y ? std::log10(s.y[i]) : s.y[i];
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = ymax = yy;
                any = true;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, yy);
            ymax = std::max(ymax, yy);
        }
    if (!any) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax - xmin <= 0) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin <= 0) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto sy = [&](double y) {
        const double yy = opt.log_y ? std::log10(y) : y;
        return H - B - (yy - ymin) / (ymax - ymin) * (H - T - B);
    };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width
       << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << ' '
       << opt.height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const char* font = " font-family=\"DejaVu Sans, Helvetica, sans-serif\"";

    // frame, grid, tick labels
    os << "<rect x=\"" << detail::svg_num(L) << "\" y=\"" << detail::svg_num(T)
       << "\" width=\"" << detail::svg_num(W - L - R) << "\" height=\""
       << detail::svg_num(H - T - B) << "\" fill=\"none\" stroke=\"#808080\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 4.0;
        const double fy = ymin + (ymax - ymin) * k / 4.0;
        const double px = sx(fx);
        const double py = H - B - (fy - ymin) / (ymax - ymin) * (H - T - B);
        if (k > 0 && k < 4) {
            os << "<line x1=\"" << detail::svg_num(px) << "\" y1=\"" << detail::svg_num(T)
               << "\" x2=\"" << detail::svg_num(px) << "\" y2=\"" << detail::svg_num(H - B)
               << "\" stroke=\"#e0e0e0\"/>\n";
            os << "<line x1=\"" << detail::svg_num(L) << "\" y1=\"" << detail::svg_num(py)
               << "\" x2=\"" << detail::svg_num(W - R) << "\" y2=\"" << detail::svg_num(py)
               << "\" stroke=\"#e0e0e0\"/>\n";
        }
        os << "<text x=\"" << detail::svg_num(px) << "\" y=\"" << detail::svg_num(H - B + 16)
           << "\" text-anchor=\"middle\" font-size=\"11\"" << font << ">"
           << detail::tick_label(fx, false) << "</text>\n";
        os << "<text x=\"" << detail::svg_num(L - 6) << "\" y=\"" << detail::svg_num(py + 4)
           << "\" text-anchor=\"end\" font-size=\"11\"" << font << ">"
           << detail::tick_label(fy, opt.log_y) << "</text>\n";
    }

    static const char* palette[] = {"#4472c4", "#ed7d31", "#70ad47", "#9e480e", "#7f7f7f"};
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            pts += detail::svg_num(sx(s.x[i]));
            pts += ',';
            pts += detail::svg_num(sy(s.y[i]));
            pts += ' ';
        }
        if (pts.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << palette[si % 5]
           << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    }

    if (!opt.title.empty())
        os << "<text x=\"" << detail::svg_num(W / 2) << "\" y=\"22\" text-anchor=\"middle\""
           << " font-size=\"15\"" << font << ">" << detail::svg_escape(opt.title)
           << "</text>\n";
    if (!opt.x_label.empty())
        os << "<text x=\"" << detail::svg_num(L + (W - L - R) / 2) << "\" y=\""
           << detail::svg_num(H - 14) << "\" text-anchor=\"middle\" font-size=\"12\"" << font
           << ">" << detail::svg_escape(opt.x_label) << "</text>\n";
    if (!opt.y_label.empty())
        os << "<text x=\"16\" y=\"" << detail::svg_num(T + (H - T - B) / 2)
           << "\" text-anchor=\"middle\" font-size=\"12\"" << font << " transform=\"rotate(-90 16 "
           << detail::svg_num(T + (H - T - B) / 2) << ")\">" << detail::svg_escape(opt.y_label)
           << "</text>\n";

    bool legend = false;
    for (const auto& s : series) legend = legend || !s.label.empty();
    if (legend) {
        double ly = T + 14;
        for (std::size_t si = 0; si < series.size(); ++si) {
            if (series[si].label.empty()) continue;
            const double lx = W - R - 150;
            os << "<line x1=\"" << detail::svg_num(lx) << "\" y1=\"" << detail::svg_num(ly - 4)
               << "\" x2=\"" << detail::svg_num(lx + 18) << "\" y2=\""
               << detail::svg_num(ly - 4) << "\" stroke=\"" << palette[si % 5]
               << "\" stroke-width=\"1.5\"/>\n";
            os << "<text x=\"" << detail::svg_num(lx + 24) << "\" y=\"" << detail::svg_num(ly)
               << "\" font-size=\"11\"" << font << ">" << detail::svg_escape(series[si].label)
               << "</text>\n";
            ly += 16;
        }
    }
    os << "</svg>\n";
}

inline void save_svg_lines(const std::string& path, const std::vector<SvgSeries>& series,
                           const SvgOptions& opt = {}) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_svg_lines: cannot open " + path);
    write_svg_lines(os, series, opt);
    if (!os) throw std::runtime_error("write_svg_lines: write failed for " + path);
}

}  // namespace casimir
