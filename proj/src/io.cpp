#include "mch2/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mch2 {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), p);
}

void CsvTable::add(const std::vector<double>& values) {
    if (values.size() != header.size()) throw std::invalid_argument("CsvTable::add: row width differs from header");
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::string text;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) text += (i ? "," : "") + cells[i];
        text += '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
    write_text(path, text);
}

CsvTable read_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) throw std::runtime_error("read_csv: ragged row in '" + path + "'");
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

CsvTable trajectory_table(const Trajectory& tr) {
    CsvTable t;
    t.header = {"t", "hs_u", "hs_gamma", "winf", "energy", "min_slope"};
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const double slope = k < tr.min_slope.size() ? tr.min_slope[k] : std::numeric_limits<double>::quiet_NaN();
        t.add({tr.times[k], tr.hs_u[k], tr.hs_gamma[k], tr.winf[k], tr.energy[k], slope});
    }
    return t;
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

namespace {

// JSON has no inf/nan; those go out as strings
nlohmann::json num(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

nlohmann::json nums(const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

}  // namespace

nlohmann::json to_json(const EnsembleReport& r) {
    nlohmann::json j;
    j["members"] = r.members;
    j["survived"] = r.survived;
    j["broke"] = r.broke;
    j["dt_underflow"] = r.underflow;
    j["survival_fraction"] = r.survival_fraction ? num(*r.survival_fraction) : nlohmann::json();
    nlohmann::json status = nlohmann::json::array();
    for (Status s : r.status) status.push_back(to_string(s));
    j["status"] = status;
    j["seeds"] = r.seeds;
    j["stop_times"] = nums(r.stop_times);
    j["breaking_times"] = nums(r.breaking_times);
    j["lognorm"] = {{"slope", num(r.lognorm.slope)},
                    {"intercept", num(r.lognorm.intercept)},
                    {"offset", num(r.lognorm.offset)},
                    {"residual", num(r.lognorm.residual)}};
    if (r.riccati_window) j["riccati_window"] = num(*r.riccati_window);
    if (!r.clock_gaps.empty()) {
        j["clock_gaps"] = r.clock_gaps;
        j["slope_ordering"] = r.slope_ordering;
    }
    return j;
}

nlohmann::json trajectory_summary(const Trajectory& tr) {
    nlohmann::json j;
    j["status"] = to_string(tr.status);
    j["t_stop"] = num(tr.t_stop);
    j["seed"] = tr.seed;
    j["records"] = tr.times.size();
    j["winf_crossing"] = tr.winf_crossing;
    j["hs_crossing"] = tr.hs_crossing;
    if (!tr.times.empty()) {
        j["final"] = {{"t", num(tr.times.back())},
                      {"hs_u", num(tr.hs_u.back())},
                      {"hs_gamma", num(tr.hs_gamma.back())},
                      {"winf", num(tr.winf.back())},
                      {"energy", num(tr.energy.back())}};
    }
    return j;
}

namespace {

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream ss;
    ss.precision(prec);
    ss << v;
    return ss.str();
}

struct Axis {
    bool log = false;
    double lo = 0.0, hi = 1.0;  // in transformed units
    double map(double v) const { return log ? std::log10(v) : v; }
};

// range padding plus tick positions in transformed units
std::vector<double> ticks(Axis& a) {
    std::vector<double> t;
    if (a.log) {
        a.lo = std::floor(a.lo);
        a.hi = std::ceil(a.hi);
        if (a.hi <= a.lo) a.hi = a.lo + 1;
        const int stride = std::max(1, int(std::ceil((a.hi - a.lo) / 8.0)));
        for (double e = a.lo; e <= a.hi + 1e-9; e += stride) t.push_back(e);
        return t;
    }
    if (a.hi <= a.lo) {
        const double w = a.lo == 0.0 ? 1.0 : 0.1 * std::abs(a.lo);
        a.lo -= w;
        a.hi += w;
    }
    const double raw = (a.hi - a.lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0})
        if (f * mag >= raw) {
            step = f * mag;
            break;
        }
    a.lo = std::floor(a.lo / step) * step;
    a.hi = std::ceil(a.hi / step) * step;
    for (double v = a.lo; v <= a.hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

std::string render_svg(const Plot& p) {
    const double W = 760, H = 500, left = 80, right = 190, top = 50 + 16.0 * p.notes.size(), bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;

    Axis ax{p.logx}, ay{p.logy};
    bool any = false;
    double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!p.logx || x > 0) && (!p.logy || y > 0);
    };
    for (const auto& s : p.series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double X = ax.map(s.x[i]), Y = ay.map(s.y[i]);
            if (!any) {
                xlo = xhi = X;
                ylo = yhi = Y;
                any = true;
            }
            xlo = std::min(xlo, X), xhi = std::max(xhi, X);
            ylo = std::min(ylo, Y), yhi = std::max(yhi, Y);
        }

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(p.title) << "</text>\n";
    for (std::size_t i = 0; i < p.notes.size(); ++i)
        o << "<text x=\"" << W / 2 << "\" y=\"" << 42 + 16 * i << "\" text-anchor=\"middle\" fill=\"#444\">" << escape(p.notes[i])
          << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << escape(p.xlabel) << "</text>\n";
    o << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + ph / 2 << ")\">"
      << escape(p.ylabel) << "</text>\n";

    if (!any) {
        o << "<text x=\"" << left + pw / 2 << "\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" fill=\"#888\">no data</text>\n";
        o << "</svg>\n";
        return o.str();
    }

    ax.lo = xlo, ax.hi = xhi, ay.lo = ylo, ay.hi = yhi;
    const auto xt = ticks(ax), yt = ticks(ay);
    auto X = [&](double v) { return left + (v - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto Y = [&](double v) { return top + ph - (v - ay.lo) / (ay.hi - ay.lo) * ph; };
    auto label = [](const Axis& a, double v) { return a.log ? "1e" + fmt(v) : fmt(v); };

    for (double v : xt) {
        o << "<line x1=\"" << X(v) << "\" y1=\"" << top << "\" x2=\"" << X(v) << "\" y2=\"" << top + ph
          << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << X(v) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << label(ax, v) << "</text>\n";
    }
    for (double v : yt) {
        o << "<line x1=\"" << left << "\" y1=\"" << Y(v) << "\" x2=\"" << left + pw << "\" y2=\"" << Y(v)
          << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << Y(v) + 4 << "\" text-anchor=\"end\">" << label(ay, v) << "</text>\n";
    }

    for (std::size_t k = 0; k < p.series.size(); ++k) {
        const auto& s = p.series[k];
        const char* col = palette[k % 8];
        std::ostringstream pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double px = X(ax.map(s.x[i])), py = Y(ay.map(s.y[i]));
            if (s.line)
                pts << px << "," << py << " ";
            else
                o << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"" << col << "\"/>\n";
        }
        if (s.line && !pts.str().empty())
            o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        const double ly = top + 10 + 18.0 * k;
        o << "<rect x=\"" << left + pw + 12 << "\" y=\"" << ly - 6 << "\" width=\"14\" height=\"4\" fill=\"" << col << "\"/>\n";
        o << "<text x=\"" << left + pw + 32 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void emit_svg(const std::string& path, const Plot& p) { write_text(path, render_svg(p)); }

}  // namespace mch2
