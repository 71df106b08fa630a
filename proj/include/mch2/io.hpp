#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mch2/dynamics.hpp"
#include "mch2/experiments.hpp"

namespace mch2 {

// shortest decimal that reads back to the same double; "inf", "-inf", "nan" otherwise
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(const std::vector<double>& values);
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);
CsvTable trajectory_table(const Trajectory& tr);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

nlohmann::json to_json(const EnsembleReport& r);
nlohmann::json trajectory_summary(const Trajectory& tr);

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    bool line = true;  // polyline, otherwise markers
};

struct Plot {
    std::string title, xlabel, ylabel;
    bool logx = false, logy = false;
    std::vector<PlotSeries> series;
    std::vector<std::string> notes;  // printed under the title
};

std::string render_svg(const Plot& p);
void emit_svg(const std::string& path, const Plot& p);

}  // namespace mch2
