#include "tofdemix/outputs.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tofdemix {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path);
    return in;
}

}  // namespace

void write_cube_csv(const MeasurementCube& cube, const std::string& path,
                    std::uint64_t rng_seed) {
    auto out = open_out(path);
    out << "pixel_x,pixel_y,harmonic,re,im\n";
    for (int y = 0; y < cube.height(); ++y)
        for (int x = 0; x < cube.width(); ++x)
            for (int n = 1; n <= cube.plan().harmonic_count; ++n) {
                const auto z = cube.at(x, y, n);
                out << x << ',' << y << ',' << n << ',' << format_double(z.real()) << ','
                    << format_double(z.imag()) << '\n';
            }

    json meta;
    meta["width"] = cube.width();
    meta["height"] = cube.height();
    meta["plan"] = {{"base_frequency_hz", cube.plan().base_frequency_hz},
                    {"harmonic_count", cube.plan().harmonic_count},
                    {"modulation_depth", cube.plan().modulation_depth},
                    {"bucket_count", cube.plan().bucket_count}};
    if (cube.plan().dc_offset)
        meta["plan"]["dc_offset"] = *cube.plan().dc_offset;
    else
        meta["plan"]["dc_offset"] = nullptr;
    meta["noise_sigma"] = cube.noise_sigma();
    meta["rng_seed"] = rng_seed;
    auto mout = open_out(path + ".meta.json");
    mout << meta.dump(2) << '\n';
}

MeasurementCube read_cube_csv(const std::string& path) {
    json meta;
    {
        auto min = open_in(path + ".meta.json");
        try {
            min >> meta;
        } catch (const json::parse_error& e) {
            throw DataError(std::string("cube sidecar parse error: ") + e.what());
        }
    }
    ModulationPlan plan;
    try {
        plan.base_frequency_hz = meta.at("plan").at("base_frequency_hz").get<double>();
        plan.harmonic_count = meta.at("plan").at("harmonic_count").get<int>();
        plan.modulation_depth = meta.at("plan").at("modulation_depth").get<double>();
        plan.bucket_count = meta.at("plan").at("bucket_count").get<int>();
        if (!meta.at("plan").at("dc_offset").is_null())
            plan.dc_offset = meta.at("plan").at("dc_offset").get<double>();
    } catch (const json::exception& e) {
        throw DataError(std::string("cube sidecar missing plan fields: ") + e.what());
    }
    const int width = meta.at("width").get<int>();
    const int height = meta.at("height").get<int>();
    const double noise_sigma = meta.value("noise_sigma", 0.0);
    plan.validate();
    if (width <= 0 || height <= 0) throw DataError("cube sidecar has invalid dimensions");

    MeasurementCube cube(width, height, plan, noise_sigma);
    std::vector<char> seen(static_cast<std::size_t>(width) * height * plan.harmonic_count, 0);

    auto in = open_in(path);
    std::string line;
    std::getline(in, line); // header
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        int x, y, n;
        double re, im;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%lf,%lf", &x, &y, &n, &re, &im) != 5)
            throw DataError("cube CSV parse error at line " + std::to_string(line_no));
        if (x < 0 || x >= width || y < 0 || y >= height || n < 1 || n > plan.harmonic_count)
            throw DataError("cube CSV index out of range at line " + std::to_string(line_no));
        cube.at(x, y, n) = {re, im};
        seen[(static_cast<std::size_t>(y) * width + x) * plan.harmonic_count + n - 1] = 1;
    }
    for (char s : seen)
        if (!s) throw DataError("cube CSV is missing (pixel, harmonic) entries");
    return cube;
}

void write_grid_csv(const Grid& grid, const std::string& path) {
    auto out = open_out(path);
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
            if (x) out << ',';
            out << format_double(grid.at(x, y));
        }
        out << '\n';
    }
}

Grid read_grid_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("ragged rows in grid CSV: " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("empty grid CSV: " + path);
    Grid grid(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    for (int y = 0; y < grid.height(); ++y)
        for (int x = 0; x < grid.width(); ++x) grid.at(x, y) = rows[y][x];
    return grid;
}

void write_pgm16(const Grid& grid, const std::string& path, double scale_max) {
    if (!(scale_max > 0.0)) throw ConfigError("PGM scale must be positive");
    auto out = open_out(path);
    out << "P5\n" << grid.width() << ' ' << grid.height() << "\n65535\n";
    for (int y = 0; y < grid.height(); ++y)
        for (int x = 0; x < grid.width(); ++x) {
            double u = grid.at(x, y) / scale_max;
            u = std::min(1.0, std::max(0.0, u));
            const auto v = static_cast<std::uint16_t>(std::lround(u * 65535.0));
            const unsigned char bytes[2] = {static_cast<unsigned char>(v >> 8),
                                            static_cast<unsigned char>(v & 0xFF)};
            out.write(reinterpret_cast<const char*>(bytes), 2);
        }
}

void write_histogram_csv(const HistogramTable& table, const std::string& path) {
    auto out = open_out(path);
    out << "series,bin_index,bin_center,count\n";
    for (const auto& series : table.series)
        for (std::size_t b = 0; b < table.bin_centers.size(); ++b)
            out << series.name << ',' << b << ',' << format_double(table.bin_centers[b]) << ','
                << series.counts[b] << '\n';
}

HistogramTable read_histogram_csv(const std::string& path) {
    auto in = open_in(path);
    HistogramTable table;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string name, bin, center, count;
        if (!std::getline(ss, name, ',') || !std::getline(ss, bin, ',') ||
            !std::getline(ss, center, ',') || !std::getline(ss, count, ','))
            throw DataError("histogram CSV parse error: " + path);
        if (table.series.empty() || table.series.back().name != name)
            table.series.push_back({name, {}});
        if (table.series.size() == 1) table.bin_centers.push_back(std::stod(center));
        table.series.back().counts.push_back(std::stoul(count));
    }
    return table;
}

}  // namespace tofdemix
