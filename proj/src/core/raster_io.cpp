#include "raster_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace quansim {

namespace {

std::vector<double> min_max_normalize(std::vector<double> values) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double range = hi - lo;
    for (double& v : values) {
        v = range > 0.0 ? (v - lo) / range : 0.0;
    }
    return values;
}

GridField parse_csv(std::istream& in, const std::string& path, bool normalize,
                    double cell_size_m) {
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    int width = -1;
    int height = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = line.find(',', pos);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            const std::string tok = line.substr(pos, end - pos);
            try {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
                    ++used;
                if (used != tok.size()) throw std::invalid_argument(tok);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" + tok +
                                 "' at column offset " + std::to_string(pos));
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (width < 0) {
            width = static_cast<int>(row.size());
        } else if (static_cast<int>(row.size()) != width) {
            throw ShapeError(path + ":" + std::to_string(line_no) + ": row has " +
                             std::to_string(row.size()) + " columns, expected " +
                             std::to_string(width));
        }
        values.insert(values.end(), row.begin(), row.end());
        ++height;
    }
    if (height == 0 || width <= 0) {
        throw ParseError(path + ": empty CSV raster");
    }
    if (normalize) values = min_max_normalize(std::move(values));
    return GridField(width, height, std::move(values), cell_size_m);
}

// Reads the next whitespace-delimited token, skipping '#' comment lines.
std::string next_pgm_token(std::istream& in, const std::string& path) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(c);
    }
    if (tok.empty()) throw ParseError(path + ": truncated PGM header");
    return tok;
}

int parse_pgm_int(std::istream& in, const std::string& path, const char* what) {
    const std::string tok = next_pgm_token(in, path);
    int value = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || value <= 0) {
        throw ParseError(path + ": bad PGM " + what + " '" + tok + "'");
    }
    return value;
}

GridField parse_pgm(std::istream& in, const std::string& path, bool normalize,
                    double cell_size_m) {
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    const bool binary = magic == "P5";
    if (!binary && magic != "P2") {
        throw ParseError(path + ": unsupported PGM magic '" + magic + "'");
    }
    const int width = parse_pgm_int(in, path, "width");
    const int height = parse_pgm_int(in, path, "height");
    const int maxval = parse_pgm_int(in, path, "maxval");
    if (maxval > 65535) throw ParseError(path + ": PGM maxval too large");

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<double> values;
    values.reserve(count);
    if (binary) {
        const int bytes_per = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(count * bytes_per);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
            throw ParseError(path + ": truncated P5 pixel data at byte offset " +
                             std::to_string(in.gcount()));
        }
        for (std::size_t i = 0; i < count; ++i) {
            const int raw = bytes_per == 1 ? buf[i] : (buf[2 * i] << 8) | buf[2 * i + 1];
            values.push_back(static_cast<double>(raw) / maxval);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const int raw = parse_pgm_int(in, path, "pixel");
            if (raw > maxval) throw ParseError(path + ": pixel exceeds maxval");
            values.push_back(static_cast<double>(raw) / maxval);
        }
    }
    if (normalize) values = min_max_normalize(std::move(values));
    return GridField(width, height, std::move(values), cell_size_m);
}

}  // namespace

GridField load_raster(const std::string& path, bool normalize, double cell_size_m) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open raster file: " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.seekg(0);
    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) {
        return parse_pgm(in, path, normalize, cell_size_m);
    }
    return parse_csv(in, path, normalize, cell_size_m);
}

void save_csv(const GridField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    char buf[64];
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            std::snprintf(buf, sizeof(buf), "%.17g", field.at(Cell{x, y}));
            out << buf;
            if (x + 1 < field.width()) out << ',';
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace quansim
