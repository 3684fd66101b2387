#include "ncycle/box_io.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ncycle/error.h"

namespace ncycle {

using nlohmann::json;

namespace {

int read_int_field(const json &doc, const char *name) {
    if (!doc.contains(name)) {
        throw DataError(std::string("box file: missing field '") + name + "'");
    }
    const auto &v = doc.at(name);
    if (!v.is_number_integer()) {
        throw DataError(std::string("box file: field '") + name + "' must be an integer");
    }
    return v.get<int>();
}

}  // namespace

Box parse_box(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw DataError(std::string("box file: ") + e.what());
    }
    if (!doc.is_object()) {
        throw DataError("box file: top level must be an object");
    }
    int n = read_int_field(doc, "n");
    int d = read_int_field(doc, "d");
    if (n < 3 || d < 2) {
        throw DataError("box file: need n >= 3 and d >= 2");
    }
    if (!doc.contains("edges") || !doc.at("edges").is_array()) {
        throw DataError("box file: field 'edges' must be an array");
    }
    const auto &edges = doc.at("edges");
    if (edges.size() != static_cast<size_t>(n)) {
        throw DataError("box file: 'edges' has " + std::to_string(edges.size()) + " entries, expected n = " +
                        std::to_string(n));
    }
    std::vector<double> probs;
    probs.reserve(static_cast<size_t>(n * d * d));
    for (size_t i = 0; i < edges.size(); i++) {
        const auto &e = edges[i];
        if (!e.is_array() || e.size() != static_cast<size_t>(d * d)) {
            throw DataError("box file: edges[" + std::to_string(i) + "] must hold d*d = " + std::to_string(d * d) +
                            " numbers");
        }
        for (size_t j = 0; j < e.size(); j++) {
            if (!e[j].is_number()) {
                throw DataError("box file: edges[" + std::to_string(i) + "][" + std::to_string(j) +
                                "] is not a number");
            }
            probs.push_back(e[j].get<double>());
        }
    }
    std::string label;
    if (doc.contains("label")) {
        if (!doc.at("label").is_string()) {
            throw DataError("box file: field 'label' must be a string");
        }
        label = doc.at("label").get<std::string>();
    }
    try {
        return Box(n, d, std::move(probs), kDataTol, std::move(label));
    } catch (const std::invalid_argument &e) {
        throw DataError(std::string("box file: ") + e.what());
    }
}

std::string serialize_box(const Box &box) {
    json doc;
    doc["n"] = box.n();
    doc["d"] = box.d();
    if (!box.label().empty()) {
        doc["label"] = box.label();
    }
    json edges = json::array();
    for (int i = 0; i < box.n(); i++) {
        auto e = box.edge(i);
        edges.push_back(std::vector<double>(e.begin(), e.end()));
    }
    doc["edges"] = std::move(edges);
    return doc.dump(2) + "\n";
}

Box read_box_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open box file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_box(buf.str());
}

void write_text_atomically(const std::filesystem::path &path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write " + tmp.string());
        }
        out << contents;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw DataError("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace ncycle
