#include "hyperdiffuse/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyperdiffuse/errors.hpp"

namespace hyperdiffuse {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open file for reading: " + path);
    return is;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open file for writing: " + path);
    return os;
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

Hypergraph read_hypergraph(std::istream& is) {
    Hypergraph h;
    int m = 0;
    if (!(is >> h.num_vertices >> m)) throw DataError("hypergraph header must be 'N M'");
    if (h.num_vertices < 1 || m < 0) throw DataError("invalid hypergraph header");
    std::string line;
    std::getline(is, line);

    h.hyperedges.reserve(m);
    h.edge_weights.reserve(m);
    for (int e = 0; e < m; ++e) {
        if (!std::getline(is, line))
            throw DataError("hypergraph truncated at hyperedge " + std::to_string(e));
        std::istringstream ls(line);
        double w;
        if (!(ls >> w)) throw DataError("missing edge weight on hyperedge " + std::to_string(e));
        Hyperedge edge;
        std::string token;
        while (ls >> token) {
            const size_t colon = token.find(':');
            if (colon == std::string::npos)
                throw DataError("expected 'vertex:weight' token, got '" + token + "'");
            try {
                edge.push_back({std::stoi(token.substr(0, colon)),
                                std::stod(token.substr(colon + 1))});
            } catch (const std::exception&) {
                throw DataError("malformed 'vertex:weight' token '" + token + "'");
            }
        }
        h.hyperedges.push_back(std::move(edge));
        h.edge_weights.push_back(w);
    }
    validate(h);
    return h;
}

Hypergraph read_hypergraph_file(const std::string& path) {
    auto is = open_input(path);
    return read_hypergraph(is);
}

void write_hypergraph(const Hypergraph& h, std::ostream& os) {
    os << h.num_vertices << " " << h.num_edges() << "\n";
    for (int e = 0; e < h.num_edges(); ++e) {
        os << format_double(h.edge_weights[e]);
        for (const VertexEntry& ve : h.hyperedges[e])
            os << " " << ve.vertex << ":" << format_double(ve.q);
        os << "\n";
    }
}

void write_hypergraph_file(const Hypergraph& h, const std::string& path) {
    auto os = open_output(path);
    write_hypergraph(h, os);
}

Matrix read_features(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError("non-numeric CSV cell '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("ragged CSV: row " + std::to_string(rows.size()) + " has " +
                            std::to_string(row.size()) + " cells");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("empty feature CSV");
    Matrix x(rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) x(i, j) = rows[i][j];
    return x;
}

Matrix read_features_file(const std::string& path) {
    auto is = open_input(path);
    return read_features(is);
}

void write_matrix_csv(const Matrix& m, std::ostream& os) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) os << ",";
            os << format_double(m(i, j));
        }
        os << "\n";
    }
}

void write_matrix_csv_file(const Matrix& m, const std::string& path) {
    auto os = open_output(path);
    write_matrix_csv(m, os);
}

std::vector<int> read_labels(std::istream& is, int num_vertices) {
    std::vector<int> labels(num_vertices, kUnlabeled);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos) throw DataError("label line without comma: " + line);
        int vertex, label;
        try {
            vertex = std::stoi(line.substr(0, comma));
            label = std::stoi(line.substr(comma + 1));
        } catch (const std::exception&) {
            if (first) {  // tolerate a header line
                first = false;
                continue;
            }
            throw DataError("malformed label line: " + line);
        }
        first = false;
        if (vertex < 0 || vertex >= num_vertices)
            throw DataError("label vertex " + std::to_string(vertex) + " out of range");
        labels[vertex] = label;
    }
    return labels;
}

std::vector<int> read_labels_file(const std::string& path, int num_vertices) {
    auto is = open_input(path);
    return read_labels(is, num_vertices);
}

void write_labels(const std::vector<int>& labels, std::ostream& os) {
    for (size_t v = 0; v < labels.size(); ++v)
        if (labels[v] != kUnlabeled) os << v << "," << labels[v] << "\n";
}

void write_labels_file(const std::vector<int>& labels, const std::string& path) {
    auto os = open_output(path);
    write_labels(labels, os);
}

std::vector<int> read_split(std::istream& is) {
    std::vector<int> split;
    int v;
    while (is >> v) split.push_back(v);
    return split;
}

std::vector<int> read_split_file(const std::string& path) {
    auto is = open_input(path);
    return read_split(is);
}

std::vector<std::vector<int>> read_splits_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw DataError("splits directory not found: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw DataError("splits directory is empty: " + dir);

    std::vector<std::vector<int>> splits;
    splits.reserve(paths.size());
    for (const std::string& path : paths) splits.push_back(read_split_file(path));
    return splits;
}

}  // namespace hyperdiffuse
