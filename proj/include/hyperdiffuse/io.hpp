#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hyperdiffuse/hypergraph.hpp"

namespace hyperdiffuse {

/// Hypergraph text format: line 1 is "N M", then one line per hyperedge:
/// "w(e) v0:q0 v1:q1 ...".
Hypergraph read_hypergraph(std::istream& is);
Hypergraph read_hypergraph_file(const std::string& path);
void write_hypergraph(const Hypergraph& h, std::ostream& os);
void write_hypergraph_file(const Hypergraph& h, const std::string& path);

/// Features: CSV, N rows x d columns, no header.
Matrix read_features(std::istream& is);
Matrix read_features_file(const std::string& path);
void write_matrix_csv(const Matrix& m, std::ostream& os);
void write_matrix_csv_file(const Matrix& m, const std::string& path);

/// Labels: CSV "vertex,label" rows; vertices absent from the file are
/// unlabeled (-1). An optional non-numeric header line is skipped.
std::vector<int> read_labels(std::istream& is, int num_vertices);
std::vector<int> read_labels_file(const std::string& path, int num_vertices);
void write_labels(const std::vector<int>& labels, std::ostream& os);
void write_labels_file(const std::vector<int>& labels, const std::string& path);

/// Split file: whitespace-separated train vertex indices.
std::vector<int> read_split(std::istream& is);
std::vector<int> read_split_file(const std::string& path);

/// All split files in a directory, sorted by filename.
std::vector<std::vector<int>> read_splits_dir(const std::string& dir);

/// Round-trip decimal formatting (17 significant digits).
std::string format_double(double value);

}  // namespace hyperdiffuse
