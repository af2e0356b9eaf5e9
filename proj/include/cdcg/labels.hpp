#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cdcg {

/// Cluster or class ids, one per cell. Ids need not be contiguous.
using Labels = std::vector<int>;

/// Maps ids onto 0..K-1 in order of first appearance.
Labels compact_labels(const Labels& labels, int* num_classes = nullptr);

int num_distinct(const Labels& labels);

/// Reads a label file: one label per line, taken from the last comma-separated
/// field, with an optional header row. Integer labels are kept as-is;
/// otherwise string labels are mapped to ids in order of first appearance.
Labels read_labels(std::istream& in);
Labels read_labels(const std::filesystem::path& path);

/// "cell_id,cluster" rows.
void write_assignments(const std::vector<std::string>& cell_ids, const Labels& labels,
                       const std::filesystem::path& path);

/// Single "label" column.
void write_labels(const Labels& labels, const std::filesystem::path& path);

} // namespace cdcg
