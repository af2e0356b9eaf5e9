#include "cdcg/labels.hpp"

#include <istream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "cdcg/csv.hpp"
#include "cdcg/error.hpp"

namespace cdcg {

Labels compact_labels(const Labels& labels, int* num_classes) {
    std::unordered_map<int, int> ids;
    Labels out;
    out.reserve(labels.size());
    for (int l : labels) {
        auto [it, inserted] = ids.try_emplace(l, static_cast<int>(ids.size()));
        out.push_back(it->second);
    }
    if (num_classes) *num_classes = static_cast<int>(ids.size());
    return out;
}

int num_distinct(const Labels& labels) {
    return static_cast<int>(std::unordered_set<int>(labels.begin(), labels.end()).size());
}

Labels read_labels(std::istream& in) {
    std::vector<std::string> tokens;
    std::string line;
    bool id_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = csv::split_line(line);
        if (tokens.empty() && fields.size() > 1 && fields.front() == "cell_id") id_header = true;
        tokens.push_back(fields.back());
    }
    if (tokens.empty()) throw_error(ErrorKind::Parse, "label file is empty");

    bool all_int = true;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (!csv::parse_int(tokens[i])) {
            all_int = false;
            break;
        }
    }
    // A leading non-integer token in an otherwise integer column is a header.
    std::size_t first = 0;
    if (all_int && !csv::parse_int(tokens[0])) first = 1;
    else if (!all_int && tokens.size() > 1) {
        const std::string& h = tokens[0];
        if (id_header || h == "label" || h == "cluster" || h == "class" || h == "cell_type" || h == "type") first = 1;
    }

    Labels out;
    std::map<std::string, int> names;
    for (std::size_t i = first; i < tokens.size(); ++i) {
        if (all_int) {
            const long long v = *csv::parse_int(tokens[i]);
            if (v < 0) throw_error(ErrorKind::Validation, "negative label " + tokens[i]);
            out.push_back(static_cast<int>(v));
        } else {
            auto [it, inserted] = names.try_emplace(tokens[i], static_cast<int>(names.size()));
            out.push_back(it->second);
        }
    }
    if (out.empty()) throw_error(ErrorKind::Parse, "label file has no labels");
    return out;
}

Labels read_labels(const std::filesystem::path& path) {
    auto in = csv::open_input(path);
    return read_labels(in);
}

void write_assignments(const std::vector<std::string>& cell_ids, const Labels& labels,
                       const std::filesystem::path& path) {
    if (cell_ids.size() != labels.size()) throw_error(ErrorKind::LengthMismatch, "assignments: id/label length mismatch");
    auto out = csv::open_output(path);
    out << "cell_id,cluster\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << cell_ids[i] << ',' << labels[i] << '\n';
}

void write_labels(const Labels& labels, const std::filesystem::path& path) {
    auto out = csv::open_output(path);
    out << "label\n";
    for (int l : labels) out << l << '\n';
}

} // namespace cdcg
