#include "augbench/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace augbench {

void TabularDataset::validate() const {
    const std::size_t n = features.rows();
    if (labels.size() != n || groups.size() != n)
        throw std::invalid_argument("dataset: row count of features, labels and groups must match");
    if (feature_names.size() != features.cols())
        throw std::invalid_argument("dataset: feature name count must match column count");
    for (int l : labels)
        if (l != 0 && l != 1) throw std::invalid_argument("dataset: invalid label (must be 0 or 1)");
    if (!features.all_finite())
        throw std::invalid_argument("dataset: non-finite feature value");
}

bool TabularDataset::both_classes_present() const {
    bool has0 = false, has1 = false;
    for (int l : labels) (l == 0 ? has0 : has1) = true;
    return has0 && has1;
}

std::size_t TabularDataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<std::size_t> TabularDataset::indices_of_label(int label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) out.push_back(i);
    return out;
}

int TabularDataset::minority_label() const {
    return count_label(0) < count_label(1) ? 0 : 1;
}

TabularDataset TabularDataset::select(std::span<const std::size_t> row_indices) const {
    TabularDataset out;
    out.features = features.select_rows(row_indices);
    out.feature_names = feature_names;
    out.labels.reserve(row_indices.size());
    out.groups.reserve(row_indices.size());
    for (std::size_t i : row_indices) {
        out.labels.push_back(labels[i]);
        out.groups.push_back(groups[i]);
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& cell, const std::string& context) {
    if (cell.empty()) throw std::runtime_error("load_csv: empty cell in " + context);
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("load_csv: non-numeric value '" + cell + "' in " + context);
    }
    if (pos != cell.size())
        throw std::runtime_error("load_csv: non-numeric value '" + cell + "' in " + context);
    if (!std::isfinite(v))
        throw std::runtime_error("load_csv: non-finite value '" + cell + "' in " + context);
    return v;
}

}  // namespace

TabularDataset load_csv(const std::string& path, const std::string& label_column,
                        const std::string& group_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string header;
    if (!std::getline(in, header) || header.empty())
        throw std::runtime_error("load_csv: empty file " + path);

    const auto columns = split_csv_line(header);
    std::size_t label_idx = columns.size(), group_idx = columns.size();
    std::vector<std::size_t> feature_idx;
    TabularDataset ds;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == label_column) {
            label_idx = i;
        } else if (columns[i] == group_column) {
            group_idx = i;
        } else {
            feature_idx.push_back(i);
            ds.feature_names.push_back(columns[i]);
        }
    }
    if (label_idx == columns.size())
        throw std::runtime_error("load_csv: missing label column '" + label_column + "'");
    if (group_idx == columns.size())
        throw std::runtime_error("load_csv: missing group column '" + group_column + "'");

    ds.features = Matrix(0, feature_idx.size());
    std::string line;
    std::size_t line_no = 1;
    std::vector<double> row(feature_idx.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != columns.size())
            throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                     " has wrong field count");
        const std::string ctx = "line " + std::to_string(line_no);
        const double label_value = parse_double(cells[label_idx], ctx + " (label)");
        if (label_value != 0.0 && label_value != 1.0)
            throw std::runtime_error("load_csv: invalid label '" + cells[label_idx] + "' at " + ctx);
        for (std::size_t f = 0; f < feature_idx.size(); ++f)
            row[f] = parse_double(cells[feature_idx[f]],
                                  ctx + ", column '" + columns[feature_idx[f]] + "'");
        ds.features.append_row(row);
        ds.labels.push_back(static_cast<int>(label_value));
        ds.groups.push_back(cells[group_idx]);
    }
    if (ds.size() == 0) throw std::runtime_error("load_csv: no data rows in " + path);
    ds.validate();
    return ds;
}

void save_csv(const TabularDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    for (const auto& name : ds.feature_names) out << name << ',';
    out << "label,group\n";
    char buf[40];
    for (std::size_t r = 0; r < ds.size(); ++r) {
        for (double v : ds.features.row(r)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ',';
        }
        out << ds.labels[r] << ',' << ds.groups[r] << '\n';
    }
}

}  // namespace augbench
