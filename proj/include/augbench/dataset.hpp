#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "augbench/matrix.hpp"

namespace augbench {

// Feature matrix plus binary labels and group identifiers; the substrate that
// every augmentation technique transforms. Rows of `features`, `labels` and
// `groups` correspond one to one.
struct TabularDataset {
    Matrix features;
    std::vector<int> labels;          // 0/1, 1 = positive outcome
    std::vector<std::string> groups;  // e.g. school id; "synthetic" for generated rows
    std::vector<std::string> feature_names;

    std::size_t size() const { return labels.size(); }

    // throws std::invalid_argument on any structural violation:
    // mismatched lengths, labels outside {0,1}, non-finite features,
    // feature-name count != column count
    void validate() const;

    bool both_classes_present() const;
    std::size_t count_label(int label) const;
    std::vector<std::size_t> indices_of_label(int label) const;
    // label whose row count is strictly smaller; returns 1 on ties
    int minority_label() const;

    TabularDataset select(std::span<const std::size_t> row_indices) const;

    friend bool operator==(const TabularDataset&, const TabularDataset&) = default;
};

// CSV ingestion: comma separator, '.' decimal, UTF-8, mandatory header row.
// Features are all non-label, non-group numeric columns in header order.
// Errors: missing file/column, non-numeric feature cell, label outside {0,1},
// empty file, non-finite values.
TabularDataset load_csv(const std::string& path, const std::string& label_column,
                        const std::string& group_column);

// Writes the dataset with feature columns first, then "label", then "group",
// full double precision, so load_csv(save_csv(ds)) == ds.
void save_csv(const TabularDataset& ds, const std::string& path);

}  // namespace augbench
