#pragma once

#include <cstddef>
#include <vector>

#include "augbench/dataset.hpp"

namespace augbench {

// Group-aware cross-validation folds: a test fold never shares a group
// identifier with its training rows, and the test folds partition all rows.
struct GroupedFolds {
    struct Fold {
        std::vector<std::size_t> train;
        std::vector<std::size_t> test;
    };
    std::vector<Fold> folds;
};

// One fold per distinct group (groups ordered by identifier); fold i's test
// set is exactly the rows of group i. Errors: fewer than 2 distinct groups
// ("grouped CV impossible"), or any fold's train set containing one class.
GroupedFolds grouped_kfold(const TabularDataset& ds);

}  // namespace augbench
