#include "augbench/folds.hpp"

#include <map>
#include <stdexcept>

namespace augbench {

GroupedFolds grouped_kfold(const TabularDataset& ds) {
    std::map<std::string, std::vector<std::size_t>> by_group;
    for (std::size_t i = 0; i < ds.size(); ++i) by_group[ds.groups[i]].push_back(i);
    if (by_group.size() < 2)
        throw std::invalid_argument("grouped CV impossible: need at least 2 distinct groups");

    GroupedFolds out;
    for (const auto& [group, test_rows] : by_group) {
        GroupedFolds::Fold fold;
        fold.test = test_rows;
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.groups[i] != group) {
                fold.train.push_back(i);
                (ds.labels[i] == 0 ? has0 : has1) = true;
            }
        }
        if (!has0 || !has1)
            throw std::invalid_argument("grouped CV: train set for group '" + group +
                                        "' contains a single class");
        out.folds.push_back(std::move(fold));
    }
    return out;
}

}  // namespace augbench
