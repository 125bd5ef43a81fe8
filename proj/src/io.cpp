#include "oslo/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace oslo {

using nlohmann::json;

FeatureSet load_features(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feature file: " + path);

    FeatureSet set;
    set.dim = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        FeatureRecord rec;
        Split split;
        try {
            rec.id = obj.at("id").get<std::string>();
            rec.class_label = obj.at("class").get<int>();
            split = split_from_string(obj.at("split").get<std::string>());
            const auto& feats = obj.at("features");
            if (!feats.is_array() || feats.empty()) throw std::invalid_argument("features must be a nonempty array");
            rec.features = Vector(feats.size());
            for (std::size_t j = 0; j < feats.size(); ++j) {
                rec.features(static_cast<Eigen::Index>(j)) = feats[j].get<double>();
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed record: " + e.what());
        }
        if (!rec.features.allFinite()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-finite feature value");
        }
        if (set.dim < 0) {
            set.dim = rec.features.size();
        } else if (rec.features.size() != set.dim) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": dimension " +
                                     std::to_string(rec.features.size()) + " differs from earlier dimension " +
                                     std::to_string(set.dim));
        }
        Dataset& target = split == Split::base ? set.base
                        : split == Split::validation ? set.validation
                                                     : set.test;
        target.split = split;
        target.records.push_back(std::move(rec));
    }
    if (set.dim < 0) throw std::runtime_error(path + ": no records");
    set.base.dim = set.validation.dim = set.test.dim = set.dim;

    auto labels_of = [](const Dataset& d) {
        std::set<int> labels;
        for (const auto& rec : d.records) labels.insert(rec.class_label);
        return labels;
    };
    const auto base_labels = labels_of(set.base);
    const auto val_labels = labels_of(set.validation);
    const auto test_labels = labels_of(set.test);
    auto check_disjoint = [&](const std::set<int>& a, const std::set<int>& b,
                              const char* na, const char* nb) {
        for (int label : a) {
            if (b.count(label)) {
                throw std::runtime_error(path + ": class " + std::to_string(label) +
                                         " appears in both " + na + " and " + nb + " splits");
            }
        }
    };
    check_disjoint(base_labels, val_labels, "base", "validation");
    check_disjoint(base_labels, test_labels, "base", "test");
    check_disjoint(val_labels, test_labels, "validation", "test");
    return set;
}

void save_features(const std::string& path, const std::vector<const Dataset*>& datasets) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    for (const Dataset* dataset : datasets) {
        for (const auto& rec : dataset->records) {
            json obj;
            obj["id"] = rec.id;
            obj["class"] = rec.class_label;
            obj["split"] = to_string(dataset->split);
            json feats = json::array();
            for (Eigen::Index j = 0; j < rec.features.size(); ++j) feats.push_back(rec.features(j));
            obj["features"] = std::move(feats);
            out << obj.dump() << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace oslo
