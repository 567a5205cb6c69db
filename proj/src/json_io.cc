// SPDX-License-Identifier: Apache-2.0
#include "shyps/json_io.h"

#include <stdexcept>

namespace shyps {

nlohmann::json to_json(const BitMatrix &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < m.rows(); i++) {
        rows.push_back(m.row(i).str());
    }
    return rows;
}

BitMatrix matrix_from_json(const nlohmann::json &j) {
    if (!j.is_array()) {
        throw std::invalid_argument("matrix JSON must be an array of rows");
    }
    std::vector<std::string> rows;
    for (const auto &row : j) {
        if (row.is_string()) {
            rows.push_back(row.get<std::string>());
        } else if (row.is_array()) {
            std::string s;
            for (const auto &x : row) {
                s += x.get<int>() ? '1' : '0';
            }
            rows.push_back(s);
        } else {
            throw std::invalid_argument("matrix row must be a string or an array of 0/1");
        }
    }
    return BitMatrix::from_strings(rows);
}

nlohmann::json to_json(const Permutation &p) { return p.images(); }

Permutation permutation_from_json(const nlohmann::json &j) {
    return Permutation(j.get<std::vector<uint32_t>>());
}

}  // namespace shyps
