// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "json.hpp"
#include "shyps/gf2.h"

namespace shyps {

/// Matrices serialize as arrays of "0101" row strings; permutations as arrays of images.
nlohmann::json to_json(const BitMatrix &m);
BitMatrix matrix_from_json(const nlohmann::json &j);
nlohmann::json to_json(const Permutation &p);
Permutation permutation_from_json(const nlohmann::json &j);

}  // namespace shyps
