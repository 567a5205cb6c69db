// SPDX-License-Identifier: Apache-2.0
// Acceptance criteria 1-8 with the full trial counts. Prints one line per criterion.
#include <cstdio>

#include "shyps/acceptance.h"

int main() {
    bool ok = true;
    for (const auto &r : shyps::run_acceptance(shyps::AcceptanceConfig::full())) {
        std::printf("%s\n", shyps::format_result(r).c_str());
        std::fflush(stdout);
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}
