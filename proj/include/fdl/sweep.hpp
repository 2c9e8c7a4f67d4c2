// Experiment orchestration: cross-product sweeps over (eps, k, p) cells,
// parallel across cells, with per-cell failures recorded rather than fatal.
#pragma once

#include <string>
#include <vector>

#include "fdl/config.hpp"
#include "fdl/records.hpp"
#include "fdl/symbol.hpp"

namespace fdl {

struct SweepResult {
    std::vector<ResultRecord> records;
    // CSV rows in the symbol-sweep column order:
    // eps, re_a, im_a, drift, d_eps, c_remainder, limit, abs_err
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    int failed_cells = 0;
};

// Axes: sweep.eps (required), sweep.k (default 1), sweep.p (default 1).
// Writes <output.dir>/sweep.csv and <output.dir>/records.jsonl unless
// output.dir is empty.
SweepResult run_sweep(const Config& cfg);

}  // namespace fdl
