// The acceptance suite: twelve desk-scale checks of the limit theory, each
// with a pinned target and tolerance.  The runner reports one line per
// criterion and a machine-readable summary.
#pragma once

#include <string>
#include <vector>

namespace fdl {

struct CriterionResult {
    std::string id;           // A1..A12
    std::string description;
    bool pass = false;
    double measured = 0.0;    // headline measured value
    double target = 0.0;      // headline target
    double tolerance = 0.0;
    std::string detail;       // free-form evidence
    double wall_s = 0.0;
};

struct AcceptanceOptions {
    // multiplies the kappa used in the A2/A5 comparisons; 1.0 is the real
    // suite, anything else is for sensitivity checks of the suite itself
    double kappa_scale = 1.0;
    std::string out_dir;  // write report.json here when non-empty
    bool verbose = true;  // print one line per criterion
    // run only these ids when non-empty (e.g. {"A1","A3"})
    std::vector<std::string> only;
};

struct AcceptanceReport {
    std::vector<CriterionResult> criteria;
    bool all_pass = false;
};

AcceptanceReport run_acceptance(const AcceptanceOptions& opt = {});

}  // namespace fdl
