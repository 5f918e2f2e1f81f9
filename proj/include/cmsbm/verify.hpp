#pragma once

#include <string>
#include <vector>

namespace cmsbm {

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst error or gap
    double tolerance = 0.0;
    int cases = 0;
};

// Oracle suite run by `cmsbm verify`: moment dominance, factorized against
// enumerated moments, brute force against the exact backend, exact against
// transfer, and the threshold/sigma_plus side agreement.
std::vector<VerifyCheck> run_verification();

}  // namespace cmsbm
