// The step-by-step construction of the extensions for e0 and d0, with every
// intermediate value checked against its expected value.
#pragma once

#include <string>
#include <vector>

#include "extsq/resolution.hpp"
#include "extsq/sq.hpp"

namespace extsq {

struct WalkthroughStep {
    std::string name;
    std::string expected;
    std::string got;
    bool ok() const { return expected == got; }
};

struct WalkthroughReport {
    std::vector<WalkthroughStep> steps;
    bool ok() const;
    // The first step that did not match, or nullptr.
    const WalkthroughStep* first_divergence() const;
};

// r must resolve F2 through (8, 42) for the Sq step of e0.
WalkthroughReport e0_walkthrough(const FreeResolution& r, SqOptions opts = {});

}  // namespace extsq
