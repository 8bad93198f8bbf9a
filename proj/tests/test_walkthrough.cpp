#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "extsq/walkthrough.hpp"

using namespace extsq;

TEST_CASE("every step of the e0 construction checks out")
{
    const auto r = resolve_ground_field(8, 44);
    const auto rep = e0_walkthrough(*r);
    for (const auto& step : rep.steps)
        CHECK_MESSAGE(step.ok(), step.name, ": expected ", step.expected, ", got ", step.got);
    CHECK(rep.ok());
    CHECK(rep.steps.size() == 23);
    CHECK(rep.first_divergence() == nullptr);
}
