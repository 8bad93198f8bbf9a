#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "extsq/chainmap.hpp"
#include "extsq/syntax.hpp"

using namespace extsq;

namespace {

const FreeResolution& small()
{
    static const auto r = resolve_ground_field(8, 44);
    return *r;
}

const FreeResolution& tall()
{
    static const auto r = resolve_ground_field(1, 127);
    return *r;
}

}  // namespace

TEST_CASE("top cocycles of the shipped extensions")
{
    const std::vector<std::pair<std::string, std::string>> want{
        {"h0", "1_0"}, {"h1", "1_1"}, {"h2", "1_2"}, {"h3", "1_3"}, {"h4", "1_4"}, {"h5", "1_5"},
        {"h6", "1_6"}, {"c0", "3_3"}, {"c1", "3_9"}, {"f0", "4_6"}, {"e0", "4_5"}, {"d0", "4_3"}};
    for (const auto& [name, top] : want) {
        const auto e = library(name);
        const auto& r = e.t > 44 ? tall() : small();
        CHECK_MESSAGE(lift_to_extension(r, e).top.to_string() == top, name);
        CHECK_MESSAGE(lift_to_extension(r, e, 12345).top.to_string() == top, name);
    }
}

TEST_CASE("published chain maps are chain maps")
{
    for (const auto& name : library_names()) {
        const auto e = library(name);
        const auto& r = e.t > 44 ? tall() : small();
        CHECK(!e.published_chain.empty());
        const auto rep = verify_chain_map(r, e, e.published_chain);
        CHECK_MESSAGE(rep.ok(), name, ": ", (rep.failures.empty() ? "" : rep.failures.front()));
        CHECK(rep.squares_checked > 0);
    }
}

TEST_CASE("a wrong chain value is caught")
{
    const auto e = library("c0");
    auto chain = e.published_chain;
    for (auto& [gen, value] : chain)
        if (gen == "2_4")
            value = "0";
    CHECK_FALSE(verify_chain_map(small(), e, chain).ok());
    // Without 3_3 -> k3 the square at 3_3 no longer closes.
    auto dropped = e.published_chain;
    std::erase_if(dropped, [](const auto& p) { return p.first == "3_3"; });
    CHECK_FALSE(verify_chain_map(small(), e, dropped).ok());
    CHECK_THROWS_AS(verify_chain_map(small(), e, {{"2_2", "Sq1 k9"}}), ParseError);
}

TEST_CASE("cochain syntax")
{
    const auto c = parse_cochain("7_14 + 7_13");
    CHECK(c.s == 7);
    CHECK(c.gens == std::vector<int>{13, 14});
    CHECK(c.to_string() == "7_13+7_14");
    CHECK(parse_cochain("0", 3, 9).is_zero());
    CHECK(parse_cochain("0").to_string() == "0");
    CHECK_THROWS_AS(parse_cochain("3_1+4_2"), ParseError);
    CHECK_THROWS_AS(parse_cochain("x"), ParseError);
}

TEST_CASE("the connecting map of 0 -> ΣF2 -> H(h0) -> F2 -> 0 is multiplication by h0")
{
    const auto f2 = ground_field();
    const auto m = compile(load_presentation(data_dir() + "/modules/h0.mod"), 64);
    const auto sub = suspend(*f2, 1, "ΣF2");
    const auto inc = ModuleMap::from_generators(sub, m, {F2Vector::unit(1, 0)});
    const auto proj = ModuleMap::from_generators(m, f2, {F2Vector::unit(1, 0)});
    REQUIRE(inc.compose(proj).is_zero());

    FreeResolution r_sub(sub);
    r_sub.extend(4, 20);
    const FreeResolution& r_quot = small();

    auto cls = [](const FreeResolution& r, int s, int t, std::size_t k) {
        return CochainClass{s, t, {r.generators_in(s, t).at(k)}};
    };
    // 1 -> h0, h0 -> h0^2, h1 -> h0 h1 = 0, h2 -> h0 h2, h1^2 -> h0 h1^2 = 0.
    CHECK(les_boundary(inc, proj, r_sub, r_quot, cls(r_sub, 0, 1, 0)) == cls(r_quot, 1, 1, 0));
    CHECK(les_boundary(inc, proj, r_sub, r_quot, cls(r_sub, 1, 2, 0)) == cls(r_quot, 2, 2, 0));
    CHECK(les_boundary(inc, proj, r_sub, r_quot, cls(r_sub, 1, 3, 0)).is_zero());
    CHECK(les_boundary(inc, proj, r_sub, r_quot, cls(r_sub, 1, 5, 0)) == cls(r_quot, 2, 5, 0));
    CHECK(les_boundary(inc, proj, r_sub, r_quot, cls(r_sub, 2, 5, 0)).is_zero());
}

TEST_CASE("pulling back along H(h0) -> F2 kills exactly the h0 multiples")
{
    const auto m = compile(load_presentation(data_dir() + "/modules/h0.mod"), 64);
    const auto proj = ModuleMap::from_generators(m, ground_field(), {F2Vector::unit(1, 0)});
    FreeResolution r_m(m);
    r_m.extend(3, 20);
    const FreeResolution& r = small();
    auto cls = [&](int s, int t) { return CochainClass{s, t, {r.generators_in(s, t).at(0)}}; };
    CHECK(pullback_on_ext(proj, r_m, r, cls(0, 0)).to_string() == "0_0");
    CHECK(pullback_on_ext(proj, r_m, r, cls(1, 1)).is_zero());
    CHECK_FALSE(pullback_on_ext(proj, r_m, r, cls(1, 2)).is_zero());
    CHECK_FALSE(pullback_on_ext(proj, r_m, r, cls(1, 4)).is_zero());
    CHECK(pullback_on_ext(proj, r_m, r, cls(2, 2)).is_zero());
    CHECK(pullback_on_ext(proj, r_m, r, cls(2, 9)).is_zero());
    CHECK_FALSE(pullback_on_ext(proj, r_m, r, cls(2, 4)).is_zero());
    CHECK_FALSE(pullback_on_ext(proj, r_m, r, cls(2, 8)).is_zero());
}

TEST_CASE("lifting into a resolution reproduces the identity")
{
    const FreeResolution& r = small();
    const ResolutionComplex target(r);
    const auto x = lift_chain_map(
        r, target, 0, 0, 4, 20, [&](int g) { return F2Vector::unit(r.dim(-1, r.generator_degree(0, g)), 0); });
    for (int s = 1; s <= 4; ++s)
        for (std::size_t g = 0; g < r.generator_count(s); ++g)
            if (r.generator_degree(s, static_cast<int>(g)) <= 20) {
                const int t = r.generator_degree(s, static_cast<int>(g));
                CHECK(x.at(s, static_cast<int>(g)) == F2Vector::unit(r.dim(s, t), r.offset(s, t, static_cast<int>(g))));
            }
}
