#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "extsq/chainmap.hpp"
#include "extsq/extension.hpp"

using namespace extsq;

namespace {

const FreeResolution& small()
{
    static const auto r = resolve_ground_field(8, 44);
    return *r;
}

bool has_line(const ExactExtension& e, const std::string& line)
{
    const auto lines = e.boundary_lines();
    return std::find(lines.begin(), lines.end(), line) != lines.end();
}

}  // namespace

TEST_CASE("every shipped extension is exact")
{
    for (const auto& name : library_names()) {
        const auto e = library(name);
        const auto rep = verify_exact(e);
        CHECK_MESSAGE(rep.ok(), name, ": ", (rep.failures.empty() ? "" : rep.failures.front()));
        CHECK(rep.degrees_checked > 0);
        CHECK(static_cast<int>(e.nodes.size()) == e.s + 1);
        CHECK(e.top().degree == e.t);
    }
}

TEST_CASE("breaking a boundary map is detected")
{
    auto e = library("c0");
    const auto& last = e.maps.back();
    e.maps.back() = ModuleMap(last.source(), last.target(), last.shift());
    CHECK_FALSE(verify_exact(e).ok());
}

TEST_CASE("boundary maps of the larger extensions")
{
    // Sq2 Sq4 k2 = Sq6 k2 + Sq(3,1) k2 and Sq(3,1) k2 = 0 in M2.
    CHECK(has_line(library("c0"), "∂(k3) = Sq6 k2"));
    const auto f0 = library("f0");
    CHECK(has_line(f0, "∂(k3) = Sq5 k2"));
    CHECK(has_line(f0, "∂(k4) = Sq12 k3"));
    CHECK(has_line(f0, "∂(k1') = Sq8 k0"));
    CHECK(has_line(library("d0"), "∂(k4) = Sq7 k3"));
}

TEST_CASE("Yoneda splices")
{
    const auto h0 = library("h0"), h1 = library("h1");
    const auto h0h0 = splice(h0, h0);
    CHECK(h0h0.s == 2);
    CHECK(h0h0.t == 2);
    CHECK(verify_exact(h0h0).ok());
    CHECK(lift_to_extension(small(), h0h0).top.to_string() == "2_0");

    // h0 h1 = 0.
    const auto h0h1 = splice(h0, h1);
    CHECK(verify_exact(h0h1).ok());
    CHECK(lift_to_extension(small(), h0h1).top.is_zero());

    // h1^2 is the generator of Ext^{2,4}.
    const auto h1h1 = splice(h1, h1);
    CHECK(verify_exact(h1h1).ok());
    const auto gens = small().generators_in(2, 4);
    REQUIRE(gens.size() == 1);
    CHECK(lift_to_extension(small(), h1h1).top.gens == gens);

    const auto id = splice(identity_extension(), h0);
    CHECK(id.s == h0.s);
    CHECK(id.t == h0.t);
    CHECK(id.boundary_lines() == h0.boundary_lines());
    CHECK(lift_to_extension(small(), splice(h0, identity_extension())).top.to_string() == "1_0");
}

TEST_CASE("doubling sends h_i to h_{i+1} and c0 to c1")
{
    for (int i = 0; i < 5; ++i) {
        const auto d = double_extension(library("h" + std::to_string(i)));
        CHECK(verify_exact(d).ok());
        CHECK(lift_to_extension(small(), d).top.to_string() == "1_" + std::to_string(i + 1));
    }
    const auto c1 = double_extension(library("c0"));
    CHECK(verify_exact(c1).ok());
    CHECK(lift_to_extension(small(), c1).top == lift_to_extension(small(), library("c1")).top);
}

TEST_CASE("canonical extensions represent their cocycle, s <= 4, t <= 22")
{
    int built = 0;
    for (int s = 1; s <= 4; ++s)
        for (int t = s; t <= 22; ++t)
            for (int g : small().generators_in(s, t)) {
                const auto e = canonical_extension(small(), s, t, {g});
                CHECK_MESSAGE(verify_exact(e).ok(), s, "_", g);
                CHECK(lift_to_extension(small(), e).top.gens == std::vector<int>{g});
                ++built;
            }
    CHECK(built == 33);
    const auto canon_h0 = canonical_extension(small(), 1, 1, {0});
    CHECK(lift_to_extension(small(), canon_h0).top == lift_to_extension(small(), library("h0")).top);
}

TEST_CASE("library lookups")
{
    CHECK(library_names().size() == 12);
    CHECK_THROWS(library("nope"));
    const auto e0 = library("e0");
    CHECK(e0.node_of("u") == -1);
    CHECK(e0.node_of("k2") == 2);
    CHECK(e0.node_of("zz") == -2);
}
