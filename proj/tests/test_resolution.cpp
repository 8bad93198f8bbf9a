#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "extsq/extension.hpp"
#include "extsq/resolution.hpp"

using namespace extsq;

namespace {

std::string published_path() { return data_dir() + "/resolution/f2_published.txt"; }

// (s, g) -> canonical line, from a dump or the transcription.
std::map<std::pair<int, int>, std::string> lines_of(std::istream& in)
{
    std::map<std::pair<int, int>, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        int s, g;
        ls >> s >> g;
        out[{s, g}] = line;
    }
    return out;
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("extsq_test_" + name)).string();
}

}  // namespace

TEST_CASE("resolution of F2 through (8, 44) is a minimal resolution")
{
    const auto r = resolve_ground_field(8, 44);
    CHECK_FALSE(r->verify().has_value());
    CHECK(r->generator_count(0) == 1);
    CHECK(r->generator_degree(0, 0) == 0);
}

TEST_CASE("Ext^1 and Ext^2 match the Hopf and product classes")
{
    const auto r = resolve_ground_field(2, 44);
    const auto ext = r->ext_dimensions();
    auto dim = [&](int s, int t) {
        auto it = ext.find({s, t});
        return it == ext.end() ? 0 : it->second;
    };
    for (int t = 1; t <= 44; ++t) {
        CHECK_MESSAGE(dim(1, t) == ((t & (t - 1)) == 0 ? 1 : 0), "t = ", t);
        // h_i h_j, i <= j, j != i + 1.
        int want = 0;
        for (int i = 0; (1 << i) <= t; ++i)
            for (int j = i; (1 << i) + (1 << j) <= t; ++j)
                if (j != i + 1 && (1 << i) + (1 << j) == t)
                    ++want;
        CHECK_MESSAGE(dim(2, t) == want, "t = ", t);
    }
}

TEST_CASE("computed differentials equal the published transcription")
{
    std::ifstream pub(published_path());
    REQUIRE(pub);
    const auto want = lines_of(pub);
    const auto small = resolve_ground_field(8, 44);
    const auto tall = resolve_ground_field(1, 127);
    std::istringstream a(small->canonical_dump()), b(tall->canonical_dump());
    auto got = lines_of(a);
    for (auto& [k, v] : lines_of(b))
        got[k] = v;
    int compared = 0;
    for (const auto& [key, line] : want) {
        REQUIRE_MESSAGE(got.count(key), line);
        CHECK(got.at(key) == line);
        ++compared;
    }
    CHECK(compared == 131);
    // And nothing extra in the published range.
    for (const auto& [key, line] : got) {
        const auto [s, g] = key;
        if (s == 0)
            continue;
        const int t = s == 1 ? tall->generator_degree(s, g) : small->generator_degree(s, g);
        if ((s <= 8 && t <= 44) || s == 1)
            CHECK_MESSAGE(want.count(key), line);
    }
}

TEST_CASE("the transcription itself is a minimal resolution")
{
    const auto pub = load_transcription(published_path(), ground_field());
    CHECK_FALSE(pub.verify().has_value());
}

TEST_CASE("threads do not change the output")
{
    FreeResolution one(ground_field(), {1});
    FreeResolution four(ground_field(), {4});
    one.extend(6, 36);
    four.extend(6, 36);
    CHECK(one.canonical_dump() == four.canonical_dump());
}

TEST_CASE("extending in steps matches a single sweep")
{
    FreeResolution a(ground_field());
    a.extend(3, 10);
    a.extend(5, 20);
    a.extend(6, 30);
    FreeResolution b(ground_field());
    b.extend(6, 30);
    CHECK(a.canonical_dump() == b.canonical_dump());
}

TEST_CASE("checkpoint round trip")
{
    FreeResolution r(ground_field());
    r.extend(5, 30);
    const std::string path = temp_path("ckpt.bin");
    r.save(path);
    const FreeResolution back = FreeResolution::load(path, ground_field());
    CHECK(back.canonical_dump() == r.canonical_dump());
    CHECK(back.frontier(3) == r.frontier(3));

    // Loaded resolutions can keep going.
    FreeResolution more = FreeResolution::load(path, ground_field());
    more.extend(6, 34);
    FreeResolution fresh(ground_field());
    fresh.extend(6, 34);
    CHECK(more.canonical_dump() == fresh.canonical_dump());

    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size / 2);
    CHECK_THROWS_AS(FreeResolution::load(path, ground_field()), std::runtime_error);
    {
        std::ofstream bad(path, std::ios::binary | std::ios::trunc);
        bad << "not a checkpoint";
    }
    CHECK_THROWS_AS(FreeResolution::load(path, ground_field()), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("degenerate ranges")
{
    FreeResolution r(ground_field());
    r.extend(0, 0);
    CHECK(r.canonical_dump() == "0 0 0 : u\n");
    FreeResolution q(ground_field());
    q.extend(3, 2);
    CHECK(q.generator_count(1) == 2);
    CHECK(q.generator_count(2) == 1);
    CHECK(q.generator_count(3) == 0);
}

TEST_CASE("resolving a module other than F2")
{
    // One generator, so one s = 0 generator in its degree.
    const auto m = compile(load_presentation(data_dir() + "/modules/c0_m1.mod"), 64);
    FreeResolution r(m);
    r.extend(4, 24);
    CHECK_FALSE(r.verify().has_value());
    CHECK(r.generators_in(0, 1).size() == 1);
    CHECK(r.generator_count(0) == 1);
}
