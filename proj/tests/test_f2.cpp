#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "extsq/f2.hpp"

using namespace extsq;

namespace {

F2Matrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c)
{
    F2Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m.set(i, j, rng() & 1);
    return m;
}

// Every combination of rows, by enumeration.
std::vector<F2Vector> row_span(const F2Matrix& m)
{
    std::vector<F2Vector> out;
    for (std::uint32_t mask = 0; mask < (1u << m.rows()); ++mask) {
        F2Vector v(m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i)
            if (mask >> i & 1)
                v ^= m.row(i);
        out.push_back(v);
    }
    return out;
}

std::size_t brute_rank(const F2Matrix& m)
{
    auto span = row_span(m);
    std::sort(span.begin(), span.end(), [](const F2Vector& a, const F2Vector& b) { return a.to_string() < b.to_string(); });
    span.erase(std::unique(span.begin(), span.end()), span.end());
    std::size_t r = 0;
    while ((std::size_t{1} << r) < span.size())
        ++r;
    return r;
}

}  // namespace

TEST_CASE("vector bit operations")
{
    F2Vector v = F2Vector::from_string("0110000000000000000000000000000000000000000000000000000000000000101");
    CHECK(v.size() == 67);
    CHECK(v.popcount() == 4);
    CHECK(v.first_set() == 1);
    CHECK(v.next_set(3) == 64);
    CHECK(v.support() == std::vector<std::size_t>{1, 2, 64, 66});
    F2Vector w(67);
    w.add_at(63, F2Vector::from_string("1101"));
    CHECK(w.support() == std::vector<std::size_t>{63, 64, 66});
    CHECK(v.dot(w) == false);
    CHECK(v.slice(63, 4).to_string() == "0101");
    CHECK(F2Vector::from_string("10").concat(F2Vector::from_string("011")).to_string() == "10011");
}

TEST_CASE("rank agrees with enumeration of the row space")
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t r = 1 + rng() % 9, c = 1 + rng() % 12;
        const F2Matrix m = random_matrix(rng, r, c);
        CHECK(rank(m) == brute_rank(m));
    }
}

TEST_CASE("rref transform and pivots")
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const F2Matrix m = random_matrix(rng, 1 + rng() % 10, 1 + rng() % 10);
        const RowReduction rr = rref(m);
        CHECK(rr.transform * m == rr.reduced);
        for (std::size_t i = 0; i < rr.rank(); ++i) {
            CHECK(rr.reduced.row(i).first_set() == rr.pivots[i]);
            for (std::size_t k = 0; k < rr.rank(); ++k)
                CHECK(rr.reduced.get(k, rr.pivots[i]) == (k == i));
        }
        for (std::size_t i = rr.rank(); i < rr.reduced.rows(); ++i)
            CHECK(rr.reduced.row(i).is_zero());
    }
}

TEST_CASE("solve finds a preimage exactly when one exists")
{
    std::mt19937 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const F2Matrix m = random_matrix(rng, 1 + rng() % 7, 1 + rng() % 7);
        const auto span = row_span(m);
        const LinearSolver solver(m);
        for (std::uint32_t bits = 0; bits < (1u << m.cols()); ++bits) {
            F2Vector rhs(m.cols());
            for (std::size_t j = 0; j < m.cols(); ++j)
                rhs.assign(j, bits >> j & 1);
            const bool reachable = std::find(span.begin(), span.end(), rhs) != span.end();
            const auto x = solve(m, rhs);
            REQUIRE(x.has_value() == reachable);
            if (x) {
                CHECK(m.apply(*x) == rhs);
                CHECK(solver.solve(rhs) == x);
            }
        }
    }
}

TEST_CASE("kernels")
{
    std::mt19937 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const F2Matrix m = random_matrix(rng, 1 + rng() % 8, 1 + rng() % 8);
        const auto left = left_kernel_basis(m);
        CHECK(left.size() == m.rows() - rank(m));
        for (const auto& x : left)
            CHECK(m.apply(x).is_zero());
        const F2Matrix lk(left, m.rows());
        CHECK(rank(lk) == left.size());
        const auto kb = kernel_basis(m);
        CHECK(kb.size() == m.cols() - rank(m));
        for (const auto& x : kb)
            CHECK(m.transpose().apply(x).is_zero());
        CHECK(LinearSolver(m).left_kernel().size() == left.size());
    }
}

TEST_CASE("echelon basis")
{
    EchelonBasis b(5);
    CHECK(b.insert(F2Vector::from_string("11000")));
    CHECK(b.insert(F2Vector::from_string("01100")));
    CHECK_FALSE(b.insert(F2Vector::from_string("10100")));
    CHECK(b.rank() == 2);
    CHECK(b.contains(F2Vector::from_string("10100")));
    CHECK_FALSE(b.contains(F2Vector::from_string("00001")));
    F2Vector used;
    const F2Vector red = b.reduce_tracking(F2Vector::from_string("10101"), used);
    CHECK(red == F2Vector::from_string("00001"));
}

TEST_CASE("matrix product composes row actions")
{
    std::mt19937 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const F2Matrix a = random_matrix(rng, 4, 5), b = random_matrix(rng, 5, 3);
        F2Vector v(4);
        for (std::size_t i = 0; i < 4; ++i)
            v.assign(i, rng() & 1);
        CHECK((a * b).apply(v) == b.apply(a.apply(v)));
    }
    CHECK(F2Matrix::identity(3) * F2Matrix::from_strings({"101", "011", "110"}) ==
          F2Matrix::from_strings({"101", "011", "110"}));
}
