#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "extsq/extension.hpp"
#include "extsq/module.hpp"
#include "extsq/syntax.hpp"

using namespace extsq;

namespace {

bool binom2(int n, int k) { return n >= 0 && k >= 0 && k <= n && (n & k) == k; }

// H^*(RP^inf) restricted to degrees [lo, hi], built directly from
// Sq^i x^n = C(n, i) x^{n+i}.
ModulePtr projective_space(int lo, int hi)
{
    auto m = std::make_shared<Module>("RP", lo, hi, std::vector<std::size_t>(hi - lo + 1, 1));
    for (int n = lo; n <= hi; ++n)
        for (int j = 0; n + (1 << j) <= hi; ++j) {
            F2Matrix a(1, 1);
            a.set(0, 0, binom2(n, 1 << j));
            m->set_generator_action(j, n, a);
        }
    return m;
}

ModulePtr load(const std::string& file)
{
    return compile(load_presentation(data_dir() + "/modules/" + file), 64);
}

std::vector<std::size_t> dims(const Module& m)
{
    std::vector<std::size_t> out;
    for (int n = m.lo(); n <= m.hi(); ++n)
        out.push_back(m.dim(n));
    return out;
}

F2Vector unit(std::size_t i, std::size_t n)
{
    F2Vector v(n);
    v.set(i);
    return v;
}

}  // namespace

TEST_CASE("every square acts on projective space by binomial coefficients")
{
    const auto rp = projective_space(1, 40);
    CHECK_FALSE(rp->check_associative().has_value());
    for (int n = 1; n <= 40; ++n)
        for (int i = 0; n + i <= 40; ++i)
            CHECK_MESSAGE(rp->act(MilnorMonomial::sq(i), n, unit(0, 1)).get(0) == binom2(n, i), "Sq", i, " x^", n);
    // Sq(0,1) = Sq2 Sq1 + Sq3 on x^n.
    for (int n = 1; n + 3 <= 40; ++n)
        CHECK(rp->act(MilnorMonomial({0, 1}), n, unit(0, 1)).get(0) ==
              ((binom2(n, 1) && binom2(n + 1, 2)) != binom2(n, 3)));
}

TEST_CASE("tensor product follows the Cartan formula")
{
    const auto a = projective_space(1, 8);
    const auto b = projective_space(1, 8);
    const auto t = tensor(*a, *b, 16, "RPxRP");
    CHECK_FALSE(t->check_associative().has_value());
    for (int n = 2; n <= 16; ++n)
        CHECK(t->dim(n) == static_cast<std::size_t>(std::max(0, std::min(n - 1, 17 - n))));
    // x^p (x) x^q sits at offset p - max(1, n - 8) in degree n.
    for (int p = 1; p <= 8; ++p)
        for (int q = 1; q <= 8; ++q)
            for (int k = 0; p + q + k <= 16; ++k) {
                const int n = p + q;
                const F2Vector got = t->act(MilnorMonomial::sq(k), n, unit(p - std::max(1, n - 8), t->dim(n)));
                F2Vector want(t->dim(n + k));
                for (int i = 0; i <= k; ++i)
                    if (p + i <= 8 && q + k - i <= 8 && binom2(p, i) && binom2(q, k - i))
                        want.flip(p + i - std::max(1, n + k - 8));
                CHECK(got == want);
            }
}

TEST_CASE("shipped presentations compile to the expected dimensions")
{
    CHECK(dims(*load("c0_m0.mod")) == std::vector<std::size_t>{1, 1, 0, 1, 0, 0, 0, 1});
    CHECK(load("c0_m1.mod")->total_dimension() == 5);
    CHECK(load("c0_m2.mod")->total_dimension() == 3);
    CHECK(load("e0_m0.mod")->total_dimension() == 5);
    CHECK(load("e0_m1.mod")->total_dimension() == 10);
    CHECK(load("e0_m2.mod")->total_dimension() == 10);
    CHECK(load("d0_m3.mod")->total_dimension() == 4);
    CHECK(load("f0_n1.mod")->generators().size() == 2);
    const auto m0 = load("c0_m0.mod");
    CHECK(m0->basis_label(7, 0) == "Sq(0,0,1) k0");
    for (const auto& name : {"c0_m0.mod", "c0_m1.mod", "c0_m2.mod", "e0_m1.mod", "f0_n0.mod", "f0_n1.mod", "f0_n2.mod"})
        CHECK_MESSAGE(!load(name)->check_associative().has_value(), name);
}

TEST_CASE("module elements parse and format")
{
    const auto m0 = load("c0_m0.mod");
    const auto x = parse_module_element(*m0, "Sq(0,1) k0");
    CHECK(x.degree == 3);
    CHECK(format_module_element(*m0, 3, x.vector) == "Sq(0,1) k0");
    // Sq2 Sq1 = Sq(0,1) + Sq3 and Sq3 k0 = Sq1 Sq2 k0 = 0.
    CHECK(parse_module_element(*m0, "Sq2 Sq1 k0").vector == x.vector);
    CHECK(parse_module_element(*m0, "0", 5).vector.is_zero());
    CHECK_THROWS_AS(parse_module_element(*m0, "Sq1 k9"), ParseError);
    CHECK_THROWS_AS(parse_module_element(*m0, "k0 + Sq1 k0"), ParseError);
    CHECK_THROWS_AS(parse_presentation("module X\ngen a 0\nrel Sq1 b\n"), ParseError);
    CHECK_THROWS(parse_presentation("module X\ngen a\n"));
}

TEST_CASE("maps, kernels and cokernels")
{
    const auto m0 = load("c0_m0.mod");
    const auto m1 = load("c0_m1.mod");
    const ModuleMap f =
        ModuleMap::from_generators(m1, m0, {parse_module_element(*m0, "Sq1 k0").vector});
    CHECK_FALSE(f.check_linear().has_value());
    CHECK_FALSE(f.is_zero());
    const auto ker = kernel(f);
    const auto cok = cokernel(f);
    CHECK_FALSE(ker.inclusion.check_linear().has_value());
    CHECK_FALSE(cok.projection.check_linear().has_value());
    for (int n = 0; n <= 9; ++n) {
        const std::size_t im = n >= m1->lo() && n <= m1->hi() && n <= m0->hi() ? rank(f.matrix(n)) : 0;
        CHECK(ker.module->dim(n) + im == m1->dim(n));
        CHECK(cok.module->dim(n) + im == m0->dim(n));
    }
    CHECK(f.compose(cok.projection).is_zero());
    CHECK(ker.inclusion.compose(f).is_zero());
    // Sq2 k0 = 0 in M0 but not in the target, so this is not A-linear.
    const auto h1 = load("h1.mod");
    CHECK_THROWS_AS(ModuleMap::from_generators(m0, h1, {unit(0, 1)}), std::invalid_argument);
}

TEST_CASE("suspension, truncation, sums and doubling")
{
    const auto m1 = load("c0_m1.mod");
    const auto s = suspend(*m1, 4);
    CHECK(s->lo() == 5);
    CHECK(dims(*s) == dims(*m1));
    const auto tr = truncate(*m1, 1, 5);
    CHECK(tr->total_dimension() == 3);
    CHECK_FALSE(tr->check_associative().has_value());
    const auto sum = direct_sum({m1, s}, "sum");
    CHECK(sum->total_dimension() == 10);
    CHECK_FALSE(sum->check_associative().has_value());

    const auto rp = projective_space(1, 10);
    const auto d = double_module(*rp);
    CHECK_FALSE(d->check_associative().has_value());
    for (int n = 2; n <= 20; ++n)
        CHECK(d->dim(n) == (n % 2 ? 0u : 1u));
    for (int n = 1; n <= 10; ++n)
        for (int i = 0; n + i <= 10; ++i) {
            CHECK(d->act(MilnorMonomial::sq(2 * i), 2 * n, unit(0, 1)) == rp->act(MilnorMonomial::sq(i), n, unit(0, 1)));
            if (2 * n + 2 * i + 1 <= 20)
                CHECK(d->act(MilnorMonomial::sq(2 * i + 1), 2 * n, unit(0, 1)).is_zero());
        }
}

TEST_CASE("generators of a derived module")
{
    const auto rp = projective_space(1, 16);
    // x^n is indecomposable iff no Sq^i x^{n-i} with i > 0 is nonzero.
    std::vector<int> want;
    for (int n = 1; n <= 16; ++n) {
        bool hit = false;
        for (int i = 1; i < n; ++i)
            hit = hit || binom2(n - i, i);
        if (!hit)
            want.push_back(n);
    }
    std::vector<int> got;
    for (const auto& g : compute_generators(*rp))
        got.push_back(g.degree);
    CHECK(got == want);
}
