#include "extsq/chainmap.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "extsq/syntax.hpp"

namespace extsq {

std::string CochainClass::to_string() const
{
    if (gens.empty())
        return "0";
    std::string out;
    for (int g : gens) {
        if (!out.empty())
            out += "+";
        out += fmt::format("{}_{}", s, g);
    }
    return out;
}

CochainClass parse_cochain(const std::string& text, int s, int t)
{
    CochainClass c{s, t, {}};
    std::string cleaned;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            cleaned += ch;
    if (cleaned == "0")
        return c;
    std::istringstream in(cleaned);
    std::string part;
    bool first = true;
    while (std::getline(in, part, '+')) {
        const auto u = part.find('_');
        if (u == std::string::npos)
            throw ParseError("expected s_g in '" + text + "'");
        const int ps = std::stoi(part.substr(0, u)), g = std::stoi(part.substr(u + 1));
        if (first)
            c.s = ps;
        else if (ps != c.s)
            throw ParseError("mixed homological degrees in '" + text + "'");
        first = false;
        c.gens.push_back(g);
    }
    std::sort(c.gens.begin(), c.gens.end());
    return c;
}

// ---------------------------------------------------------------------------
// Targets

std::size_t ExtensionComplex::dim(int n, int t) const
{
    if (n < -1 || n > e_.s)
        return 0;
    return e_.node(n)->dim(t);
}

F2Vector ExtensionComplex::act(int n, int t, const MilnorMonomial& a, const F2Vector& v) const
{
    if (n < -1 || n > e_.s)
        return F2Vector(0);
    return e_.node(n)->act(a, t, v);
}

F2Matrix ExtensionComplex::boundary(int n, int t) const
{
    const std::size_t rows = dim(n, t), cols = dim(n - 1, t);
    if (rows == 0 || cols == 0 || n < 0 || n > e_.s)
        return F2Matrix(rows, cols);
    return e_.maps[n].matrix(t);
}

std::size_t ResolutionComplex::dim(int n, int t) const
{
    if (n < -1 || n > top())
        return 0;
    return r_.dim(n, t);
}

F2Vector ResolutionComplex::act(int n, int t, const MilnorMonomial& a, const F2Vector& v) const
{
    if (n == -1)
        return r_.module()->act(a, t, v);
    if (n > top())
        return F2Vector(0);
    return r_.act(n, t, a, v);
}

F2Matrix ResolutionComplex::boundary(int n, int t) const
{
    if (n < 0 || n > top())
        return F2Matrix(dim(n, t), dim(n - 1, t));
    return r_.d_matrix(n, t);
}

// ---------------------------------------------------------------------------
// Lifting

F2Vector apply_to_boundary(const FreeResolution& r, const TargetComplex& target, const LiftedMap& x, int n, int g)
{
    const int tn = n - 1 - x.offset;
    F2Vector out(target.dim(tn, r.generator_degree(n, g)));
    for (const auto& term : r.differential(n, g)) {
        const F2Vector& v = x.at(n - 1, term.gen);
        const int d = r.generator_degree(n - 1, term.gen);
        for (const auto& a : term.coef.terms())
            out ^= target.act(tn, d, a, v);
    }
    return out;
}

LiftedMap lift_chain_map(const FreeResolution& r, const TargetComplex& target, int first, int offset, int last,
                         int t_max, const std::function<F2Vector(int g)>& first_rhs, std::uint64_t seed)
{
    LiftedMap x;
    x.first = first;
    x.offset = offset;
    x.t_max = t_max;
    std::mt19937_64 rng(seed);
    std::map<std::pair<int, int>, LinearSolver> solvers;
    for (int n = first; n <= last; ++n) {
        if (!r.covers(n, t_max))
            throw std::out_of_range(fmt::format("lift: resolution does not reach ({}, {})", n, t_max));
        const int tn = n - offset;
        std::vector<F2Vector> level(r.generator_count(n));
        for (std::size_t g = 0; g < level.size(); ++g) {
            const int deg = r.generator_degree(n, static_cast<int>(g));
            if (deg > t_max)
                continue;
            const F2Vector rhs = n == first ? first_rhs(static_cast<int>(g))
                                            : apply_to_boundary(r, target, x, n, static_cast<int>(g));
            auto it = solvers.find({tn, deg});
            if (it == solvers.end())
                it = solvers.emplace(std::make_pair(tn, deg), LinearSolver(target.boundary(tn, deg))).first;
            auto sol = it->second.solve(rhs);
            if (!sol)
                throw std::runtime_error(
                    fmt::format("lift: no preimage for {}_{} (homological degree {}, internal degree {})", n, g, tn, deg));
            if (seed != 0)
                for (const auto& k : it->second.left_kernel())
                    if (rng() & 1)
                        *sol ^= k;
            level[g] = std::move(*sol);
        }
        x.values.push_back(std::move(level));
    }
    return x;
}

ChainMapToExtension lift_to_extension(const FreeResolution& r, const ExactExtension& e, std::uint64_t seed)
{
    ExtensionComplex target(e);
    ChainMapToExtension out;
    out.map = lift_chain_map(r, target, 0, 0, e.s, e.t,
                             [&](int g) { return r.differential_vector(0, g); }, seed);
    out.top = {e.s, e.t, {}};
    for (int g : r.generators_in(e.s, e.t))
        if (!out.map.at(e.s, g).is_zero())
            out.top.gens.push_back(g);
    return out;
}

ChainMapReport verify_chain_map(const FreeResolution& r, const ExactExtension& e,
                                const std::vector<std::pair<std::string, std::string>>& assignment)
{
    ChainMapReport rep;
    ExtensionComplex target(e);
    int t_max = 0;
    for (int i = 0; i <= e.s; ++i)
        for (int n = e.node(i)->lo(); n <= e.node(i)->hi(); ++n)
            if (e.node(i)->dim(n) > 0)
                t_max = std::max(t_max, n);

    LiftedMap x;
    x.first = 0;
    x.t_max = t_max;
    for (int n = 0; n <= e.s; ++n) {
        if (!r.covers(n, t_max))
            throw std::out_of_range(fmt::format("verify_chain_map: resolution does not reach ({}, {})", n, t_max));
        std::vector<F2Vector> level;
        for (std::size_t g = 0; g < r.generator_count(n); ++g) {
            const int deg = r.generator_degree(n, static_cast<int>(g));
            level.push_back(deg <= t_max ? F2Vector(target.dim(n, deg)) : F2Vector());
        }
        x.values.push_back(std::move(level));
    }
    for (const auto& [gen, text] : assignment) {
        const CochainClass c = parse_cochain(gen);
        if (c.gens.size() != 1 || c.s > e.s || c.gens[0] >= static_cast<int>(r.generator_count(c.s)))
            throw ParseError(fmt::format("chain map value for unknown generator '{}'", gen));
        const int g = c.gens[0];
        const int deg = r.generator_degree(c.s, g);
        const NamedElement v = parse_module_element(*e.node(c.s), text, deg);
        if (v.degree != deg)
            throw ParseError(fmt::format("{} has degree {} but '{}' has degree {}", gen, deg, text, v.degree));
        if (deg <= t_max)
            x.values[c.s][g] = v.vector;
    }
    for (int n = 0; n <= e.s; ++n) {
        for (std::size_t g = 0; g < r.generator_count(n); ++g) {
            const int deg = r.generator_degree(n, static_cast<int>(g));
            if (deg > t_max)
                continue;
            ++rep.squares_checked;
            const F2Vector lhs = target.boundary(n, deg).apply(x.values[n][g]);
            const F2Vector rhs = n == 0 ? r.differential_vector(0, static_cast<int>(g))
                                        : apply_to_boundary(r, target, x, n, static_cast<int>(g));
            if (lhs != rhs)
                rep.failures.push_back(fmt::format("square at {}_{}: ∂x = {} but x(d) = {}", n, g,
                                                   format_module_element(*e.node(n - 1), deg, lhs),
                                                   format_module_element(*e.node(n - 1), deg, rhs)));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Ext maps

namespace {

// Coefficient of the generators of y in x at level y.s, for generators of
// the source resolution in degree y.t.
CochainClass read_class(const FreeResolution& source, const FreeResolution& target, const LiftedMap& x, int level,
                        const CochainClass& y)
{
    CochainClass out{level, y.t, {}};
    for (int g : source.generators_in(level, y.t)) {
        const F2Vector& v = x.at(level, g);
        bool bit = false;
        for (int h : y.gens)
            bit ^= v.get(target.offset(y.s, y.t, h));
        if (bit)
            out.gens.push_back(g);
    }
    return out;
}

}  // namespace

CochainClass les_boundary(const ModuleMap& inc, const ModuleMap& proj, const FreeResolution& r_sub,
                          const FreeResolution& r_quot, const CochainClass& y)
{
    const ModulePtr& mid = proj.source();
    const int t = y.t;
    // f_0 : C''_0 -> M over the augmentation of M''.
    std::vector<F2Vector> f0(r_quot.generator_count(0));
    for (std::size_t g = 0; g < f0.size(); ++g) {
        const int deg = r_quot.generator_degree(0, static_cast<int>(g));
        if (deg > t)
            continue;
        auto sol = solve(proj.matrix(deg), r_quot.differential_vector(0, static_cast<int>(g)));
        if (!sol)
            throw std::runtime_error(fmt::format("les_boundary: projection is not onto in degree {}", deg));
        f0[g] = *sol;
    }
    // On C''_1, f_0 d lands in M'; that starts a map C''_{n+1} -> C'_n.
    auto first = [&](int g) {
        const int deg = r_quot.generator_degree(1, g);
        F2Vector v(mid->dim(deg));
        for (const auto& term : r_quot.differential(1, g))
            v ^= mid->act(term.coef, r_quot.generator_degree(0, term.gen), f0[term.gen]);
        auto sol = solve(inc.matrix(deg), v);
        if (!sol)
            throw std::runtime_error(fmt::format("les_boundary: image of 1_{} is not in the submodule", g));
        return *sol;
    };
    ResolutionComplex target(r_sub);
    const LiftedMap x = lift_chain_map(r_quot, target, 1, 1, y.s + 1, t, first);
    return read_class(r_quot, r_sub, x, y.s + 1, y);
}

CochainClass pullback_on_ext(const ModuleMap& p, const FreeResolution& r_source, const FreeResolution& r_target,
                             const CochainClass& y)
{
    ResolutionComplex target(r_target);
    auto first = [&](int g) {
        const int deg = r_source.generator_degree(0, g);
        return p.apply(deg, r_source.differential_vector(0, g));
    };
    const LiftedMap x = lift_chain_map(r_source, target, 0, 0, y.s, y.t, first);
    return read_class(r_source, r_target, x, y.s, y);
}

}  // namespace extsq
