// Chain maps out of a free resolution: lifting through the comparison
// theorem, top cocycles of extensions, connecting maps and pullbacks on Ext.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "extsq/extension.hpp"
#include "extsq/resolution.hpp"

namespace extsq {

// A sum of resolution generators in one bidegree, read as an Ext class.
struct CochainClass {
    int s = 0;
    int t = 0;
    std::vector<int> gens;  // ascending

    bool is_zero() const { return gens.empty(); }
    // "7_13+7_14", or "0".
    std::string to_string() const;
    bool operator==(const CochainClass&) const = default;
};

// Parses "4_5", "7_13+7_14" or "0" (which needs s and t from the caller).
CochainClass parse_cochain(const std::string& text, int s = 0, int t = 0);

// A complex T_{-1} <- T_0 <- T_1 <- ... given degree by degree.
class TargetComplex {
public:
    virtual ~TargetComplex() = default;
    // Highest n with T_n nonzero.
    virtual int top() const = 0;
    virtual std::size_t dim(int n, int t) const = 0;
    virtual F2Vector act(int n, int t, const MilnorMonomial& a, const F2Vector& v) const = 0;
    // Rows: T_n in degree t.  Columns: T_{n-1} in degree t.
    virtual F2Matrix boundary(int n, int t) const = 0;
};

class ExtensionComplex : public TargetComplex {
public:
    explicit ExtensionComplex(const ExactExtension& e) : e_(e) {}
    int top() const override { return e_.s; }
    std::size_t dim(int n, int t) const override;
    F2Vector act(int n, int t, const MilnorMonomial& a, const F2Vector& v) const override;
    F2Matrix boundary(int n, int t) const override;

private:
    const ExactExtension& e_;
};

// T_{-1} is the resolved module.
class ResolutionComplex : public TargetComplex {
public:
    explicit ResolutionComplex(const FreeResolution& r) : r_(r) {}
    int top() const override { return r_.s_count() - 1; }
    std::size_t dim(int n, int t) const override;
    F2Vector act(int n, int t, const MilnorMonomial& a, const F2Vector& v) const override;
    F2Matrix boundary(int n, int t) const override;

private:
    const FreeResolution& r_;
};

// x_n : C_n -> T_{n - offset} on generators, for levels first..last and
// generators of internal degree <= t_max.
struct LiftedMap {
    int first = 0;
    int offset = 0;
    int t_max = 0;
    std::vector<std::vector<F2Vector>> values;  // values[n - first][g]

    int last() const { return first + static_cast<int>(values.size()) - 1; }
    // Empty vector for generators above t_max.
    const F2Vector& at(int n, int g) const { return values.at(n - first).at(g); }
};

// Solves the squares level by level: x_n(g) is a preimage under the
// boundary of T of x_{n-1}(d g), and at the first level of first_rhs(g).
// Seed 0 takes solve()'s canonical solution; other seeds add a
// pseudo-random element of the kernel.  Throws std::runtime_error naming
// the bidegree when a square cannot be filled.
LiftedMap lift_chain_map(const FreeResolution& r, const TargetComplex& target, int first, int offset, int last,
                         int t_max, const std::function<F2Vector(int g)>& first_rhs, std::uint64_t seed = 0);

// sum of a * x(h) over the terms of d(n_g).
F2Vector apply_to_boundary(const FreeResolution& r, const TargetComplex& target, const LiftedMap& x, int n, int g);

struct ChainMapToExtension {
    LiftedMap map;
    // Generators of C_s in degree t sent to the top class.
    CochainClass top;
};

// The chain map C -> E over the identity of F2.  The resolution must reach
// (e.s, e.t).
ChainMapToExtension lift_to_extension(const FreeResolution& r, const ExactExtension& e, std::uint64_t seed = 0);

struct ChainMapReport {
    std::vector<std::string> failures;
    int squares_checked = 0;
    bool ok() const { return failures.empty(); }
};

// Checks every square of a given assignment "s_g" -> element of M_s.
// Generators not listed go to zero.  Covers internal degrees up to the
// highest nonzero degree of the extension's modules.
ChainMapReport verify_chain_map(const FreeResolution& r, const ExactExtension& e,
                                const std::vector<std::pair<std::string, std::string>>& assignment);

// Connecting map Ext^{k,t}(M') -> Ext^{k+1,t}(M'') of 0 -> M' -> M -> M'' -> 0,
// with r_sub resolving M' (source of inc) and r_quot resolving M'' (target
// of proj).
CochainClass les_boundary(const ModuleMap& inc, const ModuleMap& proj, const FreeResolution& r_sub,
                          const FreeResolution& r_quot, const CochainClass& y);

// p^* : Ext(N) -> Ext(M) for p : M -> N; r_source resolves M, r_target N.
CochainClass pullback_on_ext(const ModuleMap& p, const FreeResolution& r_source, const FreeResolution& r_target,
                             const CochainClass& y);

}  // namespace extsq
