// Steenrod operations on Ext(F2, F2) from an extension E_x: a C_2-equivariant
// lift W (x) C -> E (x) E of F2 = F2 (x) F2, recorded as the maps Δ_i.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "extsq/chainmap.hpp"
#include "extsq/extension.hpp"
#include "extsq/resolution.hpp"

namespace extsq {

// E (x) E: homological degree n is the sum of M_a (x) M_b over a + b = n,
// kept through internal degree cap.  In one internal degree the blocks
// (a, b) come with a ascending, each laid out as in tensor(): left degree
// ascending, then left index, then right index.
class TensorSquare {
public:
    TensorSquare(const ExactExtension& e, int cap);

    const ExactExtension& extension() const { return e_; }
    int top() const { return 2 * e_.s; }
    int cap() const { return cap_; }
    std::size_t dim(int n, int u) const;

    F2Vector act(int n, int u, const MilnorMonomial& a, const F2Vector& v) const;
    F2Vector act(int n, int u, const AlgebraElement& a, const F2Vector& v) const;
    // d (x) 1 + 1 (x) d : T_n -> T_{n-1} in internal degree u.
    const F2Matrix& boundary(int n, int u) const;
    // x (x) y -> y (x) x.
    F2Vector swap(int n, int u, const F2Vector& v) const;
    // (ε (x) ε) on T_0 in degree 0.
    bool augment(const F2Vector& v) const;
    // x (x) y for x in M_a degree p and y in M_b degree q.
    F2Vector pure(int a, int p, const F2Vector& x, int b, int q, const F2Vector& y) const;
    // Coefficient of top (x) top in T_{2s}, degree 2t.
    bool top_coefficient(const F2Vector& v) const;
    // "Sq4 k2 ⊗ k3 + ..." using the modules' basis labels.
    std::string format(int n, int u, const F2Vector& v) const;

private:
    struct Block {
        int a, b;
        std::size_t offset;
        std::vector<std::size_t> sub;  // offset of left degree p, indexed p - lo(M_a)
        std::size_t size;
    };
    struct Layout {
        std::vector<Block> blocks;
        std::size_t total = 0;
    };
    const Layout& layout(int n, int u) const;
    const Block* find_block(const Layout& l, int a) const;
    std::size_t mdim(int a, int p) const;

    const ExactExtension& e_;
    int cap_;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<int, int>, std::unique_ptr<Layout>> layouts_;
    mutable std::map<std::pair<int, int>, std::unique_ptr<F2Matrix>> boundaries_;
};

// delta[i][σ][g] = Δ_i(σ_g) in T_{σ+i}, internal degree deg(σ_g).  Filled for
// σ + i <= 2s and internal degree <= 2t; empty vectors elsewhere.
struct EquivariantLift {
    int s = 0;
    int t = 0;
    std::vector<std::vector<std::vector<F2Vector>>> delta;

    const F2Vector& at(int i, int sigma, int g) const { return delta.at(i).at(sigma).at(g); }
};

struct SqOptions {
    int threads = 1;
    // 0: solve()'s canonical solutions; otherwise a pseudo-random kernel
    // element is added to each.
    std::uint64_t seed = 0;
};

// Solved in order i ascending, then σ ascending, then generator index.
EquivariantLift build_lift(const FreeResolution& r, const TensorSquare& sq, SqOptions opts = {});

// Empty lift of the right shape (all zero), for filling from tables.
EquivariantLift empty_lift(const FreeResolution& r, const TensorSquare& sq);

// The base case and, for i > 0,
//   (d (x) 1 + 1 (x) d) Δ_i(g) = (1 + τ) Δ_{i-1}(g) + Δ_i(d g)
// on every filled generator; Δ_0 must be a chain map.  One line per
// failing generator.
std::vector<std::string> check_lift(const FreeResolution& r, const TensorSquare& sq, const EquivariantLift& lift);
// Only generators of C_σ in internal degree <= max_degree[σ] (missing
// entries mean no limit).
std::vector<std::string> check_lift(const FreeResolution& r, const TensorSquare& sq, const EquivariantLift& lift,
                                    const std::vector<int>& max_degree);

struct SqResult {
    int s = 0;
    int t = 0;
    std::vector<CochainClass> sq;  // sq[i] = Sq^i(x) in Ext^{s+i, 2t}

    // "(Sq^s, ..., Sq^0)" as in "(6_5, 5_6, 4_6, 3_9)".
    std::string to_string() const;
    bool operator==(const SqResult&) const = default;
};

SqResult compute_sq(const FreeResolution& r, const TensorSquare& sq, const EquivariantLift& lift);
// Builds the lift and reads off every Sq^i.  The resolution must reach
// (2s, 2t).
SqResult compute_sq(const FreeResolution& r, const ExactExtension& e, SqOptions opts = {});

// A transcribed table of Δ_i values: tab-separated "generator  i  element"
// lines, '#' comments, elements as sums of "a ⊗ b" with module elements on
// both sides.
struct DeltaTable {
    struct Entry {
        int s, g, i;
        std::string text;
        int line;
    };
    std::string name;
    std::vector<Entry> entries;
};
DeltaTable parse_delta_table(const std::string& text, const std::string& name = "table");
DeltaTable load_delta_table(const std::string& path);

// Parses "Sq4 k2 ⊗ k3 + k3 ⊗ Sq4 k2" into T_n, degree u.
F2Vector parse_tensor_element(const TensorSquare& sq, const std::string& text, int n, int u);

struct TableReport {
    std::vector<std::string> failures;
    int generators_checked = 0;
    int generators_skipped = 0;  // beyond the table's range
    bool ok() const { return failures.empty(); }
};

// Fills a lift from the table (absent entries are zero) and runs check_lift.
// The range checked in C_σ ends at the highest internal degree of any row
// for σ; levels with no rows are not checked.
TableReport verify_table(const FreeResolution& r, const ExactExtension& e, const DeltaTable& table);

}  // namespace extsq
