// Minimal free resolutions over A, swept t ascending then s ascending.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "extsq/f2.hpp"
#include "extsq/milnor.hpp"
#include "extsq/module.hpp"

namespace extsq {

// One term a * s_g of a free-module element.
struct FreeTerm {
    AlgebraElement coef;
    int gen;
};

struct ResolverOptions {
    // Cells on one anti-diagonal s + t are independent; with threads > 1
    // they run concurrently.  The output is the same either way.
    int threads = 1;
};

class FreeResolution {
public:
    // Resolution of m; the augmentation sends s = 0 generators into m.
    explicit FreeResolution(ModulePtr m, ResolverOptions opts = {});

    const ModulePtr& module() const { return module_; }
    const ResolverOptions& options() const { return opts_; }

    // Computes every bidegree with s <= s_max and t <= t_max not yet done.
    void extend(int s_max, int t_max);
    // Highest t finished at s, or module lo - 1.
    int frontier(int s) const;
    int s_count() const { return static_cast<int>(done_.size()); }
    bool covers(int s, int t) const { return s >= 0 && s < s_count() && t <= frontier(s); }

    std::size_t generator_count(int s) const;
    int generator_degree(int s, int g) const;
    // Indices of generators of C_s in internal degree t.
    std::vector<int> generators_in(int s, int t) const;
    std::map<std::pair<int, int>, int> ext_dimensions() const;

    // Dimension of C_s in internal degree t (s >= 0); for s = -1 the module.
    std::size_t dim(int s, int t) const;
    // Offset of the block of generator g inside C_s in degree t.
    std::size_t offset(int s, int t, int g) const;
    // (generator, monomial) of a coordinate of C_s in degree t.
    std::pair<int, MilnorMonomial> decode(int s, int t, std::size_t c) const;
    F2Vector encode(int s, int t, const std::vector<FreeTerm>& terms) const;
    std::vector<FreeTerm> decode_element(int s, int t, const F2Vector& v) const;

    // d(s_g) as a vector of C_{s-1} (of the module when s = 0) in degree
    // deg(s_g).
    const F2Vector& differential_vector(int s, int g) const;
    std::vector<FreeTerm> differential(int s, int g) const;

    // a * v for v in C_s degree t.
    F2Vector act(int s, int t, const MilnorMonomial& a, const F2Vector& v) const;
    // Rows: basis of C_s in degree t.  Columns: C_{s-1} (or the module).
    F2Matrix d_matrix(int s, int t) const;

    // Canonical text: "(Sq8 + Sq(2,2)) 1_0 + Sq1 1_3"; the module's basis
    // labels when s = 0.
    std::string format_element(int s, int t, const F2Vector& v) const;
    std::string format_differential(int s, int g) const;
    // "d(2_2) = Sq^{4} 1_0 + Sq^{(0,1)} 1_1 + Sq^{1} 1_2"
    std::string format_differential_tex(int s, int g) const;
    // Every generator, one "s g t : element" line each.
    std::string canonical_dump() const;

    // d.d = 0 and minimality for every generator; exactness by rank on every
    // finished bidegree with s >= 1.  Returns the first failure.
    std::optional<std::string> verify() const;

    // Binary checkpoint.  Throws std::runtime_error on corrupt, truncated or
    // inconsistent files.
    void save(const std::string& path) const;
    static FreeResolution load(const std::string& path, ModulePtr m);

    // Builds from given differentials (s, degree, element), e.g. a
    // transcription; generators must come in sweep order per s.
    void adopt_generator(int s, int degree, F2Vector d);
    void set_frontier(int s, int t);

private:
    struct Generator {
        int degree;
        F2Vector d;
    };
    struct CellResult {
        std::vector<Generator> made;
        F2Matrix d;  // d_s in degree t, new generators included
    };
    CellResult compute_cell(int s, int t, const F2Matrix* lower) const;

    ModulePtr module_;
    ResolverOptions opts_;
    std::vector<std::vector<Generator>> gens_;
    std::vector<int> done_;
    // Matrices of d_s at the frontier, kept until C_{s+1} consumes them.
    std::map<std::pair<int, int>, F2Matrix> pending_;
    std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();

    friend std::shared_ptr<const FreeResolution> resolve_ground_field(int, int, ResolverOptions);
    friend FreeResolution load_transcription(const std::string&, ModulePtr);
};

// A resolution of F2 computed through (s_max, t_max).  Uses a checkpoint in
// the directory named by EXTSQ_CACHE_DIR when that variable is set.
std::shared_ptr<const FreeResolution> resolve_ground_field(int s_max, int t_max, ResolverOptions opts = {});

// Parses a published transcription ("s g t : element" lines).
FreeResolution load_transcription(const std::string& path, ModulePtr m);

}  // namespace extsq
