// Bounded A-modules given degreewise, and the constructions used to build
// them: presented quotients of free modules, kernels, cokernels, sums,
// tensor products, suspension, truncation, doubling.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "extsq/f2.hpp"
#include "extsq/milnor.hpp"

namespace extsq {

// A named element of a module: generators, chain-map targets.
struct NamedElement {
    std::string name;
    int degree = 0;
    F2Vector vector;
};

// Degrees [lo, hi]; anything outside is zero.  Only the actions of the
// algebra generators Sq^{2^j} are stored; other monomials act through
// generator_decomposition() and are cached per (monomial, degree).
class Module {
public:
    Module(std::string name, int lo, int hi, std::vector<std::size_t> dims);

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    std::size_t dim(int n) const;
    std::size_t total_dimension() const;

    // Rows: basis of M_n.  Columns: basis of M_{n+2^j}.  Zero columns when
    // n + 2^j is out of range.
    F2Matrix generator_action(int j, int n) const;
    void set_generator_action(int j, int n, F2Matrix m);

    const F2Matrix& action(const MilnorMonomial& m, int n) const;
    F2Vector act(const MilnorMonomial& m, int n, const F2Vector& v) const;
    F2Vector act(const AlgebraElement& a, int n, const F2Vector& v) const;

    // Named generators; may be empty for derived modules until
    // compute_generators() fills them.
    const std::vector<NamedElement>& generators() const { return generators_; }
    void set_generators(std::vector<NamedElement> g) { generators_ = std::move(g); }
    const NamedElement* find_generator(std::string_view name) const;

    // Optional per-basis-element labels, e.g. "Sq4 k2".
    std::string basis_label(int n, std::size_t i) const;
    void set_basis_labels(int n, std::vector<std::string> labels);

    // The action is a module action: for every monomial m and generator
    // Sq^{2^j}, acting by m then Sq^{2^j} equals acting by the product.
    // Returns a description of the first failure.
    std::optional<std::string> check_associative(int max_j = 7) const;

private:
    std::string name_;
    int lo_, hi_;
    std::vector<std::size_t> dims_;
    // gen_[n - lo][j]
    std::vector<std::vector<F2Matrix>> gen_;
    std::vector<std::vector<std::string>> labels_;
    std::vector<NamedElement> generators_;

    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<MilnorMonomial, int>, std::unique_ptr<F2Matrix>> cache_;
};

using ModulePtr = std::shared_ptr<const Module>;

// Element of a module, parsed from "Sq4 Sq2 k1 + k1'".  Throws ParseError on
// unknown generators or inhomogeneous input.  A zero element parsed from "0"
// has no degree of its own, so degree_hint is used.
NamedElement parse_module_element(const Module& m, std::string_view text, std::optional<int> degree_hint = {});
std::string format_module_element(const Module& m, int degree, const F2Vector& v);

// Free-module generator and relation data.
struct Presentation {
    struct Generator {
        std::string name;
        int degree;
    };
    // A relation sum_k a_k g_k.
    struct Relation {
        std::vector<std::pair<AlgebraElement, std::size_t>> terms;
        int degree = 0;
    };
    std::string name;
    std::vector<Generator> generators;
    std::vector<Relation> relations;
    std::optional<std::pair<int, int>> truncation;

    std::size_t generator_index(std::string_view name) const;
    void add_relation(std::string_view text);
};

// Text format, one directive per line, '#' comments:
//   module <name>
//   gen <name> <degree>
//   rel <element>
//   truncate <lo> <hi>
Presentation parse_presentation(std::string_view text);
Presentation load_presentation(const std::string& path);
std::string format_presentation(const Presentation& p);

// The quotient of the free module by the relations, cut off above `cap` (or
// the truncation, whichever is lower).
ModulePtr compile(const Presentation& p, int cap);

// Free module on generators of the given degrees, through degree cap.
ModulePtr free_module(std::string name, const std::vector<Presentation::Generator>& gens, int cap);
ModulePtr ground_field();

class ModuleMap {
public:
    ModuleMap(ModulePtr source, ModulePtr target, int shift = 0);

    // Determined by images of the source generators.  Throws
    // std::invalid_argument if the assignment is not A-linear.
    static ModuleMap from_generators(ModulePtr source, ModulePtr target, const std::vector<F2Vector>& images,
                                     int shift = 0);

    const ModulePtr& source() const { return source_; }
    const ModulePtr& target() const { return target_; }
    // Target degree = source degree + shift.
    int shift() const { return shift_; }

    const F2Matrix& matrix(int n) const;
    void set_matrix(int n, F2Matrix m);
    F2Vector apply(int n, const F2Vector& v) const;

    // Commutes with every Sq^{2^j}; returns the first failure.
    std::optional<std::string> check_linear() const;
    bool is_zero() const;

    ModuleMap compose(const ModuleMap& after) const;  // after . this

private:
    ModulePtr source_, target_;
    int shift_;
    std::vector<F2Matrix> mats_;  // by source degree
};

// Generators of M: per degree, a complement of the decomposables.  Unit
// vectors not hit by a decomposable pivot are chosen, in order.
std::vector<NamedElement> compute_generators(const Module& m, const std::string& prefix = "g");

struct SubmoduleResult {
    ModulePtr module;
    ModuleMap inclusion;
};
struct QuotientResult {
    ModulePtr module;
    ModuleMap projection;
};

SubmoduleResult kernel(const ModuleMap& f, std::string name = "ker");
// Submodule spanned degreewise by the given vectors (must be closed).
SubmoduleResult submodule(ModulePtr m, const std::vector<std::vector<F2Vector>>& spans, std::string name);
SubmoduleResult generated_submodule(ModulePtr m, const std::vector<NamedElement>& elements, std::string name);
QuotientResult cokernel(const ModuleMap& f, std::string name = "coker");
QuotientResult quotient(ModulePtr m, const std::vector<NamedElement>& elements, std::string name);

ModulePtr direct_sum(const std::vector<ModulePtr>& parts, std::string name);
ModulePtr tensor(const Module& a, const Module& b, int cap, std::string name);
ModulePtr suspend(const Module& m, int shift, std::string name = {});
ModulePtr truncate(const Module& m, int lo, int hi, std::string name = {});
// Pullback along halving, degrees doubled.
ModulePtr double_module(const Module& m, std::string name = {});

}  // namespace extsq
