#include "extsq/module.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "extsq/syntax.hpp"

namespace extsq {
namespace {

int pow2(int j) { return 1 << j; }

F2Vector reversed(const F2Vector& v)
{
    F2Vector out(v.size());
    v.for_each_set([&](std::size_t i) { out.set(v.size() - 1 - i); });
    return out;
}

// Quotient of F2^n by a subspace.  The pivots sit at the highest index, so
// the surviving coordinates are the earliest ones: for the free-module
// layout that keeps the greatest monomials as basis labels.
class QuotientSpace {
public:
    explicit QuotientSpace(std::size_t n) : n_(n), rev_(n) {}

    void kill(const F2Vector& v) { rev_.insert(reversed(v)); }

    void finish()
    {
        survivors_.clear();
        index_.assign(n_, static_cast<std::size_t>(-1));
        for (std::size_t c = 0; c < n_; ++c) {
            if (!rev_.is_pivot(n_ - 1 - c)) {
                index_[c] = survivors_.size();
                survivors_.push_back(c);
            }
        }
    }

    std::size_t dim() const { return survivors_.size(); }
    const std::vector<std::size_t>& survivors() const { return survivors_; }

    F2Vector coords(const F2Vector& v) const
    {
        const F2Vector r = reversed(rev_.reduce(reversed(v)));
        F2Vector out(survivors_.size());
        r.for_each_set([&](std::size_t c) { out.set(index_[c]); });
        return out;
    }

private:
    std::size_t n_;
    EchelonBasis rev_;
    std::vector<std::size_t> survivors_;
    std::vector<std::size_t> index_;
};

std::string label_for(const MilnorMonomial& a, const std::string& gen)
{
    return a.is_unit() ? gen : to_string(a) + " " + gen;
}

}  // namespace

// ---------------------------------------------------------------------------
// Module

Module::Module(std::string name, int lo, int hi, std::vector<std::size_t> dims)
    : name_(std::move(name)), lo_(lo), hi_(hi), dims_(std::move(dims))
{
    if (hi_ < lo_ - 1)
        throw std::invalid_argument("Module: bad degree range");
    if (dims_.size() != static_cast<std::size_t>(hi_ - lo_ + 1))
        throw std::invalid_argument("Module: dimension list does not match degree range");
    gen_.resize(dims_.size());
    labels_.resize(dims_.size());
    for (int n = lo_; n <= hi_; ++n) {
        auto& row = gen_[n - lo_];
        for (int j = 0; n + pow2(j) <= hi_; ++j)
            row.emplace_back(dim(n), dim(n + pow2(j)));
    }
}

std::size_t Module::dim(int n) const
{
    if (n < lo_ || n > hi_)
        return 0;
    return dims_[n - lo_];
}

std::size_t Module::total_dimension() const
{
    std::size_t s = 0;
    for (auto d : dims_)
        s += d;
    return s;
}

F2Matrix Module::generator_action(int j, int n) const { return action(MilnorMonomial::sq(pow2(j)), n); }

void Module::set_generator_action(int j, int n, F2Matrix m)
{
    if (n < lo_ || n + pow2(j) > hi_)
        throw std::out_of_range("set_generator_action: degree out of range");
    if (m.rows() != dim(n) || m.cols() != dim(n + pow2(j)))
        throw std::invalid_argument("set_generator_action: shape mismatch");
    gen_[n - lo_][j] = std::move(m);
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
}

const F2Matrix& Module::action(const MilnorMonomial& m, int n) const
{
    const int d = m.degree();
    const auto key = std::make_pair(m, n);
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end())
            return *it->second;
    }
    if (n >= lo_ && n + d <= hi_ && d > 0 && m.length() == 1 && (m[0] & (m[0] - 1)) == 0) {
        int j = 0;
        while (pow2(j) != m[0])
            ++j;
        return gen_[n - lo_][j];
    }
    F2Matrix out;
    if (dim(n) == 0 || dim(n + d) == 0) {
        out = F2Matrix(dim(n), dim(n + d));
    }
    else if (m.is_unit()) {
        out = F2Matrix::identity(dim(n));
    }
    else {
        out = F2Matrix(dim(n), dim(n + d));
        for (const auto& f : generator_decomposition(m)) {
            const F2Matrix prod = action(f.b, n) * gen_[n + f.b.degree() - lo_][f.j];
            for (std::size_t r = 0; r < out.rows(); ++r)
                out.row(r) ^= prod.row(r);
        }
    }
    std::lock_guard lock(cache_mutex_);
    auto [it, inserted] = cache_.try_emplace(key, nullptr);
    if (inserted)
        it->second = std::make_unique<F2Matrix>(std::move(out));
    return *it->second;
}

F2Vector Module::act(const MilnorMonomial& m, int n, const F2Vector& v) const
{
    if (v.size() != dim(n))
        throw std::invalid_argument(fmt::format("{}: vector of length {} in degree {} (dim {})", name_, v.size(), n, dim(n)));
    return action(m, n).apply(v);
}

F2Vector Module::act(const AlgebraElement& a, int n, const F2Vector& v) const
{
    F2Vector out(dim(n + a.degree()));
    for (const auto& t : a.terms())
        out ^= act(t, n, v);
    return out;
}

const NamedElement* Module::find_generator(std::string_view name) const
{
    for (const auto& g : generators_)
        if (g.name == name)
            return &g;
    return nullptr;
}

std::string Module::basis_label(int n, std::size_t i) const
{
    if (n >= lo_ && n <= hi_ && i < labels_[n - lo_].size())
        return labels_[n - lo_][i];
    return fmt::format("[{}:{}]", n, i);
}

void Module::set_basis_labels(int n, std::vector<std::string> labels)
{
    if (n < lo_ || n > hi_ || labels.size() != dim(n))
        throw std::invalid_argument("set_basis_labels: shape mismatch");
    labels_[n - lo_] = std::move(labels);
}

std::optional<std::string> Module::check_associative(int max_j) const
{
    for (int n = lo_; n <= hi_; ++n) {
        if (dim(n) == 0)
            continue;
        for (int d = 0; n + d <= hi_; ++d) {
            for (const auto& m : milnor_basis(d)) {
                const F2Matrix& am = action(m, n);
                for (int j = 0; j <= max_j && n + d + pow2(j) <= hi_; ++j) {
                    const F2Matrix lhs = am * action(MilnorMonomial::sq(pow2(j)), n + d);
                    F2Matrix rhs(dim(n), dim(n + d + pow2(j)));
                    const AlgebraElement prod = multiply(MilnorMonomial::sq(pow2(j)), m);
                    for (const auto& t : prod.terms()) {
                        const F2Matrix& at = action(t, n);
                        for (std::size_t r = 0; r < rhs.rows(); ++r)
                            rhs.row(r) ^= at.row(r);
                    }
                    if (!(lhs == rhs))
                        return fmt::format("{}: Sq{} {} on degree {} disagrees with the product", name_, pow2(j),
                                           to_string(m), n);
                }
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Elements

NamedElement parse_module_element(const Module& m, std::string_view text, std::optional<int> degree_hint)
{
    TokenStream ts(text);
    const auto terms = ts.parse_module_sum();
    if (!ts.at_end())
        ts.fail("trailing input");
    std::optional<int> degree = degree_hint;
    F2Vector v;
    bool have = false;
    for (const auto& t : terms) {
        const NamedElement* g = m.find_generator(t.gen);
        if (!g)
            throw ParseError(fmt::format("unknown generator '{}' in module {}", t.gen, m.name()));
        if (t.coef.is_zero())
            continue;
        const int d = t.coef.degree() + g->degree;
        if (degree && *degree != d)
            throw ParseError(fmt::format("inhomogeneous element '{}'", text));
        degree = d;
        if (!have) {
            v = F2Vector(m.dim(d));
            have = true;
        }
        v ^= m.act(t.coef, g->degree, g->vector);
    }
    if (!degree)
        throw ParseError(fmt::format("cannot infer the degree of '{}'", text));
    if (!have)
        v = F2Vector(m.dim(*degree));
    return {std::string(text), *degree, v};
}

std::string format_module_element(const Module& m, int degree, const F2Vector& v)
{
    if (v.is_zero())
        return "0";
    std::string s;
    v.for_each_set([&](std::size_t i) {
        if (!s.empty())
            s += " + ";
        s += m.basis_label(degree, i);
    });
    return s;
}

// ---------------------------------------------------------------------------
// Presentations

std::size_t Presentation::generator_index(std::string_view n) const
{
    for (std::size_t i = 0; i < generators.size(); ++i)
        if (generators[i].name == n)
            return i;
    throw ParseError(fmt::format("unknown generator '{}' in presentation {}", n, name));
}

void Presentation::add_relation(std::string_view text)
{
    TokenStream ts(text);
    const auto terms = ts.parse_module_sum();
    if (!ts.at_end())
        ts.fail("trailing input");
    Relation r;
    bool have = false;
    for (const auto& t : terms) {
        const std::size_t g = generator_index(t.gen);
        if (t.coef.is_zero())
            continue;
        const int d = t.coef.degree() + generators[g].degree;
        if (have && d != r.degree)
            throw ParseError(fmt::format("inhomogeneous relation '{}'", text));
        r.degree = d;
        have = true;
        r.terms.emplace_back(t.coef, g);
    }
    if (have)
        relations.push_back(std::move(r));
}

Presentation parse_presentation(std::string_view text)
{
    Presentation p;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos)
            line.resize(h);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw))
            continue;
        try {
            if (kw == "module") {
                ls >> p.name;
            }
            else if (kw == "gen") {
                Presentation::Generator g;
                if (!(ls >> g.name >> g.degree))
                    throw ParseError("expected: gen <name> <degree>");
                p.generators.push_back(g);
            }
            else if (kw == "rel") {
                std::string rest;
                std::getline(ls, rest);
                p.add_relation(rest);
            }
            else if (kw == "truncate") {
                int lo, hi;
                if (!(ls >> lo >> hi))
                    throw ParseError("expected: truncate <lo> <hi>");
                p.truncation = {lo, hi};
            }
            else {
                throw ParseError("unknown directive '" + kw + "'");
            }
        }
        catch (const ParseError& e) {
            throw ParseError(fmt::format("line {}: {}", lineno, e.what()));
        }
    }
    if (p.generators.empty())
        throw ParseError("presentation has no generators");
    return p;
}

Presentation load_presentation(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_presentation(ss.str());
}

std::string format_presentation(const Presentation& p)
{
    std::string s = fmt::format("module {}\n", p.name);
    for (const auto& g : p.generators)
        s += fmt::format("gen {} {}\n", g.name, g.degree);
    for (const auto& r : p.relations) {
        std::string body;
        for (const auto& [a, g] : r.terms) {
            if (!body.empty())
                body += " + ";
            const bool paren = a.terms().size() > 1;
            if (!(a.terms().size() == 1 && a.terms()[0].is_unit()))
                body += (paren ? "(" + to_string(a) + ")" : to_string(a)) + " ";
            body += p.generators[g].name;
        }
        s += "rel " + body + "\n";
    }
    if (p.truncation)
        s += fmt::format("truncate {} {}\n", p.truncation->first, p.truncation->second);
    return s;
}

ModulePtr compile(const Presentation& p, int cap)
{
    int lo = p.generators.front().degree;
    for (const auto& g : p.generators)
        lo = std::min(lo, g.degree);
    int hi = cap;
    if (p.truncation)
        hi = std::min(hi, p.truncation->second);
    if (hi - lo > kMaxDegree)
        throw std::invalid_argument("compile: degree span exceeds the algebra tables");

    // Free layout per degree: generator blocks in order, monomials greatest first.
    const int span = std::max(hi - lo + 1, 0);
    std::vector<std::vector<std::size_t>> offset(span);
    std::vector<std::size_t> free_dim(span);
    for (int n = lo; n <= hi; ++n) {
        std::size_t off = 0;
        for (const auto& g : p.generators) {
            offset[n - lo].push_back(off);
            if (g.degree <= n)
                off += milnor_dimension(n - g.degree);
        }
        free_dim[n - lo] = off;
    }
    auto place = [&](int n, std::size_t g, const F2Vector& coeffs) {
        F2Vector v(free_dim[n - lo]);
        v.add_at(offset[n - lo][g], coeffs);
        return v;
    };

    std::vector<QuotientSpace> q;
    std::vector<std::size_t> dims;
    for (int n = lo; n <= hi; ++n) {
        QuotientSpace qs(free_dim[n - lo]);
        for (const auto& r : p.relations) {
            if (r.degree > n)
                continue;
            for (const auto& b : milnor_basis(n - r.degree)) {
                F2Vector v(free_dim[n - lo]);
                for (const auto& [a, g] : r.terms)
                    for (const auto& t : a.terms())
                        v ^= place(n, g, multiply_vector(b, t));
                qs.kill(v);
            }
        }
        qs.finish();
        dims.push_back(qs.dim());
        q.push_back(std::move(qs));
    }

    // Which (generator, monomial) a free coordinate is.
    auto decode = [&](int n, std::size_t c) {
        std::size_t g = p.generators.size() - 1;
        while (p.generators[g].degree > n || offset[n - lo][g] > c)
            --g;
        return std::make_pair(g, milnor_basis(n - p.generators[g].degree)[c - offset[n - lo][g]]);
    };

    auto mod = std::make_shared<Module>(p.name, lo, hi, dims);
    for (int n = lo; n <= hi; ++n) {
        std::vector<std::string> labels;
        for (std::size_t c : q[n - lo].survivors()) {
            const auto [g, a] = decode(n, c);
            labels.push_back(label_for(a, p.generators[g].name));
        }
        mod->set_basis_labels(n, std::move(labels));
        for (int j = 0; n + pow2(j) <= hi; ++j) {
            const int m = n + pow2(j);
            F2Matrix act(dims[n - lo], dims[m - lo]);
            const auto& surv = q[n - lo].survivors();
            for (std::size_t i = 0; i < surv.size(); ++i) {
                const auto [g, a] = decode(n, surv[i]);
                act.row(i) = q[m - lo].coords(place(m, g, multiply_vector(MilnorMonomial::sq(pow2(j)), a)));
            }
            mod->set_generator_action(j, n, std::move(act));
        }
    }
    std::vector<NamedElement> gens;
    for (std::size_t g = 0; g < p.generators.size(); ++g) {
        const int d = p.generators[g].degree;
        F2Vector v;
        if (d <= hi)
            v = q[d - lo].coords(place(d, g, F2Vector::unit(1, 0)));
        gens.push_back({p.generators[g].name, d, v});
    }
    mod->set_generators(std::move(gens));
    if (p.truncation && p.truncation->first > lo) {
        auto t = truncate(*mod, p.truncation->first, hi, p.name);
        return t;
    }
    return mod;
}

ModulePtr free_module(std::string name, const std::vector<Presentation::Generator>& gens, int cap)
{
    Presentation p;
    p.name = std::move(name);
    p.generators = gens;
    if (gens.empty())
        return std::make_shared<Module>(p.name, 0, -1, std::vector<std::size_t>{});
    return compile(p, cap);
}

ModulePtr ground_field()
{
    auto m = std::make_shared<Module>("F2", 0, 0, std::vector<std::size_t>{1});
    m->set_generators({{"u", 0, F2Vector::unit(1, 0)}});
    m->set_basis_labels(0, {"u"});
    return m;
}

// ---------------------------------------------------------------------------
// Maps

ModuleMap::ModuleMap(ModulePtr source, ModulePtr target, int shift)
    : source_(std::move(source)), target_(std::move(target)), shift_(shift)
{
    for (int n = source_->lo(); n <= source_->hi(); ++n)
        mats_.emplace_back(source_->dim(n), target_->dim(n + shift_));
}

ModuleMap ModuleMap::from_generators(ModulePtr source, ModulePtr target, const std::vector<F2Vector>& images, int shift)
{
    const auto& gens = source->generators();
    if (images.size() != gens.size())
        throw std::invalid_argument("ModuleMap::from_generators: one image per generator required");
    ModuleMap f(source, target, shift);
    for (std::size_t g = 0; g < gens.size(); ++g)
        if (images[g].size() != target->dim(gens[g].degree + shift))
            throw std::invalid_argument(fmt::format("image of {} has the wrong length", gens[g].name));
    for (int n = source->lo(); n <= source->hi(); ++n) {
        const std::size_t ds = source->dim(n), dt = target->dim(n + shift);
        F2Matrix S(0, ds), T(0, dt);
        for (std::size_t g = 0; g < gens.size(); ++g) {
            const int d = gens[g].degree;
            if (d > n || gens[g].vector.size() != source->dim(d))
                continue;
            for (const auto& a : milnor_basis(n - d)) {
                S.append_row(source->act(a, d, gens[g].vector));
                T.append_row(target->act(a, d + shift, images[g]));
            }
        }
        const RowReduction rr = rref(S);
        if (rr.rank() != ds)
            throw std::invalid_argument(fmt::format("{}: generators do not span degree {}", source->name(), n));
        const F2Matrix X = rr.transform * T;
        F2Matrix m(ds, dt);
        for (std::size_t k = 0; k < ds; ++k)
            m.row(k) = X.row(k);
        for (std::size_t k = ds; k < X.rows(); ++k)
            if (!X.row(k).is_zero())
                throw std::invalid_argument(
                    fmt::format("map {} -> {} is not A-linear in degree {}", source->name(), target->name(), n));
        f.set_matrix(n, std::move(m));
    }
    return f;
}

const F2Matrix& ModuleMap::matrix(int n) const
{
    static const F2Matrix empty;
    if (n < source_->lo() || n > source_->hi())
        return empty;
    return mats_[n - source_->lo()];
}

void ModuleMap::set_matrix(int n, F2Matrix m)
{
    if (m.rows() != source_->dim(n) || m.cols() != target_->dim(n + shift_))
        throw std::invalid_argument("ModuleMap::set_matrix: shape mismatch");
    mats_[n - source_->lo()] = std::move(m);
}

F2Vector ModuleMap::apply(int n, const F2Vector& v) const
{
    if (n < source_->lo() || n > source_->hi())
        return F2Vector(target_->dim(n + shift_));
    return matrix(n).apply(v);
}

std::optional<std::string> ModuleMap::check_linear() const
{
    for (int n = source_->lo(); n <= source_->hi(); ++n) {
        for (int j = 0; n + pow2(j) <= source_->hi() || n + shift_ + pow2(j) <= target_->hi(); ++j) {
            const F2Matrix lhs = matrix(n) * target_->generator_action(j, n + shift_);
            const F2Matrix rhs = n + pow2(j) <= source_->hi()
                                     ? source_->generator_action(j, n) * matrix(n + pow2(j))
                                     : F2Matrix(source_->dim(n), target_->dim(n + shift_ + pow2(j)));
            if (!(lhs == rhs))
                return fmt::format("{} -> {}: fails to commute with Sq{} in degree {}", source_->name(),
                                   target_->name(), pow2(j), n);
        }
    }
    return std::nullopt;
}

bool ModuleMap::is_zero() const
{
    for (const auto& m : mats_)
        if (!m.is_zero())
            return false;
    return true;
}

ModuleMap ModuleMap::compose(const ModuleMap& after) const
{
    if (after.source_.get() != target_.get())
        throw std::invalid_argument("ModuleMap::compose: modules do not match");
    ModuleMap out(source_, after.target_, shift_ + after.shift_);
    for (int n = source_->lo(); n <= source_->hi(); ++n) {
        const int m = n + shift_;
        if (m < target_->lo() || m > target_->hi())
            continue;
        out.set_matrix(n, matrix(n) * after.matrix(m));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constructions

std::vector<NamedElement> compute_generators(const Module& m, const std::string& prefix)
{
    std::vector<NamedElement> out;
    for (int n = m.lo(); n <= m.hi(); ++n) {
        EchelonBasis dec(m.dim(n));
        for (int j = 0; n - pow2(j) >= m.lo(); ++j) {
            const F2Matrix a = m.generator_action(j, n - pow2(j));
            for (const auto& r : a.row_list())
                dec.insert(r);
        }
        for (std::size_t c = 0; c < m.dim(n); ++c)
            if (!dec.is_pivot(c))
                out.push_back({fmt::format("{}{}", prefix, out.size()), n, F2Vector::unit(m.dim(n), c)});
    }
    return out;
}

SubmoduleResult submodule(ModulePtr m, const std::vector<std::vector<F2Vector>>& spans, std::string name)
{
    const int lo = m->lo(), hi = m->hi();
    if (spans.size() != static_cast<std::size_t>(std::max(hi - lo + 1, 0)))
        throw std::invalid_argument("submodule: one span per degree required");
    std::vector<RowReduction> red;
    std::vector<std::size_t> dims;
    for (int n = lo; n <= hi; ++n) {
        F2Matrix s(spans[n - lo], m->dim(n));
        RowReduction rr = rref(s);
        dims.push_back(rr.rank());
        red.push_back(std::move(rr));
    }
    auto coords = [&](int n, const F2Vector& v) {
        const auto& rr = red[n - lo];
        F2Vector out(rr.rank()), res = v;
        for (std::size_t i = 0; i < rr.rank(); ++i) {
            if (res.get(rr.pivots[i])) {
                res ^= rr.reduced.row(i);
                out.set(i);
            }
        }
        if (!res.is_zero())
            throw std::invalid_argument(fmt::format("submodule of {}: span not closed in degree {}", m->name(), n));
        return out;
    };
    auto sub = std::make_shared<Module>(name, lo, hi, dims);
    ModulePtr subp = sub;
    ModuleMap inc(subp, m);
    for (int n = lo; n <= hi; ++n) {
        F2Matrix rows(0, m->dim(n));
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < dims[n - lo]; ++i) {
            rows.append_row(red[n - lo].reduced.row(i));
            labels.push_back(format_module_element(*m, n, rows.row(i)));
        }
        sub->set_basis_labels(n, std::move(labels));
        for (int j = 0; n + pow2(j) <= hi; ++j) {
            F2Matrix a(dims[n - lo], dims[n + pow2(j) - lo]);
            for (std::size_t i = 0; i < rows.rows(); ++i)
                a.row(i) = coords(n + pow2(j), m->act(MilnorMonomial::sq(pow2(j)), n, rows.row(i)));
            sub->set_generator_action(j, n, std::move(a));
        }
        inc.set_matrix(n, std::move(rows));
    }
    return {subp, std::move(inc)};
}

SubmoduleResult kernel(const ModuleMap& f, std::string name)
{
    const auto& src = f.source();
    std::vector<std::vector<F2Vector>> spans;
    for (int n = src->lo(); n <= src->hi(); ++n)
        spans.push_back(left_kernel_basis(f.matrix(n)));
    auto r = submodule(src, spans, std::move(name));
    auto gens = compute_generators(*r.module, "z");
    std::const_pointer_cast<Module>(r.module)->set_generators(std::move(gens));
    return r;
}

SubmoduleResult generated_submodule(ModulePtr m, const std::vector<NamedElement>& elements, std::string name)
{
    std::vector<std::vector<F2Vector>> spans(std::max(m->hi() - m->lo() + 1, 0));
    for (const auto& e : elements)
        for (int n = std::max(e.degree, m->lo()); n <= m->hi(); ++n)
            for (const auto& a : milnor_basis(n - e.degree))
                spans[n - m->lo()].push_back(m->act(a, e.degree, e.vector));
    auto r = submodule(m, spans, std::move(name));
    std::vector<NamedElement> gens;
    for (const auto& e : elements) {
        if (e.degree < m->lo() || e.degree > m->hi())
            continue;
        const F2Vector v = solve(r.inclusion.matrix(e.degree), e.vector).value();
        gens.push_back({e.name, e.degree, v});
    }
    std::const_pointer_cast<Module>(r.module)->set_generators(std::move(gens));
    return r;
}

QuotientResult cokernel(const ModuleMap& f, std::string name)
{
    const auto& tgt = f.target();
    const int lo = tgt->lo(), hi = tgt->hi();
    std::vector<QuotientSpace> q;
    std::vector<std::size_t> dims;
    for (int n = lo; n <= hi; ++n) {
        QuotientSpace qs(tgt->dim(n));
        const int s = n - f.shift();
        if (s >= f.source()->lo() && s <= f.source()->hi())
            for (const auto& r : f.matrix(s).row_list())
                qs.kill(r);
        qs.finish();
        dims.push_back(qs.dim());
        q.push_back(std::move(qs));
    }
    auto mod = std::make_shared<Module>(name, lo, hi, dims);
    ModulePtr modp = mod;
    ModuleMap proj(tgt, modp);
    for (int n = lo; n <= hi; ++n) {
        const auto& surv = q[n - lo].survivors();
        std::vector<std::string> labels;
        for (auto c : surv)
            labels.push_back(tgt->basis_label(n, c));
        mod->set_basis_labels(n, std::move(labels));
        for (int j = 0; n + pow2(j) <= hi; ++j) {
            const F2Matrix g = tgt->generator_action(j, n);
            F2Matrix a(surv.size(), dims[n + pow2(j) - lo]);
            for (std::size_t i = 0; i < surv.size(); ++i)
                a.row(i) = q[n + pow2(j) - lo].coords(g.row(surv[i]));
            mod->set_generator_action(j, n, std::move(a));
        }
        F2Matrix p(tgt->dim(n), dims[n - lo]);
        for (std::size_t c = 0; c < tgt->dim(n); ++c)
            p.row(c) = q[n - lo].coords(F2Vector::unit(tgt->dim(n), c));
        proj.set_matrix(n, std::move(p));
    }
    std::vector<NamedElement> gens;
    for (const auto& g : tgt->generators())
        gens.push_back({g.name, g.degree, proj.apply(g.degree, g.vector)});
    mod->set_generators(std::move(gens));
    return {modp, std::move(proj)};
}

QuotientResult quotient(ModulePtr m, const std::vector<NamedElement>& elements, std::string name)
{
    auto sub = generated_submodule(m, elements, name + "_rel");
    return cokernel(sub.inclusion, std::move(name));
}

ModulePtr direct_sum(const std::vector<ModulePtr>& parts, std::string name)
{
    if (parts.empty())
        return std::make_shared<Module>(name, 0, -1, std::vector<std::size_t>{});
    int lo = parts[0]->lo(), hi = parts[0]->hi();
    for (const auto& p : parts) {
        lo = std::min(lo, p->lo());
        hi = std::max(hi, p->hi());
    }
    std::vector<std::size_t> dims;
    for (int n = lo; n <= hi; ++n) {
        std::size_t d = 0;
        for (const auto& p : parts)
            d += p->dim(n);
        dims.push_back(d);
    }
    auto offset = [&](std::size_t k, int n) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < k; ++i)
            off += parts[i]->dim(n);
        return off;
    };
    auto mod = std::make_shared<Module>(name, lo, hi, dims);
    for (int n = lo; n <= hi; ++n) {
        std::vector<std::string> labels;
        for (const auto& p : parts)
            for (std::size_t i = 0; i < p->dim(n); ++i)
                labels.push_back(p->basis_label(n, i));
        mod->set_basis_labels(n, std::move(labels));
        for (int j = 0; n + pow2(j) <= hi; ++j) {
            F2Matrix a(dims[n - lo], dims[n + pow2(j) - lo]);
            for (std::size_t k = 0; k < parts.size(); ++k) {
                const F2Matrix g = parts[k]->generator_action(j, n);
                const std::size_t r0 = offset(k, n), c0 = offset(k, n + pow2(j));
                for (std::size_t r = 0; r < g.rows(); ++r)
                    a.row(r0 + r).add_at(c0, g.row(r));
            }
            mod->set_generator_action(j, n, std::move(a));
        }
    }
    std::vector<NamedElement> gens;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        for (const auto& g : parts[k]->generators()) {
            F2Vector v(mod->dim(g.degree));
            v.add_at(offset(k, g.degree), g.vector);
            gens.push_back({g.name, g.degree, v});
        }
    }
    mod->set_generators(std::move(gens));
    return mod;
}

ModulePtr tensor(const Module& a, const Module& b, int cap, std::string name)
{
    const int lo = a.lo() + b.lo();
    const int hi = std::min(cap, a.hi() + b.hi());
    // Degree n: blocks by the degree p of the left factor, ascending.
    auto block = [&](int n, int p) {
        std::size_t off = 0;
        for (int r = a.lo(); r < p; ++r)
            off += a.dim(r) * b.dim(n - r);
        return off;
    };
    std::vector<std::size_t> dims;
    for (int n = lo; n <= hi; ++n)
        dims.push_back(block(n, a.hi() + 1));
    auto mod = std::make_shared<Module>(name, lo, hi, dims);
    for (int n = lo; n <= hi; ++n) {
        std::vector<std::string> labels;
        for (int p = a.lo(); p <= a.hi(); ++p)
            for (std::size_t i = 0; i < a.dim(p); ++i)
                for (std::size_t k = 0; k < b.dim(n - p); ++k)
                    labels.push_back(a.basis_label(p, i) + " ⊗ " + b.basis_label(n - p, k));
        mod->set_basis_labels(n, std::move(labels));
        for (int j = 0; n + pow2(j) <= hi; ++j) {
            const int e = pow2(j), m = n + e;
            F2Matrix act(dims[n - lo], dims[m - lo]);
            for (int p = a.lo(); p <= a.hi(); ++p) {
                const int q = n - p;
                if (a.dim(p) == 0 || b.dim(q) == 0)
                    continue;
                const std::size_t src = block(n, p);
                for (int c = 0; c <= e; ++c) {
                    const int p2 = p + c, q2 = q + e - c;
                    if (a.dim(p2) == 0 || b.dim(q2) == 0)
                        continue;
                    const F2Matrix& ax = a.action(MilnorMonomial::sq(c), p);
                    const F2Matrix& by = b.action(MilnorMonomial::sq(e - c), q);
                    const std::size_t dst = block(m, p2), bw = b.dim(q2);
                    for (std::size_t i = 0; i < a.dim(p); ++i) {
                        if (ax.row(i).is_zero())
                            continue;
                        for (std::size_t k = 0; k < b.dim(q); ++k) {
                            const F2Vector& yk = by.row(k);
                            if (yk.is_zero())
                                continue;
                            F2Vector& out = act.row(src + i * b.dim(q) + k);
                            ax.row(i).for_each_set([&](std::size_t i2) { out.add_at(dst + i2 * bw, yk); });
                        }
                    }
                }
            }
            mod->set_generator_action(j, n, std::move(act));
        }
    }
    return mod;
}

ModulePtr suspend(const Module& m, int shift, std::string name)
{
    std::vector<std::size_t> dims;
    for (int n = m.lo(); n <= m.hi(); ++n)
        dims.push_back(m.dim(n));
    auto mod = std::make_shared<Module>(name.empty() ? fmt::format("Σ^{}{}", shift, m.name()) : name,
                                        m.lo() + shift, m.hi() + shift, dims);
    for (int n = m.lo(); n <= m.hi(); ++n) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < m.dim(n); ++i)
            labels.push_back(m.basis_label(n, i));
        mod->set_basis_labels(n + shift, std::move(labels));
        for (int j = 0; n + pow2(j) <= m.hi(); ++j)
            mod->set_generator_action(j, n + shift, m.generator_action(j, n));
    }
    std::vector<NamedElement> gens;
    for (const auto& g : m.generators())
        gens.push_back({g.name, g.degree + shift, g.vector});
    mod->set_generators(std::move(gens));
    return mod;
}

ModulePtr truncate(const Module& m, int lo, int hi, std::string name)
{
    lo = std::max(lo, m.lo());
    hi = std::min(hi, m.hi());
    std::vector<std::size_t> dims;
    for (int n = lo; n <= hi; ++n)
        dims.push_back(m.dim(n));
    auto mod = std::make_shared<Module>(name.empty() ? m.name() : name, lo, hi, dims);
    for (int n = lo; n <= hi; ++n) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < m.dim(n); ++i)
            labels.push_back(m.basis_label(n, i));
        mod->set_basis_labels(n, std::move(labels));
        for (int j = 0; n + pow2(j) <= hi; ++j)
            mod->set_generator_action(j, n, m.generator_action(j, n));
    }
    if (lo > m.lo()) {
        mod->set_generators(compute_generators(*mod));
    }
    else {
        std::vector<NamedElement> gens;
        for (const auto& g : m.generators())
            if (g.degree <= hi)
                gens.push_back(g);
        mod->set_generators(std::move(gens));
    }
    return mod;
}

ModulePtr double_module(const Module& m, std::string name)
{
    const int lo = 2 * m.lo(), hi = 2 * m.hi();
    std::vector<std::size_t> dims;
    for (int n = lo; n <= hi; ++n)
        dims.push_back(n % 2 ? 0 : m.dim(n / 2));
    auto mod = std::make_shared<Module>(name.empty() ? "Φ" + m.name() : name, lo, hi, dims);
    for (int n = m.lo(); n <= m.hi(); ++n) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < m.dim(n); ++i)
            labels.push_back("Φ(" + m.basis_label(n, i) + ")");
        mod->set_basis_labels(2 * n, std::move(labels));
        for (int j = 1; 2 * n + pow2(j) <= hi; ++j)
            mod->set_generator_action(j, 2 * n, m.generator_action(j - 1, n));
    }
    std::vector<NamedElement> gens;
    for (const auto& g : m.generators())
        gens.push_back({g.name, 2 * g.degree, g.vector});
    mod->set_generators(std::move(gens));
    return mod;
}

}  // namespace extsq
