#include "extsq/extension.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "extsq/syntax.hpp"

#ifndef EXTSQ_DEFAULT_DATA_DIR
#define EXTSQ_DEFAULT_DATA_DIR "data"
#endif

namespace extsq {
namespace {

const ModulePtr& f2_module()
{
    static const ModulePtr m = ground_field();
    return m;
}

// Σ^t F2 with its generator named `gen`.
ModulePtr top_module(int t, const std::string& gen)
{
    auto m = std::make_shared<Module>(fmt::format("Σ^{}F2", t), t, t, std::vector<std::size_t>{1});
    m->set_generators({{gen, t, F2Vector::unit(1, 0)}});
    m->set_basis_labels(t, {gen});
    return m;
}

}  // namespace

const ModulePtr& ExactExtension::node(int i) const
{
    if (i == -1)
        return f2_module();
    return nodes.at(static_cast<std::size_t>(i));
}

int ExactExtension::node_of(std::string_view generator) const
{
    if (generator == "u")
        return -1;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i]->find_generator(generator))
            return static_cast<int>(i);
    return -2;
}

std::vector<std::string> ExactExtension::boundary_lines() const
{
    std::vector<std::string> out;
    for (int i = 0; i <= s; ++i) {
        for (const auto& g : nodes[i]->generators()) {
            if (g.vector.size() == 0)
                continue;
            const F2Vector img = maps[i].apply(g.degree, g.vector);
            out.push_back(fmt::format("∂({}) = {}", g.name, format_module_element(*node(i - 1), g.degree, img)));
        }
    }
    return out;
}

ExactExtension assemble_extension(std::string name, int t, std::vector<ModulePtr> modules,
                                  const std::vector<std::vector<F2Vector>>& images, int cap, std::string top_name)
{
    ExactExtension e;
    e.name = std::move(name);
    e.s = static_cast<int>(modules.size());
    e.t = t;
    e.cap = cap;
    if (images.size() != modules.size() + 1)
        throw std::invalid_argument("assemble_extension: one image list per node required");
    e.nodes = std::move(modules);
    e.nodes.push_back(top_module(t, top_name.empty() ? fmt::format("k{}", e.s) : top_name));
    for (int i = 0; i <= e.s; ++i)
        e.maps.push_back(ModuleMap::from_generators(e.nodes[i], e.node(i - 1), images[i]));
    return e;
}

ExactnessReport verify_exact(const ExactExtension& e, std::optional<int> max_degree)
{
    ExactnessReport rep;
    const int top = max_degree.value_or(e.cap);
    for (int i = 0; i <= e.s; ++i) {
        if (auto bad = e.maps[i].check_linear())
            rep.failures.push_back(fmt::format("map M{} -> M{}: {}", i, i - 1, *bad));
    }
    int lo = 0;
    for (const auto& m : e.nodes)
        lo = std::min(lo, m->lo());
    for (int n = lo; n <= top; ++n) {
        ++rep.degrees_checked;
        // Node i sits between maps[i] (out) and maps[i + 1] (in).
        for (int i = -1; i <= e.s; ++i) {
            const std::size_t d = e.node(i)->dim(n);
            std::size_t ker = d;
            if (i >= 0 && d > 0)
                ker = d - rank(e.maps[i].matrix(n));
            std::size_t im = 0;
            if (i < e.s && e.node(i + 1)->dim(n) > 0)
                im = rank(e.maps[i + 1].matrix(n));
            if (i >= 0 && i < e.s && e.node(i + 1)->dim(n) > 0 && d > 0) {
                const F2Matrix comp = e.maps[i + 1].matrix(n) * e.maps[i].matrix(n);
                if (!comp.is_zero())
                    rep.failures.push_back(fmt::format("degree {}: composite through M{} is nonzero", n, i));
            }
            if (ker != im) {
                const std::string where = i == -1 ? "F2" : i == e.s ? fmt::format("Σ^{}F2", e.t) : fmt::format("M{}", i);
                rep.failures.push_back(fmt::format("degree {}: not exact at {} (kernel {}, image {})", n, where, ker, im));
            }
        }
    }
    return rep;
}

ExactExtension identity_extension()
{
    return assemble_extension("id", 0, {}, {{F2Vector::unit(1, 0)}}, 0, "k0");
}

ExactExtension splice(const ExactExtension& a, const ExactExtension& b)
{
    if (a.s == 0)
        return b;
    ExactExtension e;
    e.name = fmt::format("{}.{}", a.name, b.name);
    e.s = a.s + b.s;
    e.t = a.t + b.t;
    e.cap = std::min(a.cap, b.cap + a.t);
    for (int i = 0; i < a.s; ++i) {
        e.nodes.push_back(a.nodes[i]);
        e.maps.push_back(a.maps[i]);
    }
    // b's generators are primed so names stay unique.
    for (const auto& m : b.nodes) {
        auto shifted = std::const_pointer_cast<Module>(suspend(*m, a.t, m->name() + "'"));
        auto gens = shifted->generators();
        for (auto& g : gens)
            g.name += "'";
        shifted->set_generators(std::move(gens));
        e.nodes.push_back(shifted);
    }
    // Σ^{t_a} B_0 -> A_{s_a - 1} is b's augmentation followed by the
    // inclusion of the top of a.
    const ModulePtr& b0 = e.nodes[a.s];
    const ModulePtr& last = a.nodes[a.s - 1];
    ModuleMap join(b0, last);
    const F2Vector img = a.maps[a.s].apply(a.t, a.top().vector);
    for (int n = b0->lo(); n <= b0->hi(); ++n) {
        F2Matrix m(b0->dim(n), last->dim(n));
        if (n == a.t) {
            const F2Matrix& eb = b.maps[0].matrix(0);
            for (std::size_t r = 0; r < eb.rows(); ++r)
                if (eb.get(r, 0))
                    m.row(r) = img;
        }
        join.set_matrix(n, std::move(m));
    }
    e.maps.push_back(std::move(join));
    for (int i = 1; i <= b.s; ++i) {
        ModuleMap g(e.nodes[a.s + i], e.nodes[a.s + i - 1]);
        const auto& f = b.maps[i];
        for (int n = f.source()->lo(); n <= f.source()->hi(); ++n)
            g.set_matrix(n + a.t, f.matrix(n));
        e.maps.push_back(std::move(g));
    }
    return e;
}

ExactExtension double_extension(const ExactExtension& e, std::string name)
{
    ExactExtension d;
    d.name = name.empty() ? "Φ" + e.name : std::move(name);
    d.s = e.s;
    d.t = 2 * e.t;
    d.cap = 2 * e.cap;
    for (const auto& m : e.nodes)
        d.nodes.push_back(double_module(*m, m->name()));
    for (int i = 0; i <= e.s; ++i) {
        ModuleMap g(d.nodes[i], d.node(i - 1));
        const auto& f = e.maps[i];
        for (int n = f.source()->lo(); n <= f.source()->hi(); ++n)
            g.set_matrix(2 * n, f.matrix(n));
        d.maps.push_back(std::move(g));
    }
    return d;
}

ExactExtension canonical_extension(const FreeResolution& r, int s, int t, const std::vector<int>& cocycle)
{
    if (s < 1)
        throw std::invalid_argument("canonical_extension: s must be at least 1");
    const int cap = 2 * t;
    if (!r.covers(s, cap) || !r.covers(s - 1, cap))
        throw std::out_of_range(fmt::format("canonical_extension: resolution does not reach ({}, {})", s, cap));
    for (int g : cocycle)
        if (r.generator_degree(s, g) != t)
            throw std::invalid_argument(fmt::format("canonical_extension: {}_{} is not in degree {}", s, g, t));

    auto gen_name = [](int i, int g) { return fmt::format("x{}_{}", i, g); };
    auto free_part = [&](int i) {
        std::vector<Presentation::Generator> gens;
        for (std::size_t g = 0; g < r.generator_count(i); ++g)
            if (r.generator_degree(i, static_cast<int>(g)) <= cap)
                gens.push_back({gen_name(i, static_cast<int>(g)), r.generator_degree(i, static_cast<int>(g))});
        return free_module(fmt::format("C{}", i), gens, cap);
    };
    // Image of d(i_g) in a module whose generators include x{i-1}_h.
    auto image_in = [&](const Module& m, int i, int g) {
        const int deg = r.generator_degree(i, g);
        F2Vector v(m.dim(deg));
        if (i == 0)
            return r.differential_vector(0, g);
        for (const auto& term : r.differential(i, g)) {
            const NamedElement* h = m.find_generator(gen_name(i - 1, term.gen));
            v ^= m.act(term.coef, h->degree, h->vector);
        }
        return v;
    };

    std::vector<ModulePtr> modules;
    for (int i = 0; i + 1 < s; ++i)
        modules.push_back(free_part(i));

    // P = (C_{s-1} + Σ^t F2) / (d c + x(c) k).
    const std::string top = fmt::format("k{}", s);
    ModulePtr sum = direct_sum({free_part(s - 1), top_module(t, top)}, "P");
    std::vector<NamedElement> rels;
    for (std::size_t g = 0; g < r.generator_count(s); ++g) {
        const int deg = r.generator_degree(s, static_cast<int>(g));
        if (deg > cap)
            continue;
        F2Vector v = image_in(*sum, s, static_cast<int>(g));
        if (deg == t && std::find(cocycle.begin(), cocycle.end(), static_cast<int>(g)) != cocycle.end())
            v ^= sum->find_generator(top)->vector;
        rels.push_back({fmt::format("r{}", g), deg, v});
    }
    auto q = quotient(sum, rels, fmt::format("P{}", s - 1));
    modules.push_back(q.module);

    std::vector<std::vector<F2Vector>> images;
    for (int i = 0; i < s; ++i) {
        std::vector<F2Vector> im;
        const ModulePtr& target = i == 0 ? f2_module() : modules[i - 1];
        for (const auto& g : modules[i]->generators()) {
            if (g.name == top) {
                im.push_back(F2Vector(target->dim(g.degree)));
                continue;
            }
            const int gi = std::stoi(g.name.substr(g.name.find('_') + 1));
            im.push_back(i == 0 ? r.differential_vector(0, gi) : image_in(*target, i, gi));
        }
        images.push_back(std::move(im));
    }
    images.push_back({q.module->find_generator(top)->vector});
    std::string name = fmt::format("canonical({}", s);
    for (int g : cocycle)
        name += fmt::format(" {}_{}", s, g);
    return assemble_extension(name + ")", t, std::move(modules), images, cap, top);
}

ExactExtension load_extension(const std::string& path, std::optional<int> cap)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open extension file " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    std::string name;
    int s = -1, t = -1;
    struct NodeSpec {
        std::string file;
        std::optional<std::pair<int, int>> trunc;
    };
    std::vector<NodeSpec> node_specs;
    std::vector<std::pair<std::string, std::string>> map_lines, chain_lines;
    std::string doubled;

    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos)
            line.resize(h);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw))
            continue;
        auto arrow = [&](std::vector<std::pair<std::string, std::string>>& out) {
            std::string lhs, sep, rest;
            if (!(ls >> lhs >> sep) || sep != "->")
                throw ParseError(fmt::format("{}:{}: expected '{} <name> -> <element>'", path, lineno, kw));
            std::getline(ls, rest);
            out.emplace_back(lhs, rest);
        };
        if (kw == "extension")
            ls >> name;
        else if (kw == "bidegree") {
            if (!(ls >> s >> t))
                throw ParseError(fmt::format("{}:{}: expected 'bidegree <s> <t>'", path, lineno));
        }
        else if (kw == "node") {
            NodeSpec n;
            std::string tr;
            ls >> n.file;
            if (ls >> tr) {
                int lo, hi;
                if (tr != "truncate" || !(ls >> lo >> hi))
                    throw ParseError(fmt::format("{}:{}: expected 'node <file> [truncate <lo> <hi>]'", path, lineno));
                n.trunc = std::make_pair(lo, hi);
            }
            node_specs.push_back(n);
        }
        else if (kw == "map")
            arrow(map_lines);
        else if (kw == "chain")
            arrow(chain_lines);
        else if (kw == "double")
            ls >> doubled;
        else
            throw ParseError(fmt::format("{}:{}: unknown directive '{}'", path, lineno, kw));
    }

    if (!doubled.empty()) {
        std::optional<int> inner_cap;
        if (cap)
            inner_cap = *cap / 2;
        ExactExtension e = double_extension(load_extension((base / doubled).string(), inner_cap), name);
        e.published_chain = chain_lines;
        if (s >= 0 && (s != e.s || t != e.t))
            throw ParseError(fmt::format("{}: bidegree ({}, {}) does not match the doubled extension ({}, {})", path,
                                         s, t, e.s, e.t));
        return e;
    }
    if (s < 0 || t < 0)
        throw ParseError(path + ": missing bidegree");
    if (static_cast<int>(node_specs.size()) != s)
        throw ParseError(fmt::format("{}: {} nodes listed for s = {}", path, node_specs.size(), s));

    const int c = cap.value_or(2 * t);
    std::vector<ModulePtr> modules;
    for (const auto& n : node_specs) {
        Presentation p = load_presentation((base / n.file).string());
        ModulePtr m = compile(p, c);
        if (n.trunc)
            m = truncate(*m, n.trunc->first, n.trunc->second, m->name());
        modules.push_back(m);
    }
    const std::string top = fmt::format("k{}", s);
    std::vector<std::vector<F2Vector>> images(s + 1);
    std::vector<ModulePtr> all = modules;
    all.push_back(top_module(t, top));
    auto node_of = [&](const std::string& g) {
        for (std::size_t i = 0; i < all.size(); ++i)
            if (all[i]->find_generator(g))
                return static_cast<int>(i);
        return -2;
    };
    std::vector<std::map<std::string, std::string>> given(s + 1);
    for (const auto& [g, img] : map_lines) {
        const int i = node_of(g);
        if (i < 0)
            throw ParseError(fmt::format("{}: map for unknown generator '{}'", path, g));
        if (!given[i].emplace(g, img).second)
            throw ParseError(fmt::format("{}: two maps for '{}'", path, g));
    }
    for (int i = 0; i <= s; ++i) {
        const ModulePtr target = i == 0 ? f2_module() : all[i - 1];
        for (const auto& g : all[i]->generators()) {
            auto it = given[i].find(g.name);
            if (it == given[i].end()) {
                images[i].push_back(F2Vector(target->dim(g.degree)));
                continue;
            }
            images[i].push_back(parse_module_element(*target, it->second, g.degree).vector);
        }
    }
    ExactExtension e = assemble_extension(name, t, std::move(modules), images, c, top);
    e.published_chain = chain_lines;
    return e;
}

std::string data_dir()
{
    if (const char* d = std::getenv("EXTSQ_DATA_DIR"); d && *d)
        return d;
    return EXTSQ_DEFAULT_DATA_DIR;
}

std::vector<std::string> library_names()
{
    return {"h0", "h1", "h2", "h3", "h4", "h5", "h6", "c0", "c1", "f0", "e0", "d0"};
}

std::string library_path(std::string_view name)
{
    return fmt::format("{}/extensions/{}.ext", data_dir(), name);
}

ExactExtension library(std::string_view name)
{
    const auto names = library_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw std::invalid_argument(fmt::format("unknown library extension '{}'", name));
    return load_extension(library_path(name));
}

}  // namespace extsq
