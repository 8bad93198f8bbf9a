#include "extsq/sq.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "extsq/syntax.hpp"

namespace extsq {

// ---------------------------------------------------------------------------
// TensorSquare

TensorSquare::TensorSquare(const ExactExtension& e, int cap) : e_(e), cap_(cap) {}

std::size_t TensorSquare::mdim(int a, int p) const
{
    if (a < 0 || a > e_.s || p > cap_)
        return 0;
    return e_.node(a)->dim(p);
}

const TensorSquare::Layout& TensorSquare::layout(int n, int u) const
{
    std::lock_guard lock(mutex_);
    auto& slot = layouts_[{n, u}];
    if (slot)
        return *slot;
    auto l = std::make_unique<Layout>();
    for (int a = std::max(0, n - e_.s); a <= std::min(n, e_.s); ++a) {
        const int b = n - a;
        const Module& ma = *e_.node(a);
        Block blk{a, b, l->total, {}, 0};
        for (int p = ma.lo(); p <= ma.hi(); ++p) {
            blk.sub.push_back(l->total + blk.size);
            blk.size += mdim(a, p) * mdim(b, u - p);
        }
        l->total += blk.size;
        l->blocks.push_back(std::move(blk));
    }
    slot = std::move(l);
    return *slot;
}

const TensorSquare::Block* TensorSquare::find_block(const Layout& l, int a) const
{
    for (const auto& b : l.blocks)
        if (b.a == a)
            return &b;
    return nullptr;
}

std::size_t TensorSquare::dim(int n, int u) const
{
    if (n < 0 || n > top() || u > cap_)
        return 0;
    return layout(n, u).total;
}

F2Vector TensorSquare::act(int n, int u, const MilnorMonomial& m, const F2Vector& v) const
{
    const int d = m.degree();
    F2Vector out(dim(n, u + d));
    if (out.size() == 0 || v.is_zero())
        return out;
    const Layout& src = layout(n, u);
    const Layout& dst = layout(n, u + d);
    const auto cop = coproduct(m);
    for (const auto& blk : src.blocks) {
        const Module& ma = *e_.node(blk.a);
        const Module& mb = *e_.node(blk.b);
        const Block* out_blk = find_block(dst, blk.a);
        for (int p = ma.lo(); p <= ma.hi(); ++p) {
            const int q = u - p;
            const std::size_t da = mdim(blk.a, p), db = mdim(blk.b, q);
            if (da == 0 || db == 0)
                continue;
            const std::size_t base = blk.sub[p - ma.lo()];
            for (std::size_t c = v.next_set(base); c < base + da * db; c = v.next_set(c + 1)) {
                const std::size_t i = (c - base) / db, k = (c - base) % db;
                for (const auto& [l, r] : cop) {
                    const int p2 = p + l.degree(), q2 = q + r.degree();
                    const std::size_t db2 = mdim(blk.b, q2);
                    if (mdim(blk.a, p2) == 0 || db2 == 0)
                        continue;
                    const F2Vector& xr = ma.action(l, p).row(i);
                    if (xr.is_zero())
                        continue;
                    const F2Vector& yr = mb.action(r, q).row(k);
                    if (yr.is_zero())
                        continue;
                    const std::size_t o = out_blk->sub[p2 - ma.lo()];
                    xr.for_each_set([&](std::size_t i2) { out.add_at(o + i2 * db2, yr); });
                }
            }
        }
    }
    return out;
}

F2Vector TensorSquare::act(int n, int u, const AlgebraElement& a, const F2Vector& v) const
{
    F2Vector out(dim(n, u + a.degree()));
    for (const auto& m : a.terms())
        out ^= act(n, u, m, v);
    return out;
}

const F2Matrix& TensorSquare::boundary(int n, int u) const
{
    {
        std::lock_guard lock(mutex_);
        if (auto it = boundaries_.find({n, u}); it != boundaries_.end())
            return *it->second;
    }
    const std::size_t rows = dim(n, u), cols = dim(n - 1, u);
    auto m = std::make_unique<F2Matrix>(rows, cols);
    if (rows > 0 && cols > 0) {
        const Layout& src = layout(n, u);
        const Layout& dst = layout(n - 1, u);
        for (const auto& blk : src.blocks) {
            const Module& ma = *e_.node(blk.a);
            const Block* left = blk.a >= 1 ? find_block(dst, blk.a - 1) : nullptr;
            const Block* right = blk.b >= 1 ? find_block(dst, blk.a) : nullptr;
            for (int p = ma.lo(); p <= ma.hi(); ++p) {
                const int q = u - p;
                const std::size_t da = mdim(blk.a, p), db = mdim(blk.b, q);
                if (da == 0 || db == 0)
                    continue;
                const std::size_t base = blk.sub[p - ma.lo()];
                // (d x) (x) y lands in block (a - 1, b), left degree p.
                const std::size_t dl = mdim(blk.a - 1, p);
                const F2Matrix* dx = left && dl > 0 ? &e_.maps[blk.a].matrix(p) : nullptr;
                const std::size_t lo_left = left ? e_.node(blk.a - 1)->lo() : 0;
                // x (x) (d y) lands in block (a, b - 1).
                const std::size_t dr = mdim(blk.b - 1, q);
                const F2Matrix* dy = right && dr > 0 ? &e_.maps[blk.b].matrix(q) : nullptr;
                for (std::size_t i = 0; i < da; ++i) {
                    for (std::size_t k = 0; k < db; ++k) {
                        F2Vector& row = m->row(base + i * db + k);
                        if (dx) {
                            const std::size_t o = left->sub[p - static_cast<int>(lo_left)];
                            dx->row(i).for_each_set([&](std::size_t i2) { row.flip(o + i2 * db + k); });
                        }
                        if (dy) {
                            const std::size_t o = right->sub[p - ma.lo()];
                            dy->row(k).for_each_set([&](std::size_t k2) { row.flip(o + i * dr + k2); });
                        }
                    }
                }
            }
        }
    }
    std::lock_guard lock(mutex_);
    auto [it, inserted] = boundaries_.try_emplace({n, u}, nullptr);
    if (inserted)
        it->second = std::move(m);
    return *it->second;
}

F2Vector TensorSquare::swap(int n, int u, const F2Vector& v) const
{
    F2Vector out(v.size());
    const Layout& l = layout(n, u);
    for (const auto& blk : l.blocks) {
        const Module& ma = *e_.node(blk.a);
        const Module& mb = *e_.node(blk.b);
        const Block* mirror = find_block(l, blk.b);
        for (int p = ma.lo(); p <= ma.hi(); ++p) {
            const int q = u - p;
            const std::size_t da = mdim(blk.a, p), db = mdim(blk.b, q);
            if (da == 0 || db == 0)
                continue;
            const std::size_t base = blk.sub[p - ma.lo()];
            const std::size_t o = mirror->sub[q - mb.lo()];
            for (std::size_t c = v.next_set(base); c < base + da * db; c = v.next_set(c + 1)) {
                const std::size_t i = (c - base) / db, k = (c - base) % db;
                out.set(o + k * da + i);
            }
        }
    }
    return out;
}

bool TensorSquare::augment(const F2Vector& v) const
{
    const std::size_t d0 = mdim(0, 0);
    if (d0 == 0)
        return false;
    const F2Matrix& eps = e_.maps[0].matrix(0);
    const std::size_t base = layout(0, 0).blocks.front().sub[0 - e_.node(0)->lo()];
    bool out = false;
    for (std::size_t c = v.next_set(base); c < base + d0 * d0; c = v.next_set(c + 1)) {
        const std::size_t i = (c - base) / d0, k = (c - base) % d0;
        out ^= eps.get(i, 0) && eps.get(k, 0);
    }
    return out;
}

F2Vector TensorSquare::pure(int a, int p, const F2Vector& x, int b, int q, const F2Vector& y) const
{
    const int n = a + b, u = p + q;
    F2Vector out(dim(n, u));
    const std::size_t db = mdim(b, q);
    if (out.size() == 0 || mdim(a, p) == 0 || db == 0)
        return out;
    const Block* blk = find_block(layout(n, u), a);
    const std::size_t o = blk->sub[p - e_.node(a)->lo()];
    x.for_each_set([&](std::size_t i) { out.add_at(o + i * db, y); });
    return out;
}

bool TensorSquare::top_coefficient(const F2Vector& v) const
{
    const int s = e_.s, t = e_.t;
    if (2 * t > cap_ || v.size() != dim(2 * s, 2 * t))
        return false;
    const Block* blk = find_block(layout(2 * s, 2 * t), s);
    return v.get(blk->sub[t - e_.node(s)->lo()]);
}

std::string TensorSquare::format(int n, int u, const F2Vector& v) const
{
    if (v.is_zero())
        return "0";
    std::string out;
    for (const auto& blk : layout(n, u).blocks) {
        const Module& ma = *e_.node(blk.a);
        const Module& mb = *e_.node(blk.b);
        for (int p = ma.lo(); p <= ma.hi(); ++p) {
            const int q = u - p;
            const std::size_t da = mdim(blk.a, p), db = mdim(blk.b, q);
            if (da == 0 || db == 0)
                continue;
            const std::size_t base = blk.sub[p - ma.lo()];
            for (std::size_t c = v.next_set(base); c < base + da * db; c = v.next_set(c + 1)) {
                const std::size_t i = (c - base) / db, k = (c - base) % db;
                if (!out.empty())
                    out += " + ";
                out += ma.basis_label(p, i) + " ⊗ " + mb.basis_label(q, k);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lifting

namespace {

int lift_top_degree(const TensorSquare& sq) { return std::min(sq.cap(), 2 * sq.extension().t); }

// Right-hand side of the square for Δ_i(σ_g), in T_{σ+i-1}.
F2Vector lift_rhs(const FreeResolution& r, const TensorSquare& sq, const EquivariantLift& lift, int i, int sigma, int g)
{
    const int n = sigma + i, u = r.generator_degree(sigma, g);
    F2Vector rhs(sq.dim(n - 1, u));
    if (sigma >= 1) {
        for (const auto& term : r.differential(sigma, g)) {
            const F2Vector& v = lift.at(i, sigma - 1, term.gen);
            rhs ^= sq.act(n - 1, r.generator_degree(sigma - 1, term.gen), term.coef, v);
        }
    }
    if (i >= 1) {
        const F2Vector& w = lift.at(i - 1, sigma, g);
        rhs ^= w;
        rhs ^= sq.swap(n - 1, u, w);
    }
    return rhs;
}

F2Matrix augmentation_matrix(const TensorSquare& sq)
{
    const std::size_t d = sq.dim(0, 0);
    F2Matrix m(d, 1);
    for (std::size_t c = 0; c < d; ++c)
        m.set(c, 0, sq.augment(F2Vector::unit(d, c)));
    return m;
}

template <typename F>
void parallel_for(std::size_t count, int threads, F&& f)
{
    if (threads <= 1 || count < 2) {
        for (std::size_t k = 0; k < count; ++k)
            f(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < count;) {
                try {
                    f(k);
                }
                catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace

EquivariantLift empty_lift(const FreeResolution& r, const TensorSquare& sq)
{
    const ExactExtension& e = sq.extension();
    const int top = lift_top_degree(sq);
    EquivariantLift lift;
    lift.s = e.s;
    lift.t = e.t;
    for (int sigma = 0; sigma <= 2 * e.s; ++sigma)
        if (!r.covers(sigma, top))
            throw std::out_of_range(fmt::format("Sq: resolution does not reach ({}, {})", sigma, top));
    for (int i = 0; i <= e.s; ++i) {
        std::vector<std::vector<F2Vector>> layer;
        for (int sigma = 0; sigma + i <= 2 * e.s; ++sigma) {
            std::vector<F2Vector> row(r.generator_count(sigma));
            for (std::size_t g = 0; g < row.size(); ++g) {
                const int u = r.generator_degree(sigma, static_cast<int>(g));
                if (u <= top)
                    row[g] = F2Vector(sq.dim(sigma + i, u));
            }
            layer.push_back(std::move(row));
        }
        lift.delta.push_back(std::move(layer));
    }
    return lift;
}

EquivariantLift build_lift(const FreeResolution& r, const TensorSquare& sq, SqOptions opts)
{
    EquivariantLift lift = empty_lift(r, sq);
    const int top = lift_top_degree(sq);
    const F2Matrix aug = augmentation_matrix(sq);
    for (int i = 0; i < static_cast<int>(lift.delta.size()); ++i) {
        for (int sigma = 0; sigma < static_cast<int>(lift.delta[i].size()); ++sigma) {
            const int n = sigma + i;
            std::vector<int> todo;
            std::map<int, std::unique_ptr<LinearSolver>> solvers;
            for (std::size_t g = 0; g < r.generator_count(sigma); ++g) {
                const int u = r.generator_degree(sigma, static_cast<int>(g));
                if (u > top)
                    continue;
                todo.push_back(static_cast<int>(g));
                if (!solvers.count(u))
                    solvers[u] = std::make_unique<LinearSolver>(n == 0 ? aug : sq.boundary(n, u));
            }
            parallel_for(todo.size(), opts.threads, [&](std::size_t k) {
                const int g = todo[k];
                const int u = r.generator_degree(sigma, g);
                F2Vector rhs;
                if (n == 0) {
                    rhs = F2Vector(1);
                    rhs.assign(0, u == 0 && r.differential_vector(0, g).get(0));
                }
                else {
                    rhs = lift_rhs(r, sq, lift, i, sigma, g);
                }
                const LinearSolver& solver = *solvers.at(u);
                auto x = solver.solve(rhs);
                if (!x)
                    throw std::logic_error(
                        fmt::format("Sq: no solution for Δ_{}({}_{}); the extension is not exact", i, sigma, g));
                if (opts.seed != 0) {
                    std::mt19937_64 rng(opts.seed ^ (std::uint64_t(i) << 48) ^ (std::uint64_t(sigma) << 32) ^
                                        std::uint64_t(g));
                    for (const auto& kv : solver.left_kernel())
                        if (rng() & 1)
                            *x ^= kv;
                }
                lift.delta[i][sigma][g] = std::move(*x);
            });
        }
    }
    return lift;
}

std::vector<std::string> check_lift(const FreeResolution& r, const TensorSquare& sq, const EquivariantLift& lift)
{
    return check_lift(r, sq, lift, {});
}

std::vector<std::string> check_lift(const FreeResolution& r, const TensorSquare& sq, const EquivariantLift& lift,
                                    const std::vector<int>& max_degree)
{
    std::vector<std::string> out;
    for (int i = 0; i < static_cast<int>(lift.delta.size()); ++i) {
        for (int sigma = 0; sigma < static_cast<int>(lift.delta[i].size()); ++sigma) {
            const int n = sigma + i;
            for (std::size_t g = 0; g < lift.delta[i][sigma].size(); ++g) {
                const F2Vector& x = lift.delta[i][sigma][g];
                const int u = r.generator_degree(sigma, static_cast<int>(g));
                if (u > lift_top_degree(sq) || (sigma < static_cast<int>(max_degree.size()) && u > max_degree[sigma]))
                    continue;
                if (n == 0) {
                    const bool want = u == 0 && r.differential_vector(0, static_cast<int>(g)).get(0);
                    if (sq.augment(x) != want)
                        out.push_back(fmt::format("Δ_0({}_{}): does not cover F2 -> F2 ⊗ F2", sigma, g));
                    continue;
                }
                const F2Vector lhs = sq.boundary(n, u).apply(x);
                const F2Vector rhs = lift_rhs(r, sq, lift, i, sigma, static_cast<int>(g));
                if (lhs != rhs)
                    out.push_back(fmt::format("Δ_{}({}_{}): boundary is {} but the equation needs {}", i, sigma, g,
                                              sq.format(n - 1, u, lhs), sq.format(n - 1, u, rhs)));
            }
        }
    }
    return out;
}

std::string SqResult::to_string() const
{
    std::string out = "(";
    for (int i = static_cast<int>(sq.size()) - 1; i >= 0; --i) {
        out += sq[i].to_string();
        if (i > 0)
            out += ", ";
    }
    return out + ")";
}

SqResult compute_sq(const FreeResolution& r, const TensorSquare& sq, const EquivariantLift& lift)
{
    SqResult res;
    res.s = lift.s;
    res.t = lift.t;
    for (int i = 0; i <= lift.s; ++i) {
        CochainClass c{lift.s + i, 2 * lift.t, {}};
        for (int g : r.generators_in(lift.s + i, 2 * lift.t))
            if (sq.top_coefficient(lift.at(lift.s - i, lift.s + i, g)))
                c.gens.push_back(g);
        res.sq.push_back(std::move(c));
    }
    return res;
}

SqResult compute_sq(const FreeResolution& r, const ExactExtension& e, SqOptions opts)
{
    TensorSquare sq(e, 2 * e.t);
    const EquivariantLift lift = build_lift(r, sq, opts);
    return compute_sq(r, sq, lift);
}

// ---------------------------------------------------------------------------
// Tables

DeltaTable parse_delta_table(const std::string& text, const std::string& name)
{
    DeltaTable t;
    t.name = name;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos)
            line.resize(h);
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::vector<std::string> cols;
        std::istringstream ls(line);
        std::string col;
        while (std::getline(ls, col, '\t'))
            cols.push_back(col);
        if (cols.size() != 3)
            throw ParseError(fmt::format("{}:{}: expected three tab-separated columns", name, lineno));
        const CochainClass c = parse_cochain(cols[0]);
        if (c.gens.size() != 1)
            throw ParseError(fmt::format("{}:{}: bad generator '{}'", name, lineno, cols[0]));
        t.entries.push_back({c.s, c.gens[0], std::stoi(cols[1]), cols[2], lineno});
    }
    return t;
}

DeltaTable load_delta_table(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open table " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_delta_table(ss.str(), path);
}

namespace {

// One side of a tensor term: "Sq4 Sq2 k1" or "(Sq3 Sq1 k1 + k1')".
std::vector<ModuleTerm> parse_tensor_side(TokenStream& ts)
{
    const AlgebraElement coef = ts.parse_algebra_product();
    std::vector<ModuleTerm> out;
    if (ts.accept(Token::Kind::LParen)) {
        for (auto& t : ts.parse_module_sum())
            out.push_back({coef * t.coef, t.gen});
        ts.expect(Token::Kind::RParen, "')'");
        return out;
    }
    if (ts.peek().kind != Token::Kind::Ident)
        ts.fail("expected a module generator");
    out.push_back({coef, ts.next().text});
    return out;
}

}  // namespace

F2Vector parse_tensor_element(const TensorSquare& sq, const std::string& text, int n, int u)
{
    const ExactExtension& e = sq.extension();
    F2Vector out(sq.dim(n, u));
    std::string cleaned = text;
    if (cleaned.find_first_not_of(" \t") == std::string::npos || cleaned == "0")
        return out;
    TokenStream ts(cleaned);
    while (true) {
        const auto left = parse_tensor_side(ts);
        ts.expect(Token::Kind::Tensor, "'⊗'");
        const auto right = parse_tensor_side(ts);
        for (const auto& l : left) {
            for (const auto& r : right) {
                if (l.coef.is_zero() || r.coef.is_zero())
                    continue;
                const int a = e.node_of(l.gen), b = e.node_of(r.gen);
                if (a < 0 || b < 0)
                    throw ParseError(fmt::format("unknown generator in '{}'", text));
                const Module& ma = *e.node(a);
                const Module& mb = *e.node(b);
                const NamedElement& gl = *ma.find_generator(l.gen);
                const NamedElement& gr = *mb.find_generator(r.gen);
                const int p = gl.degree + l.coef.degree(), q = gr.degree + r.coef.degree();
                if (a + b != n || p + q != u)
                    throw ParseError(fmt::format("term {} ⊗ {} in '{}' is in bidegree ({}, {}), expected ({}, {})",
                                                 l.gen, r.gen, text, a + b, p + q, n, u));
                out ^= sq.pure(a, p, ma.act(l.coef, gl.degree, gl.vector), b, q, mb.act(r.coef, gr.degree, gr.vector));
            }
        }
        if (!ts.accept(Token::Kind::Plus))
            break;
    }
    if (!ts.at_end())
        ts.fail("trailing input");
    return out;
}

TableReport verify_table(const FreeResolution& r, const ExactExtension& e, const DeltaTable& table)
{
    TableReport rep;
    TensorSquare sq(e, 2 * e.t);
    EquivariantLift lift = empty_lift(r, sq);
    for (const auto& en : table.entries) {
        if (en.i < 0 || en.i >= static_cast<int>(lift.delta.size()) ||
            en.s >= static_cast<int>(lift.delta[en.i].size()) ||
            en.g >= static_cast<int>(lift.delta[en.i][en.s].size()))
            throw ParseError(fmt::format("{}:{}: Δ_{}({}_{}) is outside the lift", table.name, en.line, en.i, en.s, en.g));
        const int u = r.generator_degree(en.s, en.g);
        try {
            lift.delta[en.i][en.s][en.g] ^= parse_tensor_element(sq, en.text, en.s + en.i, u);
        }
        catch (const ParseError& ex) {
            throw ParseError(fmt::format("{}:{}: {}", table.name, en.line, ex.what()));
        }
    }
    std::vector<int> range(r.s_count(), -1);
    for (const auto& en : table.entries)
        range[en.s] = std::max(range[en.s], r.generator_degree(en.s, en.g));
    for (const auto& layer : lift.delta) {
        for (int sigma = 0; sigma < static_cast<int>(layer.size()); ++sigma) {
            for (std::size_t g = 0; g < layer[sigma].size(); ++g) {
                const int u = r.generator_degree(sigma, static_cast<int>(g));
                if (u > 2 * e.t)
                    continue;
                if (u <= range[sigma])
                    ++rep.generators_checked;
                else
                    ++rep.generators_skipped;
            }
        }
    }
    rep.failures = check_lift(r, sq, lift, range);
    return rep;
}

}  // namespace extsq
