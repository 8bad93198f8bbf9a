#include "extsq/resolution.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "extsq/syntax.hpp"

namespace extsq {
namespace {

F2Vector reversed(const F2Vector& v)
{
    F2Vector out(v.size());
    v.for_each_set([&](std::size_t i) { out.set(v.size() - 1 - i); });
    return out;
}

std::string gen_name(int s, int g) { return fmt::format("{}_{}", s, g); }

}  // namespace

FreeResolution::FreeResolution(ModulePtr m, ResolverOptions opts) : module_(std::move(m)), opts_(opts) {}

int FreeResolution::frontier(int s) const
{
    if (s < 0 || s >= s_count())
        return module_->lo() - 1;
    return done_[s];
}

std::size_t FreeResolution::generator_count(int s) const
{
    return s >= 0 && s < static_cast<int>(gens_.size()) ? gens_[s].size() : 0;
}

int FreeResolution::generator_degree(int s, int g) const { return gens_.at(s).at(g).degree; }

std::vector<int> FreeResolution::generators_in(int s, int t) const
{
    std::vector<int> out;
    for (std::size_t g = 0; g < generator_count(s); ++g)
        if (gens_[s][g].degree == t)
            out.push_back(static_cast<int>(g));
    return out;
}

std::map<std::pair<int, int>, int> FreeResolution::ext_dimensions() const
{
    std::map<std::pair<int, int>, int> out;
    for (int s = 0; s < static_cast<int>(gens_.size()); ++s)
        for (const auto& g : gens_[s])
            ++out[{s, g.degree}];
    return out;
}

std::size_t FreeResolution::dim(int s, int t) const
{
    if (s < 0)
        return module_->dim(t);
    std::size_t d = 0;
    for (std::size_t g = 0; g < generator_count(s); ++g)
        if (gens_[s][g].degree <= t)
            d += milnor_dimension(t - gens_[s][g].degree);
    return d;
}

std::size_t FreeResolution::offset(int s, int t, int g) const
{
    std::size_t d = 0;
    for (int h = 0; h < g; ++h)
        if (gens_[s][h].degree <= t)
            d += milnor_dimension(t - gens_[s][h].degree);
    return d;
}

std::pair<int, MilnorMonomial> FreeResolution::decode(int s, int t, std::size_t c) const
{
    for (std::size_t g = 0; g < generator_count(s); ++g) {
        const int dg = gens_[s][g].degree;
        if (dg > t)
            continue;
        const std::size_t n = milnor_dimension(t - dg);
        if (c < n)
            return {static_cast<int>(g), milnor_basis(t - dg)[c]};
        c -= n;
    }
    throw std::out_of_range(fmt::format("coordinate outside C_{} in degree {}", s, t));
}

F2Vector FreeResolution::encode(int s, int t, const std::vector<FreeTerm>& terms) const
{
    F2Vector v(dim(s, t));
    for (const auto& term : terms) {
        if (term.coef.is_zero())
            continue;
        if (term.gen < 0 || static_cast<std::size_t>(term.gen) >= generator_count(s))
            throw std::invalid_argument(fmt::format("no generator {}", gen_name(s, term.gen)));
        if (term.coef.degree() + gens_[s][term.gen].degree != t)
            throw std::invalid_argument(fmt::format("term on {} has the wrong degree", gen_name(s, term.gen)));
        v.add_at(offset(s, t, term.gen), term.coef.to_vector());
    }
    return v;
}

std::vector<FreeTerm> FreeResolution::decode_element(int s, int t, const F2Vector& v) const
{
    std::vector<FreeTerm> out;
    std::size_t off = 0;
    for (std::size_t g = 0; g < generator_count(s); ++g) {
        const int dg = gens_[s][g].degree;
        if (dg > t)
            continue;
        const std::size_t n = milnor_dimension(t - dg);
        const F2Vector block = v.slice(off, n);
        if (!block.is_zero())
            out.push_back({AlgebraElement::from_vector(t - dg, block), static_cast<int>(g)});
        off += n;
    }
    return out;
}

const F2Vector& FreeResolution::differential_vector(int s, int g) const { return gens_.at(s).at(g).d; }

std::vector<FreeTerm> FreeResolution::differential(int s, int g) const
{
    if (s == 0)
        throw std::invalid_argument("differential: s = 0 maps into the module");
    return decode_element(s - 1, generator_degree(s, g), differential_vector(s, g));
}

F2Vector FreeResolution::act(int s, int t, const MilnorMonomial& a, const F2Vector& v) const
{
    const int u = t + a.degree();
    F2Vector out(dim(s, u));
    std::size_t off_t = 0, off_u = 0;
    for (std::size_t g = 0; g < generator_count(s); ++g) {
        const int dg = gens_[s][g].degree;
        if (dg > u)
            continue;
        const std::size_t nu = milnor_dimension(u - dg);
        if (dg <= t) {
            const std::size_t nt = milnor_dimension(t - dg);
            const auto& basis = milnor_basis(t - dg);
            for (std::size_t c = v.next_set(off_t); c < off_t + nt; c = v.next_set(c + 1))
                out.add_at(off_u, multiply_vector(a, basis[c - off_t]));
            off_t += nt;
        }
        off_u += nu;
    }
    return out;
}

F2Matrix FreeResolution::d_matrix(int s, int t) const
{
    F2Matrix m(0, dim(s - 1, t));
    for (std::size_t g = 0; g < generator_count(s); ++g) {
        const auto& gen = gens_[s][g];
        if (gen.degree > t)
            continue;
        for (const auto& a : milnor_basis(t - gen.degree)) {
            if (s == 0)
                m.append_row(module_->act(a, gen.degree, gen.d));
            else
                m.append_row(act(s - 1, gen.degree, a, gen.d));
        }
    }
    return m;
}

FreeResolution::CellResult FreeResolution::compute_cell(int s, int t, const F2Matrix* lower) const
{
    // Reads C_s below degree t and C_{s-1} through t; writes nothing.
    //
    // Row reduction runs over the columns of C_{s-1} from the last basis
    // element to the first (highest generator, least monomial first).  The
    // new generators are the reduced kernel rows whose pivots the image
    // misses, taken in basis order of their pivots.  This reproduces the
    // published resolution of F2, including bidegrees with two generators.
    F2Matrix d = d_matrix(s, t);
    const std::size_t n = d.cols();

    EchelonBasis image(n);
    for (const auto& r : d.row_list())
        image.insert(reversed(r));

    EchelonBasis kernel(n);
    if (s == 0) {
        for (std::size_t i = 0; i < n; ++i)
            kernel.insert(F2Vector::unit(n, i));
    }
    else {
        F2Matrix flipped(0, lower->cols());
        for (std::size_t i = n; i-- > 0;)
            flipped.append_row(lower->row(i));
        for (const auto& v : left_kernel_basis(flipped))
            kernel.insert(v);
    }

    std::vector<std::pair<std::size_t, F2Vector>> rows;
    for (std::size_t i = 0; i < kernel.rank(); ++i)
        if (!image.is_pivot(kernel.pivots()[i]))
            rows.emplace_back(kernel.pivots()[i], reversed(kernel.rows()[i]));
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    CellResult out;
    for (auto& row : rows) {
        d.append_row(row.second);
        out.made.push_back({t, std::move(row.second)});
    }
    out.d = std::move(d);
    return out;
}

void FreeResolution::extend(int s_max, int t_max)
{
    if (s_max < 0)
        return;
    if (static_cast<int>(done_.size()) < s_max + 1) {
        done_.resize(s_max + 1, module_->lo() - 1);
        gens_.resize(s_max + 1);
    }
    const int t_lo = module_->lo();
    auto ready = [&](int s, int t) {
        return done_[s] == t - 1 && (s == 0 || done_[s - 1] >= t);
    };
    auto lower_for = [&](int s, int t) -> F2Matrix {
        if (s == 0)
            return {};
        std::lock_guard lock(*mutex_);
        auto it = pending_.find({s - 1, t});
        if (it != pending_.end()) {
            F2Matrix m = std::move(it->second);
            pending_.erase(it);
            return m;
        }
        return {};
    };
    auto run = [&](int s, int t) {
        F2Matrix lower = lower_for(s, t);
        if (s > 0 && lower.rows() == 0 && dim(s - 1, t) > 0)
            lower = d_matrix(s - 1, t);
        return compute_cell(s, t, s > 0 ? &lower : nullptr);
    };
    auto commit = [&](int s, int t, CellResult r) {
        for (auto& g : r.made)
            gens_[s].push_back(std::move(g));
        done_[s] = t;
        if (s < s_max)
            pending_[{s, t}] = std::move(r.d);
    };

    // Cells on one anti-diagonal s + t = k depend only on diagonal k - 1.
    for (int k = t_lo; k <= s_max + t_max; ++k) {
        std::vector<std::pair<int, int>> cells;
        for (int s = 0; s <= s_max; ++s) {
            const int t = k - s;
            if (t < t_lo || t > t_max || done_[s] >= t)
                continue;
            if (!ready(s, t))
                throw std::logic_error(fmt::format("resolution sweep out of order at ({}, {})", s, t));
            cells.emplace_back(s, t);
        }
        std::vector<CellResult> results(cells.size());
        const int threads = std::max(1, opts_.threads);
        if (threads == 1 || cells.size() < 2) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                results[i] = run(cells[i].first, cells[i].second);
        }
        else {
            std::vector<std::thread> pool;
            std::atomic<std::size_t> next{0};
            std::exception_ptr error;
            std::mutex error_mutex;
            for (int w = 0; w < threads; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < cells.size(); i = next++) {
                        try {
                            results[i] = run(cells[i].first, cells[i].second);
                        }
                        catch (...) {
                            std::lock_guard lock(error_mutex);
                            error = std::current_exception();
                        }
                    }
                });
            }
            for (auto& th : pool)
                th.join();
            if (error)
                std::rethrow_exception(error);
        }
        for (std::size_t i = 0; i < cells.size(); ++i)
            commit(cells[i].first, cells[i].second, std::move(results[i]));
    }
    for (auto it = pending_.begin(); it != pending_.end();) {
        if (it->first.first >= s_max)
            it = pending_.erase(it);
        else
            ++it;
    }
}

std::string FreeResolution::format_element(int s, int t, const F2Vector& v) const
{
    if (s < 0)
        return format_module_element(*module_, t, v);
    std::string out;
    for (const auto& term : decode_element(s, t, v)) {
        if (!out.empty())
            out += " + ";
        const auto& terms = term.coef.terms();
        if (terms.size() > 1)
            out += "(" + to_string(term.coef) + ") ";
        else if (!terms[0].is_unit())
            out += to_string(term.coef) + " ";
        out += gen_name(s, term.gen);
    }
    return out.empty() ? "0" : out;
}

std::string FreeResolution::format_differential(int s, int g) const
{
    return format_element(s - 1, generator_degree(s, g), differential_vector(s, g));
}

std::string FreeResolution::format_differential_tex(int s, int g) const
{
    std::string out;
    if (s == 0)
        return fmt::format("d({}) = {}", gen_name(s, g), format_differential(s, g));
    for (const auto& term : differential(s, g)) {
        if (!out.empty())
            out += " + ";
        const auto& terms = term.coef.terms();
        if (terms.size() > 1)
            out += "(" + to_tex(term.coef) + ") ";
        else
            out += to_tex(term.coef) + " ";
        out += gen_name(s - 1, term.gen);
    }
    return fmt::format("d({}) = {}", gen_name(s, g), out.empty() ? "0" : out);
}

std::string FreeResolution::canonical_dump() const
{
    std::string out;
    for (int s = 0; s < static_cast<int>(gens_.size()); ++s)
        for (std::size_t g = 0; g < gens_[s].size(); ++g)
            out += fmt::format("{} {} {} : {}\n", s, g, gens_[s][g].degree, format_differential(s, static_cast<int>(g)));
    return out;
}

std::optional<std::string> FreeResolution::verify() const
{
    for (int s = 0; s < static_cast<int>(gens_.size()); ++s) {
        for (std::size_t g = 0; g < gens_[s].size(); ++g) {
            const auto& gen = gens_[s][g];
            if (gen.d.size() != dim(s - 1, gen.degree))
                return fmt::format("d({}) has the wrong length", gen_name(s, static_cast<int>(g)));
            if (s == 0)
                continue;
            for (const auto& term : differential(s, static_cast<int>(g)))
                if (term.coef.degree() == 0)
                    return fmt::format("d({}) has a unit coefficient", gen_name(s, static_cast<int>(g)));
            F2Vector dd = s == 1 ? F2Vector(module_->dim(gen.degree)) : F2Vector(dim(s - 2, gen.degree));
            for (const auto& term : differential(s, static_cast<int>(g))) {
                const auto& low = gens_[s - 1][term.gen];
                for (const auto& m : term.coef.terms())
                    dd ^= s == 1 ? module_->act(m, low.degree, low.d) : act(s - 2, low.degree, m, low.d);
            }
            if (!dd.is_zero())
                return fmt::format("d(d({})) != 0", gen_name(s, static_cast<int>(g)));
        }
    }
    for (int s = 0; s < static_cast<int>(gens_.size()); ++s) {
        for (int t = module_->lo(); t <= done_[s]; ++t) {
            const std::size_t r = rank(d_matrix(s, t));
            const std::size_t below = s == 0 ? module_->dim(t) : dim(s - 1, t) - rank(d_matrix(s - 1, t));
            if (r != below)
                return fmt::format("not exact at C_{} in degree {}", s - 1, t);
        }
    }
    return std::nullopt;
}

void FreeResolution::adopt_generator(int s, int degree, F2Vector d)
{
    if (s >= static_cast<int>(gens_.size())) {
        gens_.resize(s + 1);
        done_.resize(s + 1, module_->lo() - 1);
    }
    if (!gens_[s].empty() && gens_[s].back().degree > degree)
        throw std::invalid_argument("adopt_generator: degrees must be nondecreasing");
    if (d.size() != dim(s - 1, degree))
        throw std::invalid_argument(fmt::format("adopt_generator: d({}) has the wrong length", gen_name(s, static_cast<int>(gens_[s].size()))));
    gens_[s].push_back({degree, std::move(d)});
}

void FreeResolution::set_frontier(int s, int t)
{
    if (s >= static_cast<int>(gens_.size())) {
        gens_.resize(s + 1);
        done_.resize(s + 1, module_->lo() - 1);
    }
    done_[s] = t;
}

// ---------------------------------------------------------------------------
// Checkpoints: "EXTSQRES", version, then length-prefixed sections
// HEAD (module name, degree range and dimensions, frontier), GENS (one per s:
// generator degree and differential term lists) and SUM (FNV-1a of every
// preceding byte).

namespace {

constexpr char kMagic[8] = {'E', 'X', 'T', 'S', 'Q', 'R', 'E', 'S'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u16(std::uint16_t v) { raw(&v, 2); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void i32(std::int32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void str(const std::string& s)
    {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_ += s;
    }
    void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
    std::string& buffer() { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view b) : b_(b) {}
    template <class T>
    T get()
    {
        need(sizeof(T));
        T v;
        std::memcpy(&v, b_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string str()
    {
        const auto n = get<std::uint32_t>();
        need(n);
        std::string s(b_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    std::string_view take(std::size_t n)
    {
        need(n);
        auto v = b_.substr(pos_, n);
        pos_ += n;
        return v;
    }
    bool at_end() const { return pos_ == b_.size(); }
    std::size_t position() const { return pos_; }

private:
    void need(std::size_t n) const
    {
        if (pos_ + n > b_.size())
            throw std::runtime_error("checkpoint truncated");
    }
    std::string_view b_;
    std::size_t pos_ = 0;
};

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void section(Writer& out, const char tag[4], const std::string& payload)
{
    out.raw(tag, 4);
    out.u64(payload.size());
    out.buffer() += payload;
}

}  // namespace

void FreeResolution::save(const std::string& path) const
{
    Writer out;
    out.raw(kMagic, 8);
    out.u32(kVersion);

    Writer head;
    head.str(module_->name());
    head.i32(module_->lo());
    head.i32(module_->hi());
    for (int n = module_->lo(); n <= module_->hi(); ++n)
        head.u32(static_cast<std::uint32_t>(module_->dim(n)));
    head.u32(static_cast<std::uint32_t>(done_.size()));
    for (int t : done_)
        head.i32(t);
    section(out, "HEAD", head.buffer());

    for (int s = 0; s < static_cast<int>(gens_.size()); ++s) {
        Writer g;
        g.u32(static_cast<std::uint32_t>(s));
        g.u32(static_cast<std::uint32_t>(gens_[s].size()));
        for (std::size_t i = 0; i < gens_[s].size(); ++i) {
            const auto& gen = gens_[s][i];
            g.i32(gen.degree);
            if (s == 0) {
                const auto idx = gen.d.support();
                g.u32(static_cast<std::uint32_t>(idx.size()));
                for (auto c : idx) {
                    g.u8(0);
                    g.u32(static_cast<std::uint32_t>(c));
                }
                continue;
            }
            std::vector<std::pair<MilnorMonomial, int>> terms;
            for (const auto& term : differential(s, static_cast<int>(i)))
                for (const auto& m : term.coef.terms())
                    terms.emplace_back(m, term.gen);
            g.u32(static_cast<std::uint32_t>(terms.size()));
            for (const auto& [m, target] : terms) {
                g.u8(static_cast<std::uint8_t>(m.length()));
                for (std::size_t k = 0; k < m.length(); ++k)
                    g.u16(static_cast<std::uint16_t>(m[k]));
                g.u32(static_cast<std::uint32_t>(target));
            }
        }
        section(out, "GENS", g.buffer());
    }
    const std::uint64_t sum = fnv1a(out.buffer());
    Writer tail;
    tail.u64(sum);
    section(out, "SUM ", tail.buffer());

    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot write " + tmp);
        f.write(out.buffer().data(), static_cast<std::streamsize>(out.buffer().size()));
        if (!f)
            throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

FreeResolution FreeResolution::load(const std::string& path, ModulePtr m)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string bytes = ss.str();

    Reader in(bytes);
    if (in.take(8) != std::string_view(kMagic, 8))
        throw std::runtime_error(path + ": not a resolution checkpoint");
    if (const auto v = in.get<std::uint32_t>(); v != kVersion)
        throw std::runtime_error(fmt::format("{}: checkpoint version {} (expected {})", path, v, kVersion));

    FreeResolution r(std::move(m));
    std::vector<int> frontier;
    bool have_head = false, have_sum = false;
    while (!in.at_end()) {
        const std::size_t start = in.position();
        const std::string tag(in.take(4));
        const auto len = in.get<std::uint64_t>();
        Reader body(in.take(len));
        if (tag == "HEAD") {
            const std::string name = body.str();
            const int lo = body.get<std::int32_t>(), hi = body.get<std::int32_t>();
            bool same = lo == r.module_->lo() && hi == r.module_->hi();
            for (int n = lo; n <= hi; ++n)
                same = body.get<std::uint32_t>() == r.module_->dim(n) && same;
            if (!same)
                throw std::runtime_error(fmt::format("{}: checkpoint is for a different module ({})", path, name));
            const auto count = body.get<std::uint32_t>();
            for (std::uint32_t s = 0; s < count; ++s)
                frontier.push_back(body.get<std::int32_t>());
            have_head = true;
        }
        else if (tag == "GENS") {
            if (!have_head)
                throw std::runtime_error(path + ": generator table before header");
            const int s = static_cast<int>(body.get<std::uint32_t>());
            if (s >= static_cast<int>(frontier.size()) || s != static_cast<int>(r.gens_.size()))
                throw std::runtime_error(fmt::format("{}: unexpected generator table for s = {}", path, s));
            r.gens_.emplace_back();
            r.done_.push_back(frontier[s]);
            const auto count = body.get<std::uint32_t>();
            for (std::uint32_t i = 0; i < count; ++i) {
                const int degree = body.get<std::int32_t>();
                if (degree > frontier[s])
                    throw std::runtime_error(fmt::format("{}: generator {} beyond the frontier", path, gen_name(s, static_cast<int>(i))));
                const auto nterms = body.get<std::uint32_t>();
                F2Vector d(r.dim(s - 1, degree));
                for (std::uint32_t k = 0; k < nterms; ++k) {
                    const auto len_m = body.get<std::uint8_t>();
                    if (len_m > kMaxMilnorLength)
                        throw std::runtime_error(path + ": corrupt monomial");
                    std::vector<int> ex;
                    for (std::uint8_t e = 0; e < len_m; ++e)
                        ex.push_back(body.get<std::uint16_t>());
                    const auto target = body.get<std::uint32_t>();
                    if (s == 0) {
                        if (target >= d.size())
                            throw std::runtime_error(path + ": corrupt augmentation");
                        d.flip(target);
                        continue;
                    }
                    const MilnorMonomial mono(ex);
                    if (target >= r.gens_[s - 1].size() || r.gens_[s - 1][target].degree + mono.degree() != degree ||
                        mono.degree() == 0)
                        throw std::runtime_error(fmt::format("{}: inconsistent term in d({})", path, gen_name(s, static_cast<int>(i))));
                    d.flip(r.offset(s - 1, degree, static_cast<int>(target)) + milnor_index(mono));
                }
                if (!r.gens_[s].empty() && r.gens_[s].back().degree > degree)
                    throw std::runtime_error(path + ": generators out of order");
                r.gens_[s].push_back({degree, std::move(d)});
            }
            if (!body.at_end())
                throw std::runtime_error(path + ": trailing bytes in a generator table");
        }
        else if (tag == "SUM ") {
            if (body.get<std::uint64_t>() != fnv1a(std::string_view(bytes).substr(0, start)))
                throw std::runtime_error(path + ": checksum mismatch");
            have_sum = true;
            if (!in.at_end())
                throw std::runtime_error(path + ": data after checksum");
        }
        else {
            throw std::runtime_error(fmt::format("{}: unknown section '{}'", path, tag));
        }
    }
    if (!have_sum)
        throw std::runtime_error(path + ": checkpoint truncated");
    if (r.gens_.size() != frontier.size())
        throw std::runtime_error(path + ": missing generator tables");
    for (std::size_t s = 1; s < frontier.size(); ++s)
        if (frontier[s] > frontier[s - 1])
            throw std::runtime_error(path + ": frontier is not monotone in s");
    return r;
}

std::shared_ptr<const FreeResolution> resolve_ground_field(int s_max, int t_max, ResolverOptions opts)
{
    const ModulePtr f2 = ground_field();
    std::string path;
    if (const char* dir = std::getenv("EXTSQ_CACHE_DIR"); dir && *dir) {
        std::filesystem::create_directories(dir);
        path = fmt::format("{}/f2_s{}_t{}.res", dir, s_max, t_max);
        if (std::filesystem::exists(path)) {
            try {
                auto r = std::make_shared<FreeResolution>(FreeResolution::load(path, f2));
                r->opts_ = opts;
                return r;
            }
            catch (const std::runtime_error&) {
                // unreadable cache entry: recompute and overwrite
            }
        }
    }
    auto r = std::make_shared<FreeResolution>(f2, opts);
    r->extend(s_max, t_max);
    if (!path.empty())
        r->save(path);
    return r;
}

FreeResolution load_transcription(const std::string& path, ModulePtr m)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open " + path);
    FreeResolution r(std::move(m));
    std::string line;
    int lineno = 0;
    std::map<int, int> top;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        int s, g, t;
        std::string colon;
        if (!(ls >> s >> g >> t >> colon) || colon != ":" || s < 1)
            throw ParseError(fmt::format("{}:{}: expected 's g t : element'", path, lineno));
        std::string rest;
        std::getline(ls, rest);
        if (r.gens_.empty()) {
            // s = 0: the single generator of F2's resolution
            r.gens_.resize(1);
            r.done_.resize(1, t);
            r.gens_[0].push_back({0, F2Vector::unit(r.module_->dim(0), 0)});
        }
        if (static_cast<int>(r.gens_.size()) <= s) {
            r.gens_.resize(s + 1);
            r.done_.resize(s + 1, r.module_->lo() - 1);
        }
        if (g != static_cast<int>(r.gens_[s].size()))
            throw ParseError(fmt::format("{}:{}: generators must be listed in order", path, lineno));
        TokenStream ts(rest);
        std::vector<FreeTerm> terms;
        for (const auto& term : ts.parse_module_sum()) {
            const auto us = term.gen.find('_');
            if (us == std::string::npos || std::stoi(term.gen.substr(0, us)) != s - 1)
                throw ParseError(fmt::format("{}:{}: bad generator '{}'", path, lineno, term.gen));
            terms.push_back({term.coef, std::stoi(term.gen.substr(us + 1))});
        }
        if (!ts.at_end())
            ts.fail("trailing input");
        r.gens_[s].push_back({t, r.encode(s - 1, t, terms)});
        top[s] = std::max(top[s], t);
    }
    for (auto& [s, t] : top)
        r.done_[s] = t;
    r.done_[0] = std::max(r.done_[0], r.done_.size() > 1 ? r.done_[1] : 0);
    return r;
}

}  // namespace extsq
