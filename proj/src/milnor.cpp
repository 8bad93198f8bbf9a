#include "extsq/milnor.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "extsq/syntax.hpp"

namespace extsq {

// ---------------------------------------------------------------------------
// MilnorMonomial

MilnorMonomial::MilnorMonomial(std::initializer_list<int> exponents) : MilnorMonomial(std::vector<int>(exponents)) {}

MilnorMonomial::MilnorMonomial(const std::vector<int>& exponents)
{
    if (exponents.size() > kMaxMilnorLength) {
        for (std::size_t i = kMaxMilnorLength; i < exponents.size(); ++i)
            if (exponents[i] != 0)
                throw std::out_of_range("MilnorMonomial: sequence longer than supported");
    }
    for (std::size_t i = 0; i < exponents.size() && i < kMaxMilnorLength; ++i) {
        if (exponents[i] < 0)
            throw std::invalid_argument("MilnorMonomial: negative exponent");
        if (exponents[i] > kMaxDegree)
            throw std::out_of_range("MilnorMonomial: exponent exceeds degree cap");
        r_[i] = static_cast<std::uint16_t>(exponents[i]);
    }
    len_ = static_cast<std::uint8_t>(std::min(exponents.size(), kMaxMilnorLength));
    trim();
    if (degree() > kMaxDegree)
        throw std::out_of_range(fmt::format("MilnorMonomial: degree {} exceeds cap {}", degree(), kMaxDegree));
}

MilnorMonomial MilnorMonomial::milnor_primitive(int i)
{
    std::vector<int> r(static_cast<std::size_t>(i) + 1, 0);
    r.back() = 1;
    return MilnorMonomial(r);
}

void MilnorMonomial::trim()
{
    while (len_ > 0 && r_[len_ - 1] == 0)
        --len_;
}

int MilnorMonomial::degree() const
{
    int d = 0;
    for (std::size_t i = 0; i < len_; ++i)
        d += r_[i] * ((1 << (i + 1)) - 1);
    return d;
}

std::size_t MilnorMonomial::hash() const
{
    std::size_t h = len_;
    for (std::size_t i = 0; i < len_; ++i)
        h = h * 1000003u ^ r_[i];
    return h;
}

int degree(const MilnorMonomial& m) { return m.degree(); }

std::strong_ordering compare_milnor(const MilnorMonomial& a, const MilnorMonomial& b)
{
    if (a.degree() != b.degree())
        throw std::invalid_argument(
            fmt::format("compare_milnor: degrees differ ({} vs {})", a.degree(), b.degree()));
    for (std::size_t i = std::max(a.length(), b.length()); i-- > 0;) {
        if (a[i] != b[i])
            return a[i] < b[i] ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Basis tables

namespace {

struct BasisTables {
    std::shared_mutex mutex;
    std::vector<std::unique_ptr<std::vector<MilnorMonomial>>> basis;
    std::unordered_map<MilnorMonomial, std::size_t> index;
};

BasisTables& basis_tables()
{
    static BasisTables t;
    return t;
}

void enumerate(int remaining, std::size_t slot, std::vector<int>& r, std::vector<MilnorMonomial>& out)
{
    if (slot == 0) {
        r[0] = remaining;
        out.emplace_back(r);
        r[0] = 0;
        return;
    }
    const int w = (1 << (slot + 1)) - 1;
    for (int k = 0; k * w <= remaining; ++k) {
        r[slot] = k;
        enumerate(remaining - k * w, slot - 1, r, out);
    }
    r[slot] = 0;
}

void check_degree(int d)
{
    if (d < 0 || d > kMaxDegree)
        throw std::out_of_range(fmt::format("degree {} outside supported range [0, {}]", d, kMaxDegree));
}

}  // namespace

const std::vector<MilnorMonomial>& milnor_basis(int d)
{
    check_degree(d);
    BasisTables& t = basis_tables();
    {
        std::shared_lock lock(t.mutex);
        if (static_cast<std::size_t>(d) < t.basis.size() && t.basis[d])
            return *t.basis[d];
    }
    std::unique_lock lock(t.mutex);
    if (t.basis.size() <= static_cast<std::size_t>(d))
        t.basis.resize(d + 1);
    if (!t.basis[d]) {
        auto list = std::make_unique<std::vector<MilnorMonomial>>();
        std::size_t top = 0;
        while (top + 1 < kMaxMilnorLength && (1 << (top + 2)) - 1 <= d)
            ++top;
        std::vector<int> r(top + 1, 0);
        enumerate(d, top, r, *list);
        std::sort(list->begin(), list->end(),
                  [](const MilnorMonomial& a, const MilnorMonomial& b) { return compare_milnor(a, b) > 0; });
        for (std::size_t i = 0; i < list->size(); ++i)
            t.index.emplace((*list)[i], i);
        t.basis[d] = std::move(list);
    }
    return *t.basis[d];
}

std::size_t milnor_dimension(int d) { return d < 0 ? 0 : milnor_basis(d).size(); }

std::size_t milnor_index(const MilnorMonomial& m)
{
    milnor_basis(m.degree());
    BasisTables& t = basis_tables();
    std::shared_lock lock(t.mutex);
    return t.index.at(m);
}

// ---------------------------------------------------------------------------
// AlgebraElement

AlgebraElement::AlgebraElement(const MilnorMonomial& m) : degree_(m.degree()), terms_{m} {}

AlgebraElement::AlgebraElement(int degree, std::vector<MilnorMonomial> terms) : degree_(degree), terms_(std::move(terms))
{
    for (const auto& m : terms_)
        if (m.degree() != degree_)
            throw std::invalid_argument("AlgebraElement: inhomogeneous terms");
    normalize();
}

void AlgebraElement::normalize()
{
    std::sort(terms_.begin(), terms_.end(),
              [](const MilnorMonomial& a, const MilnorMonomial& b) { return compare_milnor(a, b) > 0; });
    std::vector<MilnorMonomial> out;
    for (std::size_t i = 0; i < terms_.size();) {
        std::size_t j = i;
        while (j < terms_.size() && terms_[j] == terms_[i])
            ++j;
        if ((j - i) % 2 == 1)
            out.push_back(terms_[i]);
        i = j;
    }
    terms_ = std::move(out);
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other)
{
    if (other.is_zero())
        return *this;
    if (is_zero()) {
        *this = other;
        return *this;
    }
    if (other.degree_ != degree_)
        throw std::invalid_argument("AlgebraElement: adding elements of different degrees");
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    normalize();
    return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b)
{
    const int d = a.degree() + b.degree();
    if (a.is_zero() || b.is_zero())
        return AlgebraElement::zero(d);
    check_degree(d);
    F2Vector acc(milnor_dimension(d));
    for (const auto& x : a.terms())
        for (const auto& y : b.terms())
            acc ^= multiply_vector(x, y);
    return AlgebraElement::from_vector(d, acc);
}

bool AlgebraElement::operator==(const AlgebraElement& other) const
{
    if (is_zero() && other.is_zero())
        return true;
    return degree_ == other.degree_ && terms_ == other.terms_;
}

F2Vector AlgebraElement::to_vector() const
{
    F2Vector v(milnor_dimension(degree_));
    for (const auto& m : terms_)
        v.flip(milnor_index(m));
    return v;
}

AlgebraElement AlgebraElement::from_vector(int degree, const F2Vector& v)
{
    const auto& basis = milnor_basis(degree);
    if (v.size() != basis.size())
        throw std::invalid_argument("AlgebraElement::from_vector: length mismatch");
    AlgebraElement e(degree);
    v.for_each_set([&](std::size_t i) { e.terms_.push_back(basis[i]); });
    return e;  // basis order is already greatest first
}

// ---------------------------------------------------------------------------
// Product

namespace {

// Enumerates Milnor matrices for Sq(r) * Sq(s) and records each product
// monomial whose coefficient is odd.
class MilnorMatrixWalk {
public:
    MilnorMatrixWalk(const MilnorMonomial& r, const MilnorMonomial& s)
        : rows_(r.length()), cols_(s.length()), x_((rows_ + 1) * (cols_ + 1), 0)
    {
        for (std::size_t i = 1; i <= rows_; ++i)
            row_budget_.push_back(r[i - 1]);
        for (std::size_t j = 1; j <= cols_; ++j)
            col_budget_.push_back(s[j - 1]);
    }

    std::vector<MilnorMonomial> run()
    {
        visit(1, 1);
        return std::move(out_);
    }

private:
    int& at(std::size_t i, std::size_t j) { return x_[i * (cols_ + 1) + j]; }

    void visit(std::size_t i, std::size_t j)
    {
        if (i > rows_) {
            finish();
            return;
        }
        if (j > cols_) {
            visit(i + 1, 1);
            return;
        }
        const int weight = 1 << j;
        const int max_k = std::min(row_budget_[i - 1] / weight, col_budget_[j - 1]);
        for (int k = 0; k <= max_k; ++k) {
            at(i, j) = k;
            row_budget_[i - 1] -= k * weight;
            col_budget_[j - 1] -= k;
            visit(i, j + 1);
            row_budget_[i - 1] += k * weight;
            col_budget_[j - 1] += k;
        }
        at(i, j) = 0;
    }

    void finish()
    {
        for (std::size_t i = 1; i <= rows_; ++i)
            at(i, 0) = row_budget_[i - 1];
        for (std::size_t j = 1; j <= cols_; ++j)
            at(0, j) = col_budget_[j - 1];
        std::vector<int> t(rows_ + cols_, 0);
        for (std::size_t n = 1; n <= rows_ + cols_; ++n) {
            int bits = 0;
            for (std::size_t i = 0; i <= n; ++i) {
                const std::size_t j = n - i;
                if (i > rows_ || j > cols_)
                    continue;
                const int v = at(i, j);
                if (bits & v)
                    return;  // multinomial coefficient is even
                bits |= v;
            }
            t[n - 1] = bits;
        }
        out_.emplace_back(t);
    }

    std::size_t rows_, cols_;
    std::vector<int> x_;
    std::vector<int> row_budget_, col_budget_;
    std::vector<MilnorMonomial> out_;
};

struct PairHash {
    std::size_t operator()(const std::pair<MilnorMonomial, MilnorMonomial>& p) const
    {
        return p.first.hash() * 0x9E3779B97F4A7C15ull ^ p.second.hash();
    }
};

struct ProductCache {
    std::shared_mutex mutex;
    std::unordered_map<std::pair<MilnorMonomial, MilnorMonomial>, F2Vector, PairHash> table;
};

ProductCache& product_cache()
{
    static ProductCache c;
    return c;
}

}  // namespace

AlgebraElement multiply(const MilnorMonomial& a, const MilnorMonomial& b)
{
    return AlgebraElement::from_vector(a.degree() + b.degree(), multiply_vector(a, b));
}

const F2Vector& multiply_vector(const MilnorMonomial& a, const MilnorMonomial& b)
{
    ProductCache& c = product_cache();
    const auto key = std::make_pair(a, b);
    {
        std::shared_lock lock(c.mutex);
        if (auto it = c.table.find(key); it != c.table.end())
            return it->second;
    }
    const int d = a.degree() + b.degree();
    check_degree(d);
    F2Vector v(milnor_dimension(d));
    if (a.is_unit())
        v.set(milnor_index(b));
    else if (b.is_unit())
        v.set(milnor_index(a));
    else
        for (const auto& m : MilnorMatrixWalk(a, b).run())
            v.flip(milnor_index(m));
    std::unique_lock lock(c.mutex);
    return c.table.emplace(key, std::move(v)).first->second;
}

std::vector<std::pair<MilnorMonomial, MilnorMonomial>> coproduct(const MilnorMonomial& m)
{
    std::vector<std::pair<MilnorMonomial, MilnorMonomial>> out;
    const std::size_t n = m.length();
    std::vector<int> a(n, 0), b(n, 0);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            out.emplace_back(MilnorMonomial(a), MilnorMonomial(b));
            return;
        }
        for (int k = 0; k <= m[i]; ++k) {
            a[i] = k;
            b[i] = m[i] - k;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Doubling

MilnorMonomial double_monomial(const MilnorMonomial& m)
{
    std::vector<int> r = m.exponents();
    for (int& x : r)
        x *= 2;
    return MilnorMonomial(r);
}

AlgebraElement double_element(const AlgebraElement& e)
{
    std::vector<MilnorMonomial> terms;
    for (const auto& m : e.terms())
        terms.push_back(double_monomial(m));
    return AlgebraElement(2 * e.degree(), std::move(terms));
}

AlgebraElement halve_element(const AlgebraElement& e)
{
    if (e.degree() % 2 != 0)
        return AlgebraElement::zero(e.degree() / 2);
    std::vector<MilnorMonomial> terms;
    for (const auto& m : e.terms()) {
        std::vector<int> r = m.exponents();
        bool even = true;
        for (int& x : r) {
            even = even && x % 2 == 0;
            x /= 2;
        }
        if (even)
            terms.emplace_back(r);
    }
    return AlgebraElement(e.degree() / 2, std::move(terms));
}

AlgebraElement double_word(const std::vector<AlgebraElement>& factors)
{
    AlgebraElement acc = AlgebraElement::unit();
    for (const auto& f : factors)
        acc = acc * double_element(f);
    return acc;
}

AlgebraElement doubling_defect(const std::vector<AlgebraElement>& factors)
{
    AlgebraElement product = AlgebraElement::unit();
    for (const auto& f : factors)
        product = product * f;
    AlgebraElement w = double_word(factors);
    AlgebraElement d = double_element(product);
    if (w.is_zero())
        return d;
    if (d.is_zero())
        return w;
    return w + d;
}

// ---------------------------------------------------------------------------
// Generator decomposition

namespace {

struct DecompositionCache {
    std::shared_mutex mutex;
    std::unordered_map<MilnorMonomial, std::vector<GeneratorFactor>> table;
};

DecompositionCache& decomposition_cache()
{
    static DecompositionCache c;
    return c;
}

void build_decompositions(int d, std::unordered_map<MilnorMonomial, std::vector<GeneratorFactor>>& out)
{
    std::vector<GeneratorFactor> candidates;
    std::vector<F2Vector> rows;
    for (int j = 0; (1 << j) <= d; ++j) {
        const MilnorMonomial g = MilnorMonomial::sq(1 << j);
        for (const auto& b : milnor_basis(d - (1 << j))) {
            candidates.push_back({j, b});
            rows.push_back(multiply_vector(g, b));
        }
    }
    const auto& basis = milnor_basis(d);
    const F2Matrix m(std::move(rows), basis.size());
    const RowReduction rr = rref(m);
    for (std::size_t idx = 0; idx < basis.size(); ++idx) {
        F2Vector residual = F2Vector::unit(basis.size(), idx);
        F2Vector x(m.rows());
        for (std::size_t i = 0; i < rr.rank(); ++i) {
            if (residual.get(rr.pivots[i])) {
                residual ^= rr.reduced.row(i);
                x ^= rr.transform.row(i);
            }
        }
        if (!residual.is_zero())
            throw std::logic_error("generator decomposition failed: Sq^{2^j} do not span");
        std::vector<GeneratorFactor> f;
        x.for_each_set([&](std::size_t k) { f.push_back(candidates[k]); });
        out.emplace(basis[idx], std::move(f));
    }
}

}  // namespace

const std::vector<GeneratorFactor>& generator_decomposition(const MilnorMonomial& m)
{
    DecompositionCache& c = decomposition_cache();
    {
        std::shared_lock lock(c.mutex);
        if (auto it = c.table.find(m); it != c.table.end())
            return it->second;
    }
    std::unordered_map<MilnorMonomial, std::vector<GeneratorFactor>> fresh;
    if (m.is_unit())
        fresh.emplace(m, std::vector<GeneratorFactor>{});
    else
        build_decompositions(m.degree(), fresh);
    std::unique_lock lock(c.mutex);
    for (auto& [k, v] : fresh)
        c.table.emplace(k, std::move(v));
    return c.table.at(m);
}

// ---------------------------------------------------------------------------
// Text

std::string to_string(const MilnorMonomial& m)
{
    if (m.length() <= 1)
        return fmt::format("Sq{}", m[0]);
    return fmt::format("Sq({})", fmt::join(m.exponents(), ","));
}

std::string to_string(const AlgebraElement& e)
{
    if (e.is_zero())
        return "0";
    std::string s;
    for (const auto& m : e.terms()) {
        if (!s.empty())
            s += " + ";
        s += to_string(m);
    }
    return s;
}

std::string to_tex(const MilnorMonomial& m)
{
    if (m.length() <= 1)
        return fmt::format("Sq^{{{}}}", m[0]);
    return fmt::format("Sq^{{({})}}", fmt::join(m.exponents(), ","));
}

std::string to_tex(const AlgebraElement& e)
{
    if (e.is_zero())
        return "0";
    std::string s;
    for (const auto& m : e.terms()) {
        if (!s.empty())
            s += "+";
        s += to_tex(m);
    }
    return s;
}

AlgebraElement parse_algebra_element(std::string_view text)
{
    TokenStream ts(text);
    AlgebraElement e = ts.parse_algebra_sum();
    if (!ts.at_end())
        ts.fail("trailing input");
    return e;
}

}  // namespace extsq
