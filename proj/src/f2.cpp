#include "extsq/f2.hpp"

#include <stdexcept>

namespace extsq {

F2Vector F2Vector::from_string(const std::string& bits)
{
    F2Vector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1')
            v.set(i);
        else if (bits[i] != '0')
            throw std::invalid_argument("F2Vector::from_string: expected 0/1, got '" + bits + "'");
    }
    return v;
}

F2Vector& F2Vector::operator^=(const F2Vector& other)
{
    if (other.length_ != length_)
        throw std::invalid_argument("F2Vector: length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i)
        words_[i] ^= other.words_[i];
    return *this;
}

bool F2Vector::is_zero() const
{
    for (Word w : words_)
        if (w)
            return false;
    return true;
}

std::size_t F2Vector::popcount() const
{
    std::size_t n = 0;
    for (Word w : words_)
        n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::size_t F2Vector::first_set() const { return next_set(0); }

std::size_t F2Vector::next_set(std::size_t from) const
{
    if (from >= length_)
        return length_;
    std::size_t w = from / kWordBits;
    Word x = words_[w] & (~Word{0} << (from % kWordBits));
    while (true) {
        if (x)
            return w * kWordBits + static_cast<std::size_t>(std::countr_zero(x));
        if (++w == words_.size())
            return length_;
        x = words_[w];
    }
}

std::vector<std::size_t> F2Vector::support() const
{
    std::vector<std::size_t> out;
    for_each_set([&](std::size_t i) { out.push_back(i); });
    return out;
}

bool F2Vector::dot(const F2Vector& other) const
{
    if (other.length_ != length_)
        throw std::invalid_argument("F2Vector::dot: length mismatch");
    Word acc = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
        acc ^= words_[i] & other.words_[i];
    return std::popcount(acc) & 1;
}

F2Vector F2Vector::slice(std::size_t offset, std::size_t length) const
{
    if (offset + length > length_)
        throw std::out_of_range("F2Vector::slice");
    F2Vector out(length);
    for (std::size_t i = next_set(offset); i < offset + length; i = next_set(i + 1))
        out.set(i - offset);
    return out;
}

void F2Vector::add_at(std::size_t offset, const F2Vector& other)
{
    if (offset + other.length_ > length_)
        throw std::out_of_range("F2Vector::add_at");
    if (offset % kWordBits == 0) {
        const std::size_t base = offset / kWordBits;
        for (std::size_t i = 0; i < other.words_.size(); ++i)
            words_[base + i] ^= other.words_[i];
        return;
    }
    other.for_each_set([&](std::size_t i) { flip(offset + i); });
}

F2Vector F2Vector::concat(const F2Vector& other) const
{
    F2Vector out(length_ + other.length_);
    out.add_at(0, *this);
    out.add_at(length_, other);
    return out;
}

void F2Vector::resize(std::size_t length)
{
    if (length < length_) {
        for (std::size_t i = next_set(length); i < length_; i = next_set(i + 1))
            clear(i);
    }
    words_.resize((length + kWordBits - 1) / kWordBits, 0);
    length_ = length;
}

std::string F2Vector::to_string() const
{
    std::string s(length_, '0');
    for_each_set([&](std::size_t i) { s[i] = '1'; });
    return s;
}

F2Matrix::F2Matrix(std::vector<F2Vector> rows, std::size_t cols) : rows_(std::move(rows)), cols_(cols)
{
    for (const auto& r : rows_)
        if (r.size() != cols_)
            throw std::invalid_argument("F2Matrix: ragged rows");
}

F2Matrix F2Matrix::identity(std::size_t n)
{
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i);
    return m;
}

F2Matrix F2Matrix::from_strings(const std::vector<std::string>& rows)
{
    std::vector<F2Vector> out;
    std::size_t cols = rows.empty() ? 0 : rows.front().size();
    for (const auto& r : rows)
        out.push_back(F2Vector::from_string(r));
    return F2Matrix(std::move(out), cols);
}

void F2Matrix::append_row(F2Vector v)
{
    if (v.size() != cols_)
        throw std::invalid_argument("F2Matrix::append_row: length mismatch");
    rows_.push_back(std::move(v));
}

F2Vector F2Matrix::apply(const F2Vector& v) const
{
    if (v.size() != rows_.size())
        throw std::invalid_argument("F2Matrix::apply: length mismatch");
    F2Vector out(cols_);
    v.for_each_set([&](std::size_t i) { out ^= rows_[i]; });
    return out;
}

F2Matrix F2Matrix::operator*(const F2Matrix& other) const
{
    if (cols_ != other.rows())
        throw std::invalid_argument("F2Matrix: product shape mismatch");
    F2Matrix out;
    out.cols_ = other.cols();
    out.rows_.reserve(rows_.size());
    for (const auto& r : rows_)
        out.rows_.push_back(other.apply(r));
    return out;
}

F2Matrix F2Matrix::transpose() const
{
    F2Matrix t(cols_, rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r)
        rows_[r].for_each_set([&](std::size_t c) { t.set(c, r); });
    return t;
}

bool F2Matrix::is_zero() const
{
    for (const auto& r : rows_)
        if (!r.is_zero())
            return false;
    return true;
}

RowReduction rref(const F2Matrix& m)
{
    const std::size_t n = m.rows();
    std::vector<F2Vector> rows = m.row_list();
    std::vector<F2Vector> trans = F2Matrix::identity(n).row_list();
    std::vector<std::size_t> pivots;

    std::size_t next = 0;
    for (std::size_t col = 0; col < m.cols() && next < n; ++col) {
        std::size_t found = n;
        for (std::size_t r = next; r < n; ++r) {
            if (rows[r].get(col)) {
                found = r;
                break;
            }
        }
        if (found == n)
            continue;
        std::swap(rows[found], rows[next]);
        std::swap(trans[found], trans[next]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r != next && rows[r].get(col)) {
                rows[r] ^= rows[next];
                trans[r] ^= trans[next];
            }
        }
        pivots.push_back(col);
        ++next;
    }
    return RowReduction{F2Matrix(std::move(rows), m.cols()), std::move(pivots), F2Matrix(std::move(trans), n)};
}

std::size_t rank(const F2Matrix& m)
{
    EchelonBasis basis(m.cols());
    for (const auto& r : m.row_list())
        basis.insert(r);
    return basis.rank();
}

std::optional<F2Vector> solve(const F2Matrix& m, const F2Vector& rhs)
{
    if (rhs.size() != m.cols())
        throw std::invalid_argument("solve: rhs length must equal column count");
    const RowReduction rr = rref(m);
    F2Vector residual = rhs;
    F2Vector x(m.rows());
    for (std::size_t i = 0; i < rr.rank(); ++i) {
        if (residual.get(rr.pivots[i])) {
            residual ^= rr.reduced.row(i);
            x ^= rr.transform.row(i);
        }
    }
    if (!residual.is_zero())
        return std::nullopt;
    return x;
}

LinearSolver::LinearSolver(const F2Matrix& m) : rr_(rref(m)), rows_(m.rows()), cols_(m.cols()) {}

std::optional<F2Vector> LinearSolver::solve(const F2Vector& rhs) const
{
    if (rhs.size() != cols_)
        throw std::invalid_argument("solve: rhs length must equal column count");
    F2Vector residual = rhs;
    F2Vector x(rows_);
    for (std::size_t i = 0; i < rr_.rank(); ++i) {
        if (residual.get(rr_.pivots[i])) {
            residual ^= rr_.reduced.row(i);
            x ^= rr_.transform.row(i);
        }
    }
    if (!residual.is_zero())
        return std::nullopt;
    return x;
}

std::vector<F2Vector> LinearSolver::left_kernel() const
{
    std::vector<F2Vector> out;
    for (std::size_t i = rr_.rank(); i < rows_; ++i)
        out.push_back(rr_.transform.row(i));
    return out;
}

std::vector<F2Vector> kernel_basis(const F2Matrix& m)
{
    const RowReduction rr = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : rr.pivots)
        is_pivot[p] = true;
    std::vector<F2Vector> out;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        F2Vector v(m.cols());
        v.set(f);
        for (std::size_t i = 0; i < rr.rank(); ++i)
            if (rr.reduced.get(i, f))
                v.set(rr.pivots[i]);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<F2Vector> left_kernel_basis(const F2Matrix& m) { return kernel_basis(m.transpose()); }

std::size_t EchelonBasis::pivot_row_of(std::size_t col) const
{
    return col < pivot_lookup_.size() ? pivot_lookup_[col] : kNone;
}

F2Vector EchelonBasis::reduce(F2Vector v) const
{
    if (v.size() != dim_)
        throw std::invalid_argument("EchelonBasis::reduce: length mismatch");
    const F2Vector original = v;
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (original.get(pivots_[i]))
            v ^= rows_[i];
    return v;
}

F2Vector EchelonBasis::reduce_tracking(F2Vector v, F2Vector& used) const
{
    if (v.size() != dim_)
        throw std::invalid_argument("EchelonBasis::reduce: length mismatch");
    used = F2Vector(rows_.size());
    const F2Vector original = v;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (original.get(pivots_[i])) {
            v ^= rows_[i];
            used.set(i);
        }
    }
    return v;
}

bool EchelonBasis::insert(F2Vector v)
{
    v = reduce(std::move(v));
    const std::size_t p = v.first_set();
    if (p == v.size())
        return false;
    for (auto& r : rows_)
        if (r.get(p))
            r ^= v;
    if (pivot_lookup_.size() < dim_)
        pivot_lookup_.assign(dim_, kNone);
    pivot_lookup_[p] = rows_.size();
    rows_.push_back(std::move(v));
    pivots_.push_back(p);
    return true;
}

}  // namespace extsq
