// Bit-packed linear algebra over F2.
//
// Matrices act on row vectors: a matrix with r rows and c columns is the
// linear map F2^r -> F2^c sending e_i to row i.  Every ordering in here is
// deterministic; callers rely on pivot order for reproducible output.
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace extsq {

class F2Vector {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    F2Vector() = default;
    explicit F2Vector(std::size_t length)
        : words_((length + kWordBits - 1) / kWordBits, 0), length_(length) {}

    static F2Vector unit(std::size_t length, std::size_t index)
    {
        F2Vector v(length);
        v.set(index);
        return v;
    }
    // Parses a string of '0'/'1' characters.
    static F2Vector from_string(const std::string& bits);

    std::size_t size() const { return length_; }

    bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u; }
    void set(std::size_t i) { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
    void clear(std::size_t i) { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }
    void flip(std::size_t i) { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }
    void assign(std::size_t i, bool b)
    {
        if (b)
            set(i);
        else
            clear(i);
    }

    F2Vector& operator^=(const F2Vector& other);
    F2Vector& operator+=(const F2Vector& other) { return *this ^= other; }
    friend F2Vector operator+(F2Vector a, const F2Vector& b) { return a ^= b; }
    bool operator==(const F2Vector& other) const = default;

    bool is_zero() const;
    std::size_t popcount() const;
    // Index of the lowest set bit, or size() when zero.
    std::size_t first_set() const;
    // Index of the lowest set bit at or after `from`, or size().
    std::size_t next_set(std::size_t from) const;
    std::vector<std::size_t> support() const;

    // Parity of the bitwise AND.
    bool dot(const F2Vector& other) const;

    // Copy of bits [offset, offset + length).
    F2Vector slice(std::size_t offset, std::size_t length) const;
    // XORs `other` into bits starting at offset.
    void add_at(std::size_t offset, const F2Vector& other);
    // Returns this vector followed by `other`.
    F2Vector concat(const F2Vector& other) const;
    void resize(std::size_t length);

    std::span<const Word> words() const { return words_; }
    std::string to_string() const;

    template <typename F>
    void for_each_set(F&& f) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word x = words_[w];
            while (x) {
                f(w * kWordBits + static_cast<std::size_t>(std::countr_zero(x)));
                x &= x - 1;
            }
        }
    }

private:
    std::vector<Word> words_;
    std::size_t length_ = 0;
};

class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::size_t rows, std::size_t cols) : rows_(rows, F2Vector(cols)), cols_(cols) {}
    F2Matrix(std::vector<F2Vector> rows, std::size_t cols);

    static F2Matrix identity(std::size_t n);
    // Rows given as strings of '0'/'1'.
    static F2Matrix from_strings(const std::vector<std::string>& rows);

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }

    const F2Vector& row(std::size_t i) const { return rows_[i]; }
    F2Vector& row(std::size_t i) { return rows_[i]; }
    const std::vector<F2Vector>& row_list() const { return rows_; }

    bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool b = true) { rows_[r].assign(c, b); }

    void append_row(F2Vector v);

    // v * M, for v of length rows().
    F2Vector apply(const F2Vector& v) const;
    // Product this * other (compose: first this, then other).
    F2Matrix operator*(const F2Matrix& other) const;
    F2Matrix transpose() const;
    bool operator==(const F2Matrix& other) const = default;

    bool is_zero() const;

private:
    std::vector<F2Vector> rows_;
    std::size_t cols_ = 0;
};

struct RowReduction {
    F2Matrix reduced;                 // reduced row-echelon form
    std::vector<std::size_t> pivots;  // pivot column of reduced row i, for i < rank
    F2Matrix transform;               // transform * input = reduced
    std::size_t rank() const { return pivots.size(); }
};

// Gauss-Jordan elimination.  Columns are scanned left to right; the pivot
// row for a column is the first remaining row (top to bottom) with a one.
RowReduction rref(const F2Matrix& m);

std::size_t rank(const F2Matrix& m);

// Returns x with x * m = rhs.  Free variables are zero with respect to the
// pivot order of rref(m).  std::nullopt when rhs is outside the row space.
std::optional<F2Vector> solve(const F2Matrix& m, const F2Vector& rhs);

// rref(m) kept for repeated solves against the same matrix.
class LinearSolver {
public:
    explicit LinearSolver(const F2Matrix& m);
    std::size_t rows() const { return rows_; }
    std::size_t rank() const { return rr_.rank(); }
    // Same answer as solve(m, rhs).
    std::optional<F2Vector> solve(const F2Vector& rhs) const;
    // Basis of {x : x * m = 0}; the transform rows past the rank.
    std::vector<F2Vector> left_kernel() const;

private:
    RowReduction rr_;
    std::size_t rows_, cols_;
};

// Basis of {x : m * x^T = 0} (the null space of the column action), one
// vector per free column, ascending.
std::vector<F2Vector> kernel_basis(const F2Matrix& m);

// Basis of {x : x * m = 0}: the combinations of rows that vanish.
std::vector<F2Vector> left_kernel_basis(const F2Matrix& m);

// Incremental echelon basis of a subspace.  Rows are kept fully reduced
// against each other, pivots at their lowest set bit.
class EchelonBasis {
public:
    explicit EchelonBasis(std::size_t dimension = 0) : dim_(dimension) {}

    std::size_t dimension() const { return dim_; }
    std::size_t rank() const { return rows_.size(); }
    const std::vector<F2Vector>& rows() const { return rows_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    bool is_pivot(std::size_t col) const { return pivot_row_of(col) != kNone; }

    // Reduces v against the current rows, clearing every pivot column.
    F2Vector reduce(F2Vector v) const;
    bool contains(const F2Vector& v) const { return reduce(v).is_zero(); }

    // Adds v; returns false when v was already in the span.
    bool insert(F2Vector v);

    // Same as reduce, but also reports which rows were used.
    F2Vector reduce_tracking(F2Vector v, F2Vector& used) const;

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::size_t pivot_row_of(std::size_t col) const;

    std::size_t dim_;
    std::vector<F2Vector> rows_;
    std::vector<std::size_t> pivots_;
    std::vector<std::size_t> pivot_lookup_;  // column -> row, kNone when free
};

}  // namespace extsq
