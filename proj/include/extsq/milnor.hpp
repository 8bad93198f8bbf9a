// The mod 2 Steenrod algebra in the Milnor basis.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "extsq/f2.hpp"

namespace extsq {

// Largest internal degree the algebra tables support.  Sq(r_1,...,r_8)
// covers every monomial through degree 2^9 - 2.
inline constexpr int kMaxDegree = 255;
inline constexpr std::size_t kMaxMilnorLength = 8;

// Sq(r_1, r_2, ...), trailing zeros trimmed.
class MilnorMonomial {
public:
    MilnorMonomial() = default;
    MilnorMonomial(std::initializer_list<int> exponents);
    explicit MilnorMonomial(const std::vector<int>& exponents);

    static MilnorMonomial sq(int n) { return n == 0 ? MilnorMonomial{} : MilnorMonomial{n}; }
    // Q_i = Sq(0,...,0,1) with the 1 in slot i+1.
    static MilnorMonomial milnor_primitive(int i);

    std::size_t length() const { return len_; }
    int operator[](std::size_t i) const { return i < len_ ? r_[i] : 0; }
    bool is_unit() const { return len_ == 0; }
    int degree() const;
    std::vector<int> exponents() const { return {r_.begin(), r_.begin() + len_}; }

    bool operator==(const MilnorMonomial& o) const = default;
    // Lexicographic on the raw sequence.  Storage order only; the algebra
    // order is compare_milnor().
    auto operator<=>(const MilnorMonomial& o) const = default;

    std::size_t hash() const;

private:
    friend class MilnorBuilder;
    void trim();
    std::array<std::uint16_t, kMaxMilnorLength> r_{};
    std::uint8_t len_ = 0;
};

int degree(const MilnorMonomial& m);

// Within one degree: a > b iff at the highest index where they differ, a has
// the smaller entry.  Throws std::invalid_argument on a degree mismatch.
std::strong_ordering compare_milnor(const MilnorMonomial& a, const MilnorMonomial& b);

// Homogeneous F2-linear combination of Milnor monomials.  Terms are kept
// sorted greatest first.
class AlgebraElement {
public:
    AlgebraElement() = default;  // zero, degree 0
    explicit AlgebraElement(int degree) : degree_(degree) {}
    AlgebraElement(const MilnorMonomial& m);  // NOLINT(implicit)
    AlgebraElement(int degree, std::vector<MilnorMonomial> terms);

    static AlgebraElement zero(int degree) { return AlgebraElement(degree); }
    static AlgebraElement unit() { return AlgebraElement(MilnorMonomial{}); }
    static AlgebraElement sq(int n) { return AlgebraElement(MilnorMonomial::sq(n)); }

    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<MilnorMonomial>& terms() const { return terms_; }

    AlgebraElement& operator+=(const AlgebraElement& other);
    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
    bool operator==(const AlgebraElement& other) const;

    // Coordinates in the ordered basis of its degree.
    F2Vector to_vector() const;
    static AlgebraElement from_vector(int degree, const F2Vector& v);

private:
    void normalize();
    int degree_ = 0;
    std::vector<MilnorMonomial> terms_;
};

// Ordered basis of A in one degree, greatest first.  Tables are built on
// first use and then shared; concurrent readers are safe.
const std::vector<MilnorMonomial>& milnor_basis(int degree);
std::size_t milnor_dimension(int degree);
std::size_t milnor_index(const MilnorMonomial& m);

// The Milnor product, via Milnor matrices with the mod 2 multinomial test.
AlgebraElement multiply(const MilnorMonomial& a, const MilnorMonomial& b);
// Product as a coordinate vector in milnor_basis(deg a + deg b); memoized.
const F2Vector& multiply_vector(const MilnorMonomial& a, const MilnorMonomial& b);

// Pairs (a, b) with a + b = m entrywise.
std::vector<std::pair<MilnorMonomial, MilnorMonomial>> coproduct(const MilnorMonomial& m);

// Sq(r_1, r_2, ...) -> Sq(2r_1, 2r_2, ...), termwise.  This is a section of
// the halving map Sq(2R) -> Sq(R) (zero on monomials with an odd entry),
// which is an algebra map.  Doubling a product of squares factor by factor
// agrees with doubling the product only modulo the kernel of halving; see
// doubling_defect().
MilnorMonomial double_monomial(const MilnorMonomial& m);
AlgebraElement double_element(const AlgebraElement& e);
// Sq(R) -> Sq(R/2) when every entry is even, else 0.
AlgebraElement halve_element(const AlgebraElement& e);
// Doubles each factor of a word and multiplies out.
AlgebraElement double_word(const std::vector<AlgebraElement>& factors);
// double_word(factors) + double_element(product).  Always in the kernel of
// halving; nonzero exactly when the two doublings disagree in A.
AlgebraElement doubling_defect(const std::vector<AlgebraElement>& factors);

// A monomial written as sum_k Sq^{2^{j_k}} * b_k.  Module actions are stored
// only for the algebra generators Sq^{2^j} and extended through these.
struct GeneratorFactor {
    int j;             // Sq^{2^j}
    MilnorMonomial b;  // remaining factor, degree deg(m) - 2^j
};
const std::vector<GeneratorFactor>& generator_decomposition(const MilnorMonomial& m);

// Text syntax.  Canonical: "Sq12", "Sq(0,4)", sums joined by " + ", products
// by juxtaposition ("Sq2 Sq8").  The parser also accepts "Sq^12",
// "Sq^{12}", "Sq^{(0,4)}", "Sq^{0,4}", and "1" for the unit.
std::string to_string(const MilnorMonomial& m);
std::string to_string(const AlgebraElement& e);
// Style used by the published resolution tables: Sq^{8}, Sq^{(2,2)}.
std::string to_tex(const MilnorMonomial& m);
std::string to_tex(const AlgebraElement& e);

AlgebraElement parse_algebra_element(std::string_view text);

}  // namespace extsq

template <>
struct std::hash<extsq::MilnorMonomial> {
    std::size_t operator()(const extsq::MilnorMonomial& m) const noexcept { return m.hash(); }
};
