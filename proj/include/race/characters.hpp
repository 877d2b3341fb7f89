#pragma once

/**
 * @file characters.hpp
 * @brief Exact Dirichlet character groups with Conrey-style labels.
 *
 * Characters are built from the standard decomposition of (Z/q)*: a primitive
 * root for each odd prime-power component and the <-1,5> structure for the
 * 2-part.  The symmetric Conrey pairing chi_q(n, m) gives every character a
 * stable integer label n coprime to q, so zero files and CLI flags can name
 * characters across runs.
 *
 * Values are exact roots of unity held as integer exponents k of
 * e^{2*pi*i*k/N}, with N the group exponent; complex doubles appear only at
 * evaluation boundaries.
 */

#include <complex>
#include <memory>
#include <vector>

#include "race/arith.hpp"

namespace race {

class CharacterGroup;

/**
 * One Dirichlet character mod q.  Lightweight view into its group's tables;
 * copying is cheap.  chi(n) is 0 when gcd(n,q) > 1 and a root of unity
 * otherwise.
 */
class DirichletCharacter {
  public:
    int64_t modulus() const { return q_; }
    int64_t label() const { return label_; }
    int64_t conductor() const { return conductor_; }
    bool is_principal() const { return label_ == 1 || q_ == 1; }
    bool is_real() const { return real_; }
    int parity() const { return parity_; }  // chi(-1): +1 or -1

    // Exponent k with chi(n) = e^{2 pi i k / N}; -1 when gcd(n,q) > 1.
    int64_t exponent_at(int64_t n) const;
    int64_t exponent_denominator() const;  // the group exponent N

    std::complex<double> operator()(int64_t n) const;

    // Label of the complex conjugate character (the inverse label mod q).
    int64_t conjugate_label() const;

  private:
    friend class CharacterGroup;
    std::shared_ptr<const CharacterGroup> group_;
    int64_t q_ = 1;
    int64_t label_ = 1;
    int64_t conductor_ = 1;
    int parity_ = 1;
    bool real_ = true;
};

/**
 * The full group of phi(q) characters mod q.  Immutable once built; obtain
 * instances through CharacterGroup::get(), which memoizes per modulus.
 */
class CharacterGroup {
  public:
    // Memoized factory (thread-safe, write-once cache).
    static std::shared_ptr<const CharacterGroup> get(int64_t q);

    const ModulusContext& context() const { return ctx_; }
    int64_t modulus() const { return ctx_.q; }
    int64_t exponent() const { return exponent_; }

    // All phi(q) characters in ascending label order; the principal first
    // (label 1 is always the smallest coprime label).
    const std::vector<DirichletCharacter>& characters() const { return chars_; }

    DirichletCharacter character(int64_t label) const;
    DirichletCharacter principal() const { return character(1); }

    // The unique primitive character (mod conductor) inducing chi.
    static DirichletCharacter primitive_lift(const DirichletCharacter& chi);

    // Pairing exponent: chi_q(n, m) = e^{2 pi i pairing(n,m) / exponent()}.
    int64_t pairing_exponent(int64_t n, int64_t m) const;

  private:
    CharacterGroup() = default;
    void build(int64_t q);
    int64_t conductor_of(int64_t label) const;

    struct Component {
        int64_t prime_power;    // p^e
        int64_t order;          // order of this cyclic factor
        std::vector<int32_t> dlog;  // index by residue mod p^e; -1 noncoprime
        bool two_sign = false;  // the order-2 factor of the 2-part (e >= 2)
    };

    ModulusContext ctx_;
    int64_t exponent_ = 1;
    std::vector<Component> comps_;
    std::vector<DirichletCharacter> chars_;
    std::vector<int32_t> label_index_;  // residue -> index in chars_, or -1
};

// -----------------------------------------------------------------------------
// Weighted character sums (section-3 style closed forms plus direct oracles)
// -----------------------------------------------------------------------------

// sum_chi |chi(a)-chi(b)|^{2n} chi(c) via the binomial identity
// sum_{|i|<=n} (-1)^i C(2n, n+i) chi(a^i b^{-i} c) and orthogonality.
// The value is a real integer multiple of phi(q).
double weighted_char_sum(const CharacterGroup& g, const ResiduePair& pair,
                         int n, int64_t c);

// Same quantity by direct summation over the character table (test oracle).
std::complex<double> weighted_char_sum_direct(const CharacterGroup& g,
                                              const ResiduePair& pair, int n,
                                              int64_t c);

struct LogQstarSum {
    double direct = 0.0;       // sum_chi |chi(a)-chi(b)|^2 log q*
    double closed_form = 0.0;  // 2 phi(q) (log q - sum log p/(p-1)
                               //            + Lambda(q/(q,a-b))/phi(q/(q,a-b)))
};

LogQstarSum log_qstar_weighted_sum(const CharacterGroup& g,
                                   const ResiduePair& pair);

}  // namespace race
