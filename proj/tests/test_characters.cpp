#include <doctest.h>

#include <cmath>
#include <complex>

#include "race/characters.hpp"

using namespace race;
using cplx = std::complex<double>;

TEST_CASE("group sizes and principal character") {
    for (int64_t q : {1, 2, 3, 4, 5, 8, 12, 24, 60, 97, 163}) {
        auto g = CharacterGroup::get(q);
        CHECK(static_cast<int64_t>(g->characters().size()) == g->context().phi);
        auto chi0 = g->principal();
        CHECK(chi0.is_principal());
        CHECK(chi0.conductor() == 1);
        for (int64_t n = 1; n < std::max<int64_t>(q, 2); ++n) {
            cplx v = chi0(n);
            if (gcd64(n, q) == 1)
                CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-15);
            else
                CHECK(std::abs(v) == 0.0);
        }
    }
    auto g4 = CharacterGroup::get(4);
    REQUIRE(g4->characters().size() == 2);
    auto odd = g4->character(3);
    CHECK(odd.parity() == -1);
    CHECK(odd.conductor() == 4);
}

TEST_CASE("complete multiplicativity and periodicity") {
    for (int64_t q : {5, 8, 9, 12, 24, 35, 40, 63}) {
        auto g = CharacterGroup::get(q);
        for (const auto& chi : g->characters()) {
            CHECK(std::abs(chi(1) - cplx{1.0, 0.0}) < 1e-15);
            for (int64_t m = 1; m < q; ++m) {
                if (gcd64(m, q) != 1) continue;
                CHECK(std::abs(chi(m + q) - chi(m)) < 1e-14);
                for (int64_t n = 1; n < q; ++n) {
                    if (gcd64(n, q) != 1) continue;
                    cplx lhs = chi(m * n);
                    cplx rhs = chi(m) * chi(n);
                    REQUIRE(std::abs(lhs - rhs) < 1e-13);
                }
            }
        }
    }
}

TEST_CASE("orthogonality: column sums") {
    // sum_chi chi(a) = phi(q) iota_q(a)
    for (int64_t q = 3; q <= 200; q += 7) {
        auto g = CharacterGroup::get(q);
        for (int64_t a : {int64_t{1}, int64_t{2}, q - 1, (q + 1) / 2}) {
            if (gcd64(a, q) != 1) continue;
            cplx s = 0.0;
            for (const auto& chi : g->characters()) s += chi(a);
            double expect = iota(q, a) * static_cast<double>(g->context().phi);
            REQUIRE(std::abs(s - cplx{expect, 0.0}) < 1e-9);
        }
    }
}

TEST_CASE("character table unitarity") {
    for (int64_t q : {7, 12, 16, 21, 40, 101, 200}) {
        auto g = CharacterGroup::get(q);
        double phi = static_cast<double>(g->context().phi);
        for (int64_t m : {int64_t{1}, int64_t{2}, int64_t{3}, q - 1}) {
            if (gcd64(m, q) != 1) continue;
            for (int64_t n : {int64_t{1}, int64_t{3}, q - 1}) {
                if (gcd64(n, q) != 1) continue;
                cplx s = 0.0;
                for (const auto& chi : g->characters())
                    s += chi(m) * std::conj(chi(n));
                int64_t mninv = mul_mod(m, inv_mod(n, q), q);
                double expect = iota(q, mninv) * phi;
                REQUIRE(std::abs(s - cplx{expect, 0.0}) < 1e-9);
            }
        }
    }
}

TEST_CASE("real character count equals rho") {
    for (int64_t q = 1; q <= 1000; ++q) {
        auto g = CharacterGroup::get(q);
        int64_t real_count = 0;
        for (const auto& chi : g->characters())
            if (chi.is_real()) ++real_count;
        REQUIRE(real_count == g->context().rho);
    }
}

TEST_CASE("values are exact roots of unity") {
    for (int64_t q : {13, 24, 36, 100}) {
        auto g = CharacterGroup::get(q);
        for (const auto& chi : g->characters()) {
            for (int64_t n = 0; n < q; ++n) {
                if (gcd64(n, q) != 1) {
                    CHECK(chi.exponent_at(n) == -1);
                    continue;
                }
                int64_t k = chi.exponent_at(n);
                REQUIRE(k >= 0);
                REQUIRE(k < chi.exponent_denominator());
                CHECK(std::abs(std::abs(chi(n)) - 1.0) < 1e-15);
            }
        }
    }
}

TEST_CASE("conductors and primitive lifts") {
    // the nonprincipal real character mod 6 is induced from modulus 3
    auto g6 = CharacterGroup::get(6);
    auto chi6 = g6->character(5);
    CHECK(chi6.conductor() == 3);
    auto star = CharacterGroup::primitive_lift(chi6);
    CHECK(star.modulus() == 3);
    CHECK(std::abs(star(1) - chi6(1)) < 1e-15);
    CHECK(std::abs(star(5) - chi6(5)) < 1e-15);

    // already-primitive character stays put
    auto g4 = CharacterGroup::get(4);
    auto chi4 = g4->character(3);
    auto star4 = CharacterGroup::primitive_lift(chi4);
    CHECK(star4.modulus() == 4);
    CHECK(star4.label() == 3);

    // lifted character agrees with the original on all residues coprime to q
    for (int64_t q : {12, 24, 45, 90, 120}) {
        auto g = CharacterGroup::get(q);
        for (const auto& chi : g->characters()) {
            auto st = CharacterGroup::primitive_lift(chi);
            CHECK(st.conductor() == st.modulus());  // lifts are primitive
            CHECK(chi.conductor() % st.modulus() == 0);
            CHECK(st.modulus() == chi.conductor());
            for (int64_t m = 1; m < q; ++m) {
                if (gcd64(m, q) != 1) continue;
                REQUIRE(std::abs(st(m) - chi(m)) < 1e-13);
            }
            CHECK(st.parity() == chi.parity());
        }
    }
}

TEST_CASE("weighted character sums: closed form vs orthogonality") {
    // n=1, c=1, a != b: 2 phi(q)
    for (int64_t q : {5, 12, 24, 101}) {
        auto g = CharacterGroup::get(q);
        auto ctx = g->context();
        auto pair = ResiduePair::make(ctx, q - 1, 1);
        CHECK(weighted_char_sum(*g, pair, 1, 1) ==
              doctest::Approx(2.0 * ctx.phi));
        // n=1, c != 1: -phi (iota(c ab^{-1}) + iota(c ba^{-1}))
        for (int64_t c = 2; c < q; ++c) {
            if (gcd64(c, q) != 1) continue;
            double closed = weighted_char_sum(*g, pair, 1, c);
            int64_t cab = mul_mod(c, pair.r1 % q, q);
            int64_t cba = mul_mod(c, pair.r2 % q, q);
            double expect = -static_cast<double>(ctx.phi) *
                            (iota(q, cab) + iota(q, cba));
            REQUIRE(closed == doctest::Approx(expect));
        }
    }
}

TEST_CASE("weighted character sums vs direct table summation") {
    for (int64_t q : {5, 8, 12, 21, 40}) {
        auto g = CharacterGroup::get(q);
        auto ctx = g->context();
        for (int64_t a = 2; a < q; ++a) {
            if (gcd64(a, q) != 1) continue;
            auto pair = ResiduePair::make(ctx, a, 1);
            for (int n = 1; n <= 2; ++n) {
                for (int64_t c : {int64_t{1}, a, q - 1}) {
                    if (gcd64(c, q) != 1) continue;
                    double closed = weighted_char_sum(*g, pair, n, c);
                    cplx direct = weighted_char_sum_direct(*g, pair, n, c);
                    REQUIRE(std::abs(direct.imag()) < 1e-10);
                    REQUIRE(closed ==
                            doctest::Approx(direct.real()).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("semi-orthogonality relation") {
    // sum_chi chi(r) (chi*(p^e) - chi(p^e)) = phi(q/p^nu) when
    // r p^e == 1 (mod q/p^nu) and p | q, else 0.
    for (int64_t q : {12, 24, 45, 63, 100, 200}) {
        auto g = CharacterGroup::get(q);
        auto ctx = g->context();
        std::vector<std::pair<DirichletCharacter, DirichletCharacter>> lifted;
        for (const auto& chi : g->characters())
            lifted.emplace_back(chi, CharacterGroup::primitive_lift(chi));
        for (auto [p, nu] : ctx.factors) {
            int64_t m = q;
            for (int i = 0; i < nu; ++i) m /= p;
            for (int64_t r = 1; r < q; ++r) {
                if (gcd64(r, q) != 1) continue;
                for (int e = 1; e <= 3; ++e) {
                    cplx s = 0.0;
                    int64_t pe = 1;
                    for (int i = 0; i < e; ++i) pe *= p;
                    for (const auto& [chi, star] : lifted)
                        s += chi(r) * (star(pe) - chi(pe));
                    double expect = 0.0;
                    if (m == 1 || mul_mod(r % m, pe % m, m) == 1 % m)
                        expect = static_cast<double>(
                            phi_from_factors(factorize(m)));
                    REQUIRE(std::abs(s - cplx{expect, 0.0}) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("log conductor weighted sum") {
    for (int64_t q = 3; q <= 200; ++q) {
        if (q % 4 == 2) continue;
        auto g = CharacterGroup::get(q);
        auto ctx = g->context();
        for (int64_t a = 2; a < std::min<int64_t>(q, 12); ++a) {
            if (gcd64(a, q) != 1) continue;
            auto pair = ResiduePair::make(ctx, a, 1);
            auto s = log_qstar_weighted_sum(*g, pair);
            REQUIRE(s.direct == doctest::Approx(s.closed_form).epsilon(1e-10));
        }
    }
    // prime q, a != b: both routes give 2 phi(q) log q
    for (int64_t q : {101, 163}) {
        auto g = CharacterGroup::get(q);
        auto pair = ResiduePair::make(g->context(), 2, 1);
        auto s = log_qstar_weighted_sum(*g, pair);
        double expect = 2.0 * (q - 1) * std::log(static_cast<double>(q));
        CHECK(s.closed_form == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("conjugate labels") {
    auto g = CharacterGroup::get(40);
    for (const auto& chi : g->characters()) {
        auto conj_chi = g->character(chi.conjugate_label());
        for (int64_t m = 1; m < 40; ++m) {
            if (gcd64(m, 40) != 1) continue;
            REQUIRE(std::abs(conj_chi(m) - std::conj(chi(m))) < 1e-14);
        }
    }
}
