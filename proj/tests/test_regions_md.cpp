#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "oscil/regions_md.hpp"
#include "oscil/rng.hpp"

using namespace oscil;

TEST_CASE("root-multiple comparisons and root floors") {
    // 1/2 vs (1/3) * 8^(-1/3) = 1/6
    CHECK(cmp_rat_vs_root_multiple(Rat(1, 2), Rat(1, 3), 8, 3) == 1);
    CHECK(cmp_rat_vs_root_multiple(Rat(1, 6), Rat(1, 3), 8, 3) == 0);
    CHECK(cmp_rat_vs_root_multiple(Rat(1, 7), Rat(1, 3), 8, 3) == -1);
    CHECK(cmp_rat_vs_root_multiple(Rat(-1, 7), Rat(1, 3), 8, 3) == -1);
    // floor(7 / sqrt(2)) = floor(4.949) = 4
    CHECK(floor_mul_root(Rat(7), 2, 2) == 4);
    CHECK(floor_mul_root(Rat(0), 5, 2) == 0);
    // floor(10 / sqrt(4)) = 5 exactly
    CHECK(floor_mul_root(Rat(10), 4, 2) == 5);
}

TEST_CASE("RootVal arithmetic and certified comparison") {
    // (1 + u)^2 with u = 2^(-1/2): 1 + 2u + 1/2 = 3/2 + 2u
    RootVal v = RootVal::linear(2, 2, Rat(1), Rat(1));
    RootVal sq = v * v;
    CHECK_FALSE(sq.is_rational());
    // value = 1.5 + sqrt(2) = 2.9142...
    CHECK(sq.cmp(Rat(29142, 10000)) == 1);
    CHECK(sq.cmp(Rat(29143, 10000)) == -1);
    // u * u is rational: 1/2
    RootVal u = RootVal::linear(2, 2, Rat(0), Rat(1));
    CHECK((u * u).is_rational());
    CHECK((u * u).as_rat() == Rat(1, 2));
    // perfect power collapses: u = 9^(-1/2) = 1/3
    RootVal w = RootVal::linear(9, 2, Rat(1), Rat(1));
    CHECK(w.is_rational());
    CHECK(w.as_rat() == Rat(4, 3));
}

TEST_CASE("membership_mbar_md spec examples") {
    CHECK(membership_mbar_md({Rat(1, 2), Rat(1, 2)}, 2, Rat(1, 100)));
    CHECK_FALSE(membership_mbar_md({Rat(1, 3), Rat(1, 4)}, 2, Rat(1, 10)));
    long q = 0;
    CHECK(membership_mbar_md({Rat(1, 3), Rat(1, 4)}, 12, Rat(1, 100), &q));
    CHECK(q == 12);  // psi hits exactly 0 at lcm(3,4)
}

TEST_CASE("membership equals the psi threshold comparison") {
    RngStream rng(21, 50);
    for (int i = 0; i < 60; ++i) {
        long m = 2 + static_cast<long>(rng.below(i, 2));
        bool dyadic = i % 2 == 0;
        std::vector<Rat> alphas;
        for (long j = 0; j < m; ++j) {
            if (dyadic)
                alphas.push_back(rng.uniform_rat(100 * i + j, 128));
            else
                alphas.push_back(Rat(Int(rng.uniform_bits(2000 + 100 * i + 2 * j, 24)),
                                     Int(rng.uniform_bits(2001 + 100 * i + 2 * j, 24)) + 1)
                                     .frac());
        }
        long k = 2 + static_cast<long>(rng.below(5000 + i, 40));
        Rat eps(1 + static_cast<long>(rng.below(6000 + i, 99)), 100);
        bool member = membership_mbar_md(alphas, k, eps);
        Rat psi = psi_simul_sweep(alphas, k).back().value;
        bool expect = cmp_rat_vs_root_multiple(psi, eps, k, m) <= 0;
        REQUIRE(member == expect);
    }
}

TEST_CASE("cube cluster measures") {
    // unit box: exactly (2 eps)^m / k for every q
    for (long q : {1L, 2L, 7L, 100L}) {
        CubeCluster c(q, 2, Rat(1, 10), 100);
        RootVal mu = cube_cluster_measure(c, BoxMd::unit(2));
        REQUIRE(mu.is_rational());
        REQUIRE(mu.as_rat() == Rat(1, 2500));
    }
    // irrational root still collapses on the unit box
    for (long q : {1L, 3L, 5L}) {
        CubeCluster c(q, 2, Rat(1, 8), 5);
        RootVal mu = cube_cluster_measure(c, BoxMd::unit(2));
        REQUIRE(mu.is_rational());
        REQUIRE(mu.as_rat() == (Rat(2) * Rat(1, 8)).pow(2) / Rat(5));
    }
    for (long q : {1L, 2L, 9L}) {
        CubeCluster c(q, 3, Rat(1, 9), 7);
        RootVal mu = cube_cluster_measure(c, BoxMd::unit(3));
        REQUIRE(mu.is_rational());
        REQUIRE(mu.as_rat() == (Rat(2) * Rat(1, 9)).pow(3) / Rat(7));
    }
    // tiny box inside one cube: the box volume
    {
        CubeCluster c(2, 2, Rat(1, 3), 5);
        BoxMd tiny(std::vector<std::pair<Rat, Rat>>{{Rat(49, 100), Rat(51, 100)},
                                                    {Rat(49, 100), Rat(51, 100)}});
        RootVal mu = cube_cluster_measure(c, tiny);
        REQUIRE(mu.is_rational());
        REQUIRE(mu.as_rat() == Rat(1, 2500));
    }
    // overlap regime refused
    CHECK_THROWS_AS(cube_cluster_measure(CubeCluster(1, 2, Rat(9, 10), 3), BoxMd::unit(2)),
                    input_error);
}

TEST_CASE("cube cluster bound from the Lemma 5 proof") {
    RngStream rng(22, 51);
    for (int i = 0; i < 40; ++i) {
        long m = 2 + static_cast<long>(rng.below(3 * i, 2));
        long k = 3 + static_cast<long>(rng.below(3 * i + 1, 200));
        long q = 1 + static_cast<long>(rng.below(3 * i + 2, k));
        Rat eps(1 + static_cast<long>(rng.below(5000 + i, 50)), 100);
        Rat lam(1 + static_cast<long>(rng.below(6000 + i, 9)), 10);
        Rat corner(static_cast<long>(rng.below(7000 + i, 30)), 100);
        if (lam + corner > Rat(1)) continue;
        CubeCluster c(q, m, eps, k);
        if (!c.cubes_disjoint()) continue;
        REQUIRE(cube_cluster_bound_ok(c, lam, corner));
    }
}

TEST_CASE("measure_mbar_md basics") {
    // eps = 0: only exact rational hits, which the dyadic sampler misses
    MdEstimate zero = measure_mbar_md(10, Rat(0), 2, BoxMd::unit(2), 2000, 3);
    CHECK(zero.value == Rat(0));

    // same seed, different thread hints: identical tallies
    MdEstimate a = measure_mbar_md(50, Rat(1, 4), 2, BoxMd::unit(2), 3000, 7, 1);
    MdEstimate b = measure_mbar_md(50, Rat(1, 4), 2, BoxMd::unit(2), 3000, 7, 4);
    CHECK(a.value == b.value);

    // gross monotonicity under box inclusion (gap far beyond noise)
    MdEstimate big = measure_mbar_md(4, Rat(45, 100), 2, BoxMd::unit(2), 2000, 11);
    MdEstimate small = measure_mbar_md(4, Rat(45, 100), 2,
                                       BoxMd::cube(2, Rat(0), Rat(1, 4)), 2000, 11);
    CHECK(small.value <= Rat(1, 16));
    CHECK(big.value > small.value);
}

TEST_CASE("lemma 5 / lemma 14 bands") {
    // the re-derived exact band values at m=2, eps=1/100, lam=1
    MdEstimate est;
    est.value = Rat(4, 10000);
    est.ci_halfwidth = Rat(0);
    est.samples = 1;
    est.k = 1000;
    est.m = 2;
    est.eps = Rat(1, 100);
    Lemma5Lemma14Report rep = lemma5_lemma14_check(est, Rat(1));
    CHECK(rep.lemma14_band == Rat(1, 15000) - Rat(289, 25000000));
    CHECK(rep.lemma5_complement_band == Rat(2, 625));
    CHECK_FALSE(rep.lemma14_vacuous);
    CHECK(rep.lemma5_ok);
    CHECK(rep.lemma14_ok);
    CHECK(rep.complement_value == Rat(1) - est.value);

    // vacuous band flagged when eps is large
    est.eps = Rat(1, 2);
    Lemma5Lemma14Report rep2 = lemma5_lemma14_check(est, Rat(1));
    CHECK(rep2.lemma14_vacuous);
    CHECK(rep2.lemma14_ok);
}

TEST_CASE("lemma 6 sums") {
    Lemma6Result r = lemma6_sum(4, 2);
    CHECK(r.sum == Rat(61, 144));
    CHECK(r.ok);

    // brute-force oracle on small k
    RngStream rng(23, 52);
    for (int i = 0; i < 10; ++i) {
        long k = 4 + static_cast<long>(rng.below(i, 17));
        long m = 2 + static_cast<long>(rng.below(100 + i, 2));
        Rat direct(0);
        long lo = (k + 1) / 2;
        for (long q1 = lo; q1 <= k; ++q1)
            for (long q2 = q1 + 1; q2 <= k; ++q2)
                direct += Rat(Int(std::gcd(q1, q2))).pow(m) / Rat(Int(q2)).pow(m);
        Lemma6Result rr = lemma6_sum(k, m);
        REQUIRE(rr.sum == direct);
        REQUIRE(rr.ok);
    }
    CHECK(lemma6_sum(100, 3).ok);
    CHECK_THROWS_AS(lemma6_sum(3, 2), input_error);
}

TEST_CASE("totient series against the zeta ratio") {
    TotientSeriesResult r3 = totient_series_check(3, 10000);
    CHECK(r3.ok);
    // zeta(2)/zeta(3) = 1.3684327...
    CHECK(r3.target.contains(Rat(13684328, 10000000)));
    TotientSeriesResult r4 = totient_series_check(4, 1000);
    CHECK(r4.ok);
    CHECK(r4.target.contains(Rat(11106265, 10000000)));  // zeta(3)/zeta(4)
    // doubling P grows the partial sum toward the target
    TotientSeriesResult a = totient_series_check(3, 500);
    TotientSeriesResult b = totient_series_check(3, 1000);
    CHECK(b.partial >= a.partial);
    CHECK(b.tail_bound < a.tail_bound);
    CHECK_THROWS_AS(totient_series_check(2, 100), input_error);
    CHECK_THROWS_AS(totient_series_check(3, 2000000), resource_error);
}

TEST_CASE("StripD structure") {
    // d > 2 eps k^(1-1/m) forces a = 0 (D collapses to l_0)
    StripD collapsed(500, 1000, 1000, 2, Rat(1, 5));
    CHECK(collapsed.d == 500);
    CHECK(collapsed.collapsed_to_l0());
    CHECK(collapsed.line_count() == 1);

    StripD wide(501, 502, 1000, 2, Rat(1, 5));
    CHECK(wide.d == 1);
    CHECK(wide.a > 0);
    CHECK(wide.line_count() == 2 * wide.a + 1);

    RngStream rng(24, 53);
    for (int i = 0; i < 60; ++i) {
        long m = 2 + static_cast<long>(rng.below(4 * i, 2));
        long k = 8 + static_cast<long>(rng.below(4 * i + 1, 2000));
        long lo = (k + 1) / 2;
        long q1 = lo + static_cast<long>(rng.below(4 * i + 2, k - lo));
        long q2 = q1 + 1 + static_cast<long>(rng.below(4 * i + 3, k - q1));
        Rat eps(1 + static_cast<long>(rng.below(9000 + i, 40)), 41);
        StripD s(q1, q2, k, m, eps);
        // width: h^2 <= 8 eps^2 k^(-2/m)  <=>  (h^2)^m k^2 <= (8 eps^2)^m
        REQUIRE(s.width_sq().pow(m) * Rat(Int(k)).pow(2) <= (Rat(8) * eps * eps).pow(m));
        // property 3
        if (Rat(s.d).pow(m) * Rat(Int(k)) > (Rat(2) * eps * Rat(Int(k))).pow(m))
            REQUIRE(s.collapsed_to_l0());
    }
}

TEST_CASE("d_region_points equals a brute rectangle scan") {
    RngStream rng(25, 54);
    for (int i = 0; i < 50; ++i) {
        long m = 2 + static_cast<long>(rng.below(5 * i, 2));
        long k = 8 + static_cast<long>(rng.below(5 * i + 1, 60));
        long lo = (k + 1) / 2;
        long q1 = lo + static_cast<long>(rng.below(5 * i + 2, k - lo));
        long q2 = q1 + 1 + static_cast<long>(rng.below(5 * i + 3, k - q1));
        Rat eps(1 + static_cast<long>(rng.below(9000 + i, 60)), 61);
        StripD s(q1, q2, k, m, eps);
        Rat lam(1 + static_cast<long>(rng.below(9500 + i, 5)), 3);
        RectC rect = i % 2 ? RectC::c0(q1, q2, lam, Rat(1, 10))
                           : RectC::sized(q1, q2, lam, Rat(1, 10), Rat(-3, 2), Rat(5, 7));
        auto pts = d_region_points(s, rect);
        std::sort(pts.begin(), pts.end());
        // brute scan
        std::vector<IPoint> brute;
        for (Int x = rect.x_lo.ceil(); x <= rect.x_hi.floor(); ++x)
            for (Int y = rect.y_lo.ceil(); y <= rect.y_hi.floor(); ++y) {
                Int lhs = Int(q2) * x - Int(q1) * y;
                if (lhs < 0) lhs = -lhs;
                if (lhs <= s.a)
                    brute.push_back({static_cast<long>(x.get_si()),
                                     static_cast<long>(y.get_si())});
            }
        std::sort(brute.begin(), brute.end());
        REQUIRE(pts == brute);
    }
}

TEST_CASE("points per line respect the (1+delta) lam d + 1 bound") {
    RngStream rng(26, 55);
    for (int i = 0; i < 40; ++i) {
        long k = 50 + static_cast<long>(rng.below(2 * i, 400));
        long lo = (k + 1) / 2;
        long q1 = lo + static_cast<long>(rng.below(2 * i + 1, k - lo));
        long q2 = q1 + 1 + static_cast<long>(rng.below(7000 + i, k - q1));
        Rat eps(1, 5), lam(1), delta(1, 10);
        StripD s(q1, q2, k, 2, eps);
        RectC c = RectC::sized(q1, q2, lam, delta, Rat(-1, 3), Rat(-1, 5));
        auto pts = d_region_points(s, c);
        // group by line value q2 x - q1 y
        std::map<long long, long> per_line;
        for (const auto& p : pts)
            ++per_line[static_cast<long long>(q2) * p.x - static_cast<long long>(q1) * p.y];
        Rat cap = (Rat(1) + delta) * lam * Rat(s.d) + Rat(1);
        for (const auto& [line, count] : per_line) REQUIRE(Rat(count) <= cap);
    }
}

TEST_CASE("lemma 11 bound on random pairs") {
    RngStream rng(27, 56);
    for (int i = 0; i < 60; ++i) {
        long m = 2 + static_cast<long>(rng.below(6 * i, 2));
        long k = 16 + static_cast<long>(rng.below(6 * i + 1, 2000));
        long lo = (k + 1) / 2;
        long q1 = lo + static_cast<long>(rng.below(6 * i + 2, k - lo));
        long q2 = q1 + 1 + static_cast<long>(rng.below(6 * i + 3, k - q1));
        Rat eps(1 + static_cast<long>(rng.below(8000 + i, 30)), 31);
        Rat lam(1 + static_cast<long>(rng.below(8100 + i, 10)), 10);
        Rat delta(1 + static_cast<long>(rng.below(8200 + i, 9)), 10);
        StripD s(q1, q2, k, m, eps);
        RectC c = RectC::sized(q1, q2, lam, delta, Rat(-7, 5), Rat(1, 9));
        long count = static_cast<long>(d_region_points(s, c).size());
        REQUIRE(Rat(count).pow(m) <= lemma11_bound_pow_m(s, lam));
    }
}

TEST_CASE("Pr_k respects its definition") {
    auto prk = pr_k_pairs(1000, 2, Rat(1, 5));
    // pmax = floor(sqrt(1000) * 5/4) = 39
    long pmax = 0;
    for (const auto& [p1, p2] : prk) {
        REQUIRE(std::gcd(p1, p2) == 1);
        REQUIRE(p1 <= p2);
        REQUIRE(p2 <= 2 * p1);
        pmax = std::max({pmax, p1, p2});
    }
    CHECK(pmax == 39);
    CHECK(!prk.empty());
}

TEST_CASE("classification smoke test at desk scale") {
    // sampled subset of the acceptance configuration
    ClassifyReport rep = classify_pairs(1000, 2, Rat(1, 5), Rat(1), Rat(1, 10), 400, 77);
    CHECK(rep.meaningful_regime);
    CHECK(rep.total_pairs == 400);
    CHECK(rep.violations_j0_subset_j1 == 0);
    CHECK(rep.violations_j1_subset_v == 0);
    CHECK(rep.violations_collinear == 0);
    CHECK(rep.violations_gamma == 0);
    CHECK(rep.violations_sine == 0);
    CHECK(rep.violations_lemma11 == 0);
    CHECK(rep.lemma13_ok_j1);
    CHECK(rep.lemma13_ok_v);
    CHECK(rep.lemma13_trivial);

    // below the meaningful regime the gate must report false
    ClassifyReport low = classify_pairs(50, 2, Rat(1, 5), Rat(1), Rat(1, 10), 100, 78);
    CHECK_FALSE(low.meaningful_regime);
    CHECK(low.violations_lemma11 == 0);  // Lemma 11 holds unconditionally
}
