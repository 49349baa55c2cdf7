#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ample/castles.hpp"

using namespace ample;

static TransformationGroupoid odo(int rd = 10) {
    return TransformationGroupoid::binary_odometer(rd);
}

static KSpec shift_ball(const TransformationGroupoid& g) {
    auto full = ClopenSet::full(g.alphabet());
    return KSpec{{Bisection{Word::gen(0, 1), full}, Bisection{Word::gen(0, -1), full}}};
}

// middle rows lo..hi of the level-n tower, re-based at row lo
static Multisection odometer_rows(const TransformationGroupoid& g, int n, long long lo,
                                  long long hi) {
    auto base = odometer_castle(g, n).ms[0];
    ClopenSet dom = base.level((int)lo);
    std::vector<Bisection> col;
    for (long long i = lo; i <= hi; ++i)
        col.push_back(Bisection{i == lo ? Word::identity() : Word::gen(0, i - lo), dom});
    auto m = Multisection::from_column(g, std::move(col), 0);
    return m;
}

// fixture whose generator E agrees with A on [000] and with B on [001]:
// A swaps [00] and [01], B flips the first bit, C flips the first two
static TransformationGroupoid routing_fixture() {
    GeneratorAction A{"A", {{"00", "01"}, {"01", "00"}, {"10", "10"}, {"11", "11"}}, {}};
    GeneratorAction B{"B", {{"0", "1"}, {"1", "0"}}, {}};
    GeneratorAction C{"C", {{"00", "11"}, {"01", "10"}, {"10", "01"}, {"11", "00"}}, {}};
    GeneratorAction E{"E",
                      {{"000", "010"},
                       {"001", "101"},
                       {"010", "000"},
                       {"101", "001"},
                       {"011", "011"},
                       {"100", "100"},
                       {"110", "110"},
                       {"111", "111"}},
                      {}};
    return TransformationGroupoid(Alphabet("01"), {A, B, C, E});
}

TEST_CASE("germ agreement distinguishes words by their pointwise action") {
    auto g = routing_fixture();
    auto A = g.parse_word("A"), B = g.parse_word("B"), E = g.parse_word("E");
    ClopenSet c00 = ClopenSet::cylinder(g.alphabet(), "00");
    CHECK(germ_agreement(g, E, A, c00, 8).words() == std::vector<std::string>{"000"});
    CHECK(germ_agreement(g, E, B, c00, 8).words() == std::vector<std::string>{"001"});
    CHECK(germ_agreement(g, A, A, c00, 8).words() == c00.words());
    // A^2 acts as the identity even though the word is nontrivial
    CHECK(equal(germ_agreement(g, A * A, Word::identity(), c00, 8), c00));
    auto go = odo();
    auto T = go.parse_word("T");
    CHECK(germ_agreement(go, T, Word::identity(), ClopenSet::full(go.alphabet()), 12)
              .is_empty());
}

TEST_CASE("odometer castle passes verification") {
    auto g = odo();
    for (int n : {2, 3, 5}) {
        auto c = odometer_castle(g, n);
        CHECK(c.ms[0].size() == (1 << n));
        auto rep = verify_castle(g, c);
        CHECK(rep.valid);
        CHECK(equal(c.unit_union(g), ClopenSet::full(g.alphabet())));
    }
    CHECK(verify_castle(g, Castle{}).valid);
}

TEST_CASE("castle violations are named") {
    auto g = odo();
    // overlapping levels across multisections
    Castle bad;
    bad.ms.push_back(odometer_rows(g, 3, 0, 3));
    bad.ms.push_back(odometer_rows(g, 3, 2, 5));
    auto rep = verify_castle(g, bad);
    CHECK(!rep.valid);
    CHECK(rep.violation.find("overlap") != std::string::npos);

    // explicit matrix with a broken product law
    auto A = g.alphabet();
    ClopenSet l0 = ClopenSet::cylinder(A, "00"), l1 = ClopenSet::cylinder(A, "01");
    std::vector<Bisection> m = {
        Bisection{Word::identity(), l0}, Bisection{Word::gen(0, 3), l1},  // wrong ladder
        Bisection{Word::gen(0, 1), l0}, Bisection{Word::identity(), l1}};
    Castle bad2;
    bad2.ms.push_back(Multisection::from_matrix(g, 2, m));
    auto rep2 = verify_castle(g, bad2);
    CHECK(!rep2.valid);
}

TEST_CASE("extendability of the trimmed tower") {
    auto g = odo();
    auto K = shift_ball(g);
    for (int n : {3, 4}) {
        Castle C;
        C.ms.push_back(odometer_rows(g, n, 1, (1 << n) - 2));
        auto D = odometer_castle(g, n);
        CHECK(verify_extendable(g, C, D, K).valid);
        // trivial: C extendable to itself under units only
        CHECK(verify_extendable(g, C, C, KSpec{{}}).valid);
        // overshoot: the full-height shift escapes the tower
        KSpec big{{Bisection{Word::gen(0, 1LL << n), ClopenSet::full(g.alphabet())}}};
        auto rep = verify_extendable(g, C, D, big);
        CHECK(!rep.valid);
    }
    // levels that are not hosted at all
    Castle stray;
    stray.ms.push_back(odometer_rows(g, 2, 0, 3));
    CHECK(!verify_extendable(g, stray, odometer_castle(g, 3), K).valid);
}

TEST_CASE("splitting routes a level along a bisection") {
    auto g = routing_fixture();
    ClopenSet c00 = ClopenSet::cylinder(g.alphabet(), "00");
    auto D = Multisection::from_column(
        g, {Bisection{Word::identity(), c00}, Bisection{g.parse_word("A"), c00},
            Bisection{g.parse_word("B"), c00}, Bisection{g.parse_word("C"), c00}},
        0);
    auto C = Multisection::from_column(g, {Bisection{Word::identity(), c00}}, 0);
    Bisection M{g.parse_word("E"), c00};

    // precondition: C extendable to D for a compact set containing M
    Castle Cc, Dc;
    Cc.ms.push_back(C);
    Dc.ms.push_back(D);
    CHECK(verify_extendable(g, Cc, Dc, KSpec{{M}}).valid);

    auto sp = split_castle_along_bisection(g, C, D, M, 0, 8);
    CHECK(sp.rows == std::vector<int>{1, 2});
    CHECK(verify_castle(g, sp.A).valid);
    CHECK(verify_castle(g, sp.B).valid);
    // unit unions preserved
    CHECK(equal(sp.A.unit_union(g), c00));
    CHECK(equal(sp.B.unit_union(g), Dc.unit_union(g)));
    // M routes each piece onto the predicted target ladder range
    CHECK(equal(g.apply_word(M.w, sp.A.ms[0].level(0)), sp.B.ms[0].level(1)));
    CHECK(equal(g.apply_word(M.w, sp.A.ms[1].level(0)), sp.B.ms[1].level(2)));

    // degenerate splits: a single-word route and the identity route
    auto sp2 = split_castle_along_bisection(g, C, D, Bisection{g.parse_word("A"), c00}, 0, 8);
    CHECK(sp2.rows == std::vector<int>{1});
    CHECK(equal(sp2.A.ms[0].level(0), c00));
    auto sp3 =
        split_castle_along_bisection(g, C, D, Bisection{Word::identity(), c00}, 0, 8);
    CHECK(sp3.rows == std::vector<int>{0});

    // un-routable bisection
    auto g2 = odo();
    ClopenSet z = ClopenSet::cylinder(g2.alphabet(), "00");
    auto D2 = Multisection::from_column(
        g2, {Bisection{Word::identity(), z}, Bisection{Word::gen(0, 1), z}}, 0);
    auto C2 = Multisection::from_column(g2, {Bisection{Word::identity(), z}}, 0);
    CHECK_THROWS(split_castle_along_bisection(g2, C2, D2, Bisection{Word::gen(0, 2), z}, 0,
                                              12));
}

TEST_CASE("nesting multiplicity of stacked odometer towers") {
    auto g = odo(12);
    for (int n = 1; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m) {
            auto inner = odometer_castle(g, n + m);
            auto outer = odometer_castle(g, n);
            auto res = check_nesting(g, inner, outer);
            REQUIRE(res.ok);
            CHECK(res.multiplicity == (1 << m));
            CHECK(res.assignment == std::vector<int>{0});
        }
    // castle in itself
    auto c = odometer_castle(g, 3);
    auto self = check_nesting(g, c, c);
    REQUIRE(self.ok);
    CHECK(self.multiplicity == 1);
    // straddling inner level
    Castle inner;
    ClopenSet l = ClopenSet::cylinder(g.alphabet(), "0");
    inner.ms.push_back(Multisection::from_column(g, {Bisection{Word::identity(), l}}, 0));
    auto badres = check_nesting(g, inner, odometer_castle(g, 2));
    CHECK(!badres.ok);
    CHECK(badres.failure.find("not contained") != std::string::npos);
}

TEST_CASE("fiberwise defect ratios") {
    auto g = odo(12);
    auto K = shift_ball(g);
    Rat prev;
    for (int n = 3; n <= 6; ++n) {
        auto rep = verify_matui(g, odometer_castle(g, n), K, Rat(1) / 2);
        CHECK(rep.covering);
        CHECK(rep.max_ratio == Rat(2) / Rat(1LL << n));
        if (n > 3) CHECK(rep.max_ratio == prev / 2);
        prev = rep.max_ratio;
    }
    // units-only window
    auto rep0 = verify_matui(g, odometer_castle(g, 3), KSpec{{}}, Rat(1) / 100);
    CHECK(rep0.max_ratio == 0);
    CHECK(rep0.pass);
    // non-covering castle rejected
    Castle part;
    part.ms.push_back(odometer_rows(g, 3, 0, 3));
    CHECK(!verify_matui(g, part, K, Rat(1)).covering);
}

TEST_CASE("conversion of the odometer tower") {
    for (int n = 3; n <= 5; ++n) {
        auto g = TransformationGroupoid::binary_odometer(std::max(8, n + 2));
        auto K = shift_ball(g);
        auto mu = *invariant_measure_feasibility(
                       TransformationGroupoid::binary_odometer(n), n)
                       .unique;
        auto H = odometer_castle(g, n);
        auto res = convert_af_to_almost_elementary(g, H, K, Rat(1) / 4, &mu);
        CHECK(res.matui_ratio == Rat(2) / Rat(1LL << n));
        CHECK(verify_castle(g, res.W).valid);
        CHECK(verify_castle(g, res.Hdecomp).valid);
        CHECK(verify_extendable(g, res.W, res.Hdecomp, K).valid);
        REQUIRE(res.w_measure.has_value());
        CHECK(*res.w_measure == Rat(1) - Rat(2) / Rat(1LL << n));
        // f is constant here: one stable class of rows 1..2^n-2
        CHECK(res.W.ms.size() == 1);
        CHECK(res.W.ms[0].size() == (1 << n) - 2);
    }
}

TEST_CASE("conversion degenerate and two-class cases") {
    auto g = odo();
    auto H = odometer_castle(g, 3);
    // units-only K keeps everything
    auto res = convert_af_to_almost_elementary(g, H, KSpec{{}}, Rat(1) / 4);
    CHECK(res.W.ms.size() == 1);
    CHECK(res.W.ms[0].size() == 8);
    CHECK(res.remainder.is_empty());

    // a window whose domain cuts the fiber in two: f takes two values
    GeneratorAction B{"B", {{"0", "1"}, {"1", "0"}}, {}};
    TransformationGroupoid gb(Alphabet("01"), {B});
    ClopenSet l0 = ClopenSet::cylinder(gb.alphabet(), "0");
    Castle Hb;
    Hb.ms.push_back(Multisection::from_column(
        gb, {Bisection{Word::identity(), l0}, Bisection{Word::gen(0, 1), l0}}, 0));
    REQUIRE(verify_castle(gb, Hb).valid);
    KSpec Kb{{Bisection{Word::gen(0, 1),
                        unite(ClopenSet::cylinder(gb.alphabet(), "00"),
                              ClopenSet::cylinder(gb.alphabet(), "11"))}}};
    auto res2 = convert_af_to_almost_elementary(gb, Hb, Kb, Rat(3) / 4);
    CHECK(res2.W.ms.size() == 2);
    for (auto& m : res2.W.ms) CHECK(m.size() == 1);
    CHECK(verify_castle(gb, res2.W).valid);
    CHECK(verify_castle(gb, res2.Hdecomp).valid);
    // defect ratio exceeding the bound is an error
    CHECK_THROWS(convert_af_to_almost_elementary(g, H, shift_ball(g), Rat(1) / 8));
}

TEST_CASE("Z-action tower invariance") {
    auto g = odo();
    for (int n : {3, 4}) {
        std::vector<long long> S;
        for (long long v = 0; v < (1 << n); ++v) S.push_back(v);
        std::string base(n, '0');
        ClopenSet V = ClopenSet::cylinder(g.alphabet(), base);
        auto rep = verify_kerr_towers(g, {{S, V}}, {-1, 0, 1}, Rat(2) / Rat(1 << n));
        CHECK(rep.towers_disjoint);
        CHECK(rep.invariance_ratios[0] == Rat(1) - Rat(2) / Rat(1 << n));
        CHECK(rep.pass);
        auto rep1 = verify_kerr_towers(g, {{S, V}}, {0}, Rat(0));
        CHECK(rep1.invariance_ratios[0] == 1);
    }
    // overlapping towers
    std::vector<long long> S = {0, 1};
    ClopenSet V = ClopenSet::cylinder(g.alphabet(), "000");
    auto rep = verify_kerr_towers(g, {{S, V}, {{0}, V}}, {0}, Rat(0));
    CHECK(!rep.towers_disjoint);
    CHECK(!rep.violation.empty());
}

TEST_CASE("comparison search and witness verification") {
    auto g = odo(8);
    auto A = g.alphabet();
    ClopenSet U = ClopenSet::cylinder(A, "00"), V = ClopenSet::cylinder(A, "1");
    auto w = comparison_search(g, U, V, 2, 3);
    REQUIRE(w.has_value());
    CHECK(verify_comparison_witness(g, *w).valid);

    // subset case solved by identity routes
    auto w2 = comparison_search(g, ClopenSet::cylinder(A, "01"), ClopenSet::cylinder(A, "0"),
                                2, 3);
    REQUIRE(w2.has_value());
    for (auto& r : w2->routes) CHECK(r.w.is_identity());

    // measure obstruction: mu(U) > mu(V) admits no witness
    ClopenSet U3 = ClopenSet::cylinder(A, "0"), V3 = ClopenSet::cylinder(A, "10");
    CHECK(!comparison_search(g, U3, V3, 4, 5).has_value());
    auto mu = *invariant_measure_feasibility(TransformationGroupoid::binary_odometer(5), 5)
                   .unique;
    CHECK(evaluate(mu, U3) > evaluate(mu, V3));

    // tampered witnesses are rejected with named violations
    ComparisonWitness bad = *w;
    bad.routes.pop_back();
    CHECK(!verify_comparison_witness(g, bad).valid);
    ComparisonWitness bad2 = *w;
    for (auto& r : bad2.routes) r.dom = U;  // overlapping sources
    CHECK(!verify_comparison_witness(g, bad2).valid);
}

TEST_CASE("found witnesses respect measure monotonicity") {
    auto g = odo(8);
    auto A = g.alphabet();
    auto mu = *invariant_measure_feasibility(TransformationGroupoid::binary_odometer(5), 5)
                   .unique;
    std::mt19937 rng(21);
    int found = 0;
    for (int t = 0; t < 30; ++t) {
        int d = 3 + rng() % 2;
        std::vector<std::string> uw, vw;
        for (long long i = 0; i < (1 << d); ++i) {
            int r = rng() % 4;
            if (r == 0) uw.push_back(index_word(A, d, i));
            if (r == 1 || r == 2) vw.push_back(index_word(A, d, i));
        }
        ClopenSet U(A, d, uw), V(A, d, vw);
        if (U.is_empty() || V.is_empty()) continue;
        auto w = comparison_search(g, U, V, 4, 5);
        if (!w) continue;
        ++found;
        CHECK(verify_comparison_witness(g, *w).valid);
        CHECK(evaluate(mu, U) <= evaluate(mu, V));
    }
    CHECK(found > 5);
}
