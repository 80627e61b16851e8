#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace horolab;
using namespace horolab::testsupport;

TEST_CASE("schottky construction: valid, cyclic, overlap rejected") {
    SchottkyPresentation G = make_schottky2();
    CHECK(G.rank() == 2);
    CHECK(G.ball_certified);

    SchottkyPresentation C = make_cyclic();
    CHECK(C.rank() == 1);

    const double pi = 3.14159265358979323846;
    std::vector<GeneratorPairing> bad{
        {disk_cap(pi / 4, 0.9), disk_cap(5 * pi / 4, 0.9)},
        {disk_cap(3 * pi / 4, 0.9), disk_cap(7 * pi / 4, 0.9)},
    };
    CHECK_THROWS_AS(build_schottky(Model::disk, bad), ConfigError);
}

TEST_CASE("kleinian free product construction") {
    SchottkyPresentation G = make_expl1();
    CHECK(G.rank() == 3);
    CHECK(G.ball_certified);
}

TEST_CASE("identity-only orbit below the shortest translation length") {
    SchottkyPresentation C = make_cyclic();
    double ell = axis_data(C.generators[0]).translation_length;
    OrbitSet orb = enumerate_orbit(C, origin(Model::disk), ell * 0.5);
    CHECK(orb.entries.size() == 1);
    CHECK(orb.entries[0].word.empty());
}

TEST_CASE("cyclic orbit on the axis: counts and distances") {
    SchottkyPresentation C = make_cyclic();
    AxisData ax = axis_data(C.generators[0]);
    double ell = ax.translation_length;
    // origin lies on the axis by symmetry of the pairing caps
    GeodesicLine axis{ax.repelling, ax.attracting};
    CHECK(project_to_line(axis, origin(Model::disk)).distance < 1e-9);

    for (double R : {3.0, 7.5, 20.0}) {
        OrbitSet orb = enumerate_orbit(C, origin(Model::disk), R);
        int expect = 2 * int(std::floor(R / ell)) + 1;
        CHECK(int(orb.entries.size()) == expect);
        for (const auto& e : orb.entries) {
            int k = 0;
            for (auto l : e.word.letters) k += (l & 1) ? -1 : 1;
            CHECK(std::abs(e.dist - std::abs(k) * ell) < 1e-9);
        }
    }
}

TEST_CASE("pruned enumeration equals brute force at R = 8") {
    for (const SchottkyPresentation& G : {make_schottky2(), make_expl1()}) {
        InteriorPoint z = origin(G.model);
        OrbitSet pruned = enumerate_orbit(G, z, 8.0);
        OrbitSet brute = brute_force_orbit(G, z, 8.0);
        CHECK(brute.entries.size() > 1);
        CHECK(same_orbit(pruned, brute));
    }
    // off-origin basepoint too
    SchottkyPresentation G = make_schottky2();
    InteriorPoint z{{0.1, -0.05, 0}, Model::disk};
    CHECK(same_orbit(enumerate_orbit(G, z, 8.0), brute_force_orbit(G, z, 8.0)));
}

TEST_CASE("orbit count monotone in R, entries sorted, within radius") {
    SchottkyPresentation G = make_schottky2();
    size_t prev = 0;
    for (double R : {2.0, 4.0, 6.0, 8.0}) {
        OrbitSet orb = enumerate_orbit(G, origin(Model::disk), R);
        CHECK(orb.entries.size() >= prev);
        prev = orb.entries.size();
        for (size_t i = 0; i < orb.entries.size(); i++) {
            CHECK(orb.entries[i].dist <= R);
            if (i) CHECK(orb.entries[i - 1].dist <= orb.entries[i].dist);
        }
    }
}

TEST_CASE("resource cap raises") {
    SchottkyPresentation G = make_schottky2();
    CHECK_THROWS_AS(enumerate_orbit(G, origin(Model::disk), 10.0, 50), ResourceCapError);
}

TEST_CASE("kernel membership under free-factor projection and exponent sum") {
    HomomorphismSpec proj = expl1_projection();
    CHECK(kernel_contains(proj, Word{}));
    // a0 b1 a0^{-1}: image b1, not trivial
    Word w1{{0, 2, 1}};
    CHECK_FALSE(kernel_contains(proj, w1));
    // a0 b1 a0 b1^{-1}: image b1 b1^{-1} = e
    Word w2{{0, 2, 0, 3}};
    CHECK(kernel_contains(proj, w2));

    HomomorphismSpec expsum{HomomorphismSpec::Kind::exponent_sum, {1, 0, 0}};
    CHECK(kernel_contains(expsum, Word{}));
    CHECK_FALSE(kernel_contains(expsum, Word{{0}}));
    CHECK(kernel_contains(expsum, Word{{0, 2, 1, 2}}));
    CHECK_THROWS_AS(kernel_contains(expsum, Word{{0, 1}}), PreconditionError);
}

TEST_CASE("suborbit: trivial spec keeps all, exponent sum on cyclic keeps identity") {
    SchottkyPresentation C = make_cyclic();
    OrbitSet orb = enumerate_orbit(C, origin(Model::disk), 12.0);
    HomomorphismSpec trivial{HomomorphismSpec::Kind::exponent_sum, {0}};
    CHECK(suborbit(orb, trivial).entries.size() == orb.entries.size());
    HomomorphismSpec expsum{HomomorphismSpec::Kind::exponent_sum, {1}};
    OrbitSet sub = suborbit(orb, expsum);
    CHECK(sub.entries.size() == 1);
    CHECK(sub.entries[0].word.empty());
}

TEST_CASE("suborbit survivors equal brute-force zero-image count") {
    SchottkyPresentation G = make_expl1();
    OrbitSet orb = enumerate_orbit(G, origin(Model::ball3), 8.0);
    HomomorphismSpec proj = expl1_projection();
    OrbitSet sub = suborbit(orb, proj);
    OrbitSet brute = brute_force_orbit(G, origin(Model::ball3), 8.0);
    size_t count = 0;
    for (const auto& e : brute.entries)
        if (kernel_contains(proj, e.word)) count++;
    CHECK(sub.entries.size() == count);
    // closure under inversion
    for (const auto& e : sub.entries) {
        Word inv = e.word.inverse();
        bool found = false;
        for (const auto& f : sub.entries)
            if (word_equal(f.word, inv)) found = true;
        CHECK(found);
    }
}

TEST_CASE("normality witness: conjugates of kernel words stay in the kernel") {
    Rng rng(41);
    HomomorphismSpec proj = expl1_projection();
    for (int i = 0; i < 200; i++) {
        Word w = random_reduced_word(rng, 6, int(rng.next_below(8)));
        // kernel element: commutator-style a0 u a0^{-1} u^{-1} with u in G1
        Word u = random_reduced_word(rng, 6, 3);
        Word n = concat(concat(Word{{0}}, u), concat(Word{{1}}, u.inverse()));
        if (!kernel_contains(proj, n)) continue;
        Word conj = concat(concat(w, n), w.inverse());
        CHECK(kernel_contains(proj, conj));
    }
}

TEST_CASE("axis data: diagonal, trace formula, conjugation invariance") {
    double e = std::exp(1.0);
    Isometry g{cplx(e), cplx(0), cplx(0), cplx(1 / e), Model::disk};
    g.normalize();
    AxisData ax = axis_data(g);
    CHECK(ax.translation_length == doctest::Approx(2.0).epsilon(1e-10));
    // halfspace 0 and infinity map to the ball points (-1,0,0) and (1,0,0)
    CHECK(chordal_distance(ax.repelling, BoundaryPoint{{-1, 0, 0}, Model::disk}) < 1e-9);
    CHECK(chordal_distance(ax.attracting, BoundaryPoint{{1, 0, 0}, Model::disk}) < 1e-9);

    Isometry A{cplx(1), cplx(1), cplx(1), cplx(2), Model::disk};
    A.normalize();
    CHECK(axis_data(A).translation_length ==
          doctest::Approx(2.0 * std::acosh(1.5)).epsilon(1e-10));

    Rng rng(43);
    SchottkyPresentation G = make_schottky2();
    for (int i = 0; i < 20; i++) {
        // determinant rounding costs ~eps*|h|^4 of trace accuracy, so longer
        // conjugators get a looser bound
        int len = 1 + i % 4;
        double tol = len <= 2 ? 1e-9 : 1e-5;
        Word w = random_reduced_word(rng, 4, len);
        Isometry h = word_to_isometry(G, w);
        Isometry gg = G.generators[i % 2];
        AxisData a1 = axis_data(gg);
        AxisData a2 = axis_data(compose(compose(h, gg), h.inverse()));
        CHECK(std::abs(a1.translation_length - a2.translation_length) < tol);
        CHECK(chordal_distance(apply(h, a1.attracting), a2.attracting) < tol);
        CHECK(chordal_distance(apply(h, a1.repelling), a2.repelling) < tol);
    }

    Isometry parab{cplx(1), cplx(1), cplx(0), cplx(1), Model::disk};
    CHECK_THROWS_AS(axis_data(parab), PreconditionError);
}

TEST_CASE("punctured torus: commutator trace and frontier vs brute force") {
    SchottkyPresentation P = make_punctured_torus();
    Isometry A = P.generators[0], B = P.generators[1];
    Isometry comm = compose(compose(A, B), compose(A.inverse(), B.inverse()));
    CHECK(comm.trace().real() == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(std::abs(comm.trace().imag()) < 1e-12);

    // brute force is length-capped here, so compare below the cap only
    const int cap = 13;
    InteriorPoint z = origin(Model::disk);
    OrbitSet frontier = enumerate_orbit(P, z, 6.0);
    OrbitSet brute = brute_force_orbit(P, z, 6.0, cap);
    auto find_in = [](const OrbitSet& o, const Word& w) {
        for (const auto& e : o.entries)
            if (word_equal(e.word, w)) return &e;
        return (const OrbitEntry*)nullptr;
    };
    for (const auto& e : brute.entries) {
        const OrbitEntry* f = find_in(frontier, e.word);
        REQUIRE(f != nullptr);
        CHECK(std::abs(f->dist - e.dist) < 1e-10);
    }
    for (const auto& e : frontier.entries)
        if (e.word.length() <= cap) CHECK(find_in(brute, e.word) != nullptr);
}

TEST_CASE("words: reduction, inverse, concat") {
    Word w{{0, 2, 1}};
    CHECK(w.is_reduced());
    CHECK_FALSE(Word{{0, 1}}.is_reduced());
    CHECK(word_equal(concat(w, w.inverse()), Word{}));
    CHECK(word_equal(concat(Word{{0, 2}}, Word{{3, 1}}), Word{}));
    CHECK(word_less(Word{{5}}, Word{{0, 0}}));
    CHECK(word_less(Word{{0, 1}}, Word{{0, 2}}));
}
