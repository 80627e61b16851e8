#pragma once

#include <cstdint>
#include <vector>

#include "horolab/schottky.hpp"

namespace horolab {

// Reduced word in the letter encoding of SchottkyPresentation: letter l acts
// by generators[l >> 1], inverted when l & 1; the inverse letter is l ^ 1.
struct Word {
    std::vector<std::int8_t> letters;

    bool empty() const { return letters.empty(); }
    int length() const { return int(letters.size()); }
    bool is_reduced() const;
    Word inverse() const;
};

// Reduced product uv.
Word concat(const Word& u, const Word& v);
bool word_less(const Word& a, const Word& b); // length, then lexicographic
inline bool word_equal(const Word& a, const Word& b) { return a.letters == b.letters; }

struct HomomorphismSpec {
    enum class Kind { free_factor_projection, exponent_sum };
    Kind kind = Kind::exponent_sum;
    // projection: keep[i] != 0 keeps generator i, 0 kills it;
    // exponent sum: image integer of generator i.
    std::vector<int> data;
};

bool kernel_contains(const HomomorphismSpec& spec, const Word& w);

struct OrbitEntry {
    Word word;
    Isometry g;
    HalfSpacePoint gz; // half-space coordinates survive far into the orbit
    double dist = 0;   // d(g z, z)
};

struct OrbitSet {
    InteriorPoint basepoint;
    HalfSpacePoint base_hs;
    double radius = 0;
    bool complete = false;
    bool certified = false; // enumerated with exact pruning (or brute force)
    Model model = Model::ball3;
    int num_generators = 0;
    std::vector<OrbitEntry> entries; // sorted by (dist, word length, lex)

    InteriorPoint entry_ball_point(std::size_t i) const {
        return halfspace_to_ball(entries[i].gz, model);
    }
};

// Orbit ball of radius R around z. Ball-certified presentations use exact
// branch-and-bound pruning; free-by-assertion ones fall back to a frontier
// search with the presentation's slack.
OrbitSet enumerate_orbit(const SchottkyPresentation& G, const InteriorPoint& z, double R,
                         std::size_t max_entries = 10'000'000);

OrbitSet suborbit(const OrbitSet& orbit, const HomomorphismSpec& spec);

Isometry word_to_isometry(const SchottkyPresentation& G, const Word& w);

} // namespace horolab
