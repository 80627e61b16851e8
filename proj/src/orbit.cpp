#include "horolab/orbit.hpp"

#include <algorithm>
#include <deque>

namespace horolab {

bool Word::is_reduced() const {
    for (size_t i = 1; i < letters.size(); i++)
        if (letters[i] == (letters[i - 1] ^ 1)) return false;
    return true;
}

Word Word::inverse() const {
    Word out;
    out.letters.reserve(letters.size());
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
        out.letters.push_back(std::int8_t(*it ^ 1));
    return out;
}

Word concat(const Word& u, const Word& v) {
    Word out = u;
    for (std::int8_t l : v.letters) {
        if (!out.letters.empty() && out.letters.back() == (l ^ 1))
            out.letters.pop_back();
        else
            out.letters.push_back(l);
    }
    return out;
}

bool word_less(const Word& a, const Word& b) {
    if (a.letters.size() != b.letters.size()) return a.letters.size() < b.letters.size();
    return a.letters < b.letters;
}

bool kernel_contains(const HomomorphismSpec& spec, const Word& w) {
    if (!w.is_reduced()) throw PreconditionError("kernel test requires a reduced word");
    if (spec.kind == HomomorphismSpec::Kind::exponent_sum) {
        long long sum = 0;
        for (std::int8_t l : w.letters) {
            int gen = l >> 1;
            if (gen >= int(spec.data.size())) throw PreconditionError("letter outside homomorphism domain");
            sum += (l & 1) ? -spec.data[gen] : spec.data[gen];
        }
        return sum == 0;
    }
    // free-factor projection: drop killed letters, freely reduce the rest
    std::vector<std::int8_t> image;
    for (std::int8_t l : w.letters) {
        int gen = l >> 1;
        if (gen >= int(spec.data.size())) throw PreconditionError("letter outside homomorphism domain");
        if (spec.data[gen] == 0) continue;
        if (!image.empty() && image.back() == (l ^ 1))
            image.pop_back();
        else
            image.push_back(l);
    }
    return image.empty();
}

Isometry word_to_isometry(const SchottkyPresentation& G, const Word& w) {
    Isometry g = Isometry::identity(G.model);
    for (std::int8_t l : w.letters) g = compose(g, G.letter_isometry(int(l)));
    return g;
}

namespace {

// Search nodes track w through y = w^{-1} z (one letter application per
// step, numerically stable at any radius) and the inverse matrix. The node
// for w is emitted as the orbit entry of w^{-1}: the ball is closed under
// inversion, so the emitted set is the full ball, and y is exactly the
// orbit point of the emitted element.
struct Node {
    Word word; // w, the inverse of the emitted element
    Isometry g_inv;
    HalfSpacePoint y; // w^{-1} z
    double dist;      // d(w z, z) = d(y, z)
};

void push_entry(OrbitSet& out, const Node& n, std::size_t max_entries) {
    out.entries.push_back(OrbitEntry{n.word.inverse(), n.g_inv, n.y, n.dist});
    if (out.entries.size() > max_entries)
        throw ResourceCapError("orbit ball exceeds the entry cap of " + std::to_string(max_entries));
}

Node extend(const SchottkyPresentation& G, const Node& node, int u, const HalfSpacePoint& z_hs) {
    Node child;
    child.word = node.word;
    child.word.letters.push_back(std::int8_t(u));
    child.g_inv = compose(G.letter_isometry(u ^ 1), node.g_inv);
    child.y = apply_hs(G.letter_isometry(u ^ 1), node.y);
    child.dist = hyperbolic_distance_hs(child.y, z_hs);
    return child;
}

// Certified DFS. All extensions w' of wu keep w'z behind the dome of
// g_w(target(u)), so d(w'z, z) = d(z, g_w(dome)) >= d(y_w, dome(target(u)))
// by isometry invariance: the prune bound is evaluated against the original
// cap, never an image cap.
void dfs(const SchottkyPresentation& G, const HalfSpacePoint& z_hs, double R, const Node& node,
         int last_letter, const std::vector<PlanarCircle>& target_circle, OrbitSet& out,
         std::size_t max_entries) {
    for (int u = 0; u < G.num_letters(); u++) {
        if (last_letter >= 0 && u == (last_letter ^ 1)) continue;
        if (circle_prune_bound(node.y, target_circle[u]) > R) continue;
        Node child = extend(G, node, u, z_hs);
        dfs(G, z_hs, R, child, u, target_circle, out, max_entries);
        if (child.dist <= R) push_entry(out, child, max_entries);
    }
}

// Frontier search for asserted-free presentations: expand while the parent
// stays within R + slack. Heuristically complete; validated against brute
// force at small radii.
void frontier(const SchottkyPresentation& G, const HalfSpacePoint& z_hs, double R, OrbitSet& out,
              std::size_t max_entries) {
    double expand_limit = R + G.frontier_slack;
    std::deque<Node> queue;
    queue.push_back(Node{Word{}, Isometry::identity(G.model), z_hs, 0.0});
    while (!queue.empty()) {
        Node node = std::move(queue.front());
        queue.pop_front();
        int last = node.word.empty() ? -1 : node.word.letters.back();
        for (int u = 0; u < G.num_letters(); u++) {
            if (last >= 0 && u == (last ^ 1)) continue;
            Node child = extend(G, node, u, z_hs);
            if (child.dist <= R) push_entry(out, child, max_entries);
            if (child.dist <= expand_limit) {
                queue.push_back(std::move(child));
                if (queue.size() + out.entries.size() > max_entries)
                    throw ResourceCapError("frontier exceeds the entry cap of " +
                                           std::to_string(max_entries));
            }
        }
    }
}

} // namespace

OrbitSet enumerate_orbit(const SchottkyPresentation& G, const InteriorPoint& z, double R,
                         std::size_t max_entries) {
    if (R <= 0) throw PreconditionError("orbit radius must be positive");
    z.check();
    OrbitSet out;
    out.basepoint = z;
    out.base_hs = ball_to_halfspace(z);
    out.radius = R;
    out.model = G.model;
    out.num_generators = G.rank();
    out.certified = G.ball_certified;

    Node root{Word{}, Isometry::identity(G.model), out.base_hs, 0.0};
    if (G.ball_certified) {
        std::vector<PlanarCircle> target_circle;
        for (int l = 0; l < G.num_letters(); l++) {
            if (behind_cap(z, G.letter_source(l)))
                throw PreconditionError("basepoint lies inside a pairing dome; move it");
            target_circle.push_back(cap_to_circle(G.letter_target(l)));
        }
        dfs(G, out.base_hs, R, root, -1, target_circle, out, max_entries);
        push_entry(out, root, max_entries);
    } else {
        push_entry(out, root, max_entries);
        frontier(G, out.base_hs, R, out, max_entries);
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const OrbitEntry& a, const OrbitEntry& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return word_less(a.word, b.word);
    });
    out.complete = true;
    return out;
}

OrbitSet suborbit(const OrbitSet& orbit, const HomomorphismSpec& spec) {
    OrbitSet out = orbit;
    out.entries.clear();
    for (const OrbitEntry& e : orbit.entries)
        if (kernel_contains(spec, e.word)) out.entries.push_back(e);
    return out;
}

} // namespace horolab
