#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "meandim/rational.hpp"

namespace meandim {

using Word = std::vector<int>;

/// Subshift of finite type given by allowed 2-blocks. The transition graph must
/// be essential: every symbol has a successor and a predecessor.
class Sft {
public:
    Sft(std::vector<std::string> alphabet, const std::vector<std::pair<int, int>>& allowed);

    static Sft full_shift(int symbols);
    /// {0,1}^Z without "11".
    static Sft golden_mean();

    std::size_t size() const { return alphabet_.size(); }
    const std::vector<std::string>& alphabet() const { return alphabet_; }
    const std::string& label(int s) const { return alphabet_.at(static_cast<std::size_t>(s)); }
    int symbol(const std::string& label) const;
    bool allowed(int a, int b) const { return allowed_[static_cast<std::size_t>(a) * size() + static_cast<std::size_t>(b)]; }
    const std::vector<int>& successors(int a) const { return succ_[static_cast<std::size_t>(a)]; }
    const std::vector<int>& predecessors(int a) const { return pred_[static_cast<std::size_t>(a)]; }

    bool admissible(const Word& w) const;
    /// All admissible words of the given length in lexicographic order.
    std::vector<Word> words(std::size_t length) const;
    std::vector<std::pair<int, int>> allowed_pairs() const;

    std::string spell(const Word& w) const;

private:
    std::vector<std::string> alphabet_;
    std::vector<bool> allowed_;
    std::vector<std::vector<int>> succ_, pred_;
};

/// Clopen set: the points whose coordinates on [lo, lo+len) form one of `words`.
/// len = 0 with the empty word is the whole space; no words is the empty set.
struct CylinderSet {
    std::int64_t lo = 0;
    std::size_t len = 0;
    std::set<Word> words;

    bool empty() const { return words.empty(); }
    std::int64_t hi() const { return lo + static_cast<std::int64_t>(len); }
    /// Membership of a point given on a window [wlo, wlo + w.size()) covering [lo, hi).
    bool contains(std::int64_t wlo, const Word& w) const;
};

CylinderSet whole_space();
CylinderSet empty_set();
/// [word at offset]; the word must be admissible.
CylinderSet cylinder(const Sft& s, std::int64_t offset, const Word& word);
/// Same set over a larger window.
CylinderSet extend(const Sft& s, const CylinderSet& a, std::int64_t lo, std::size_t len);
CylinderSet unite(const Sft& s, const CylinderSet& a, const CylinderSet& b);
CylinderSet intersect(const Sft& s, const CylinderSet& a, const CylinderSet& b);
CylinderSet subtract(const Sft& s, const CylinderSet& a, const CylinderSet& b);
CylinderSet complement(const Sft& s, const CylinderSet& a);
bool subset(const Sft& s, const CylinderSet& a, const CylinderSet& b);
bool same_set(const Sft& s, const CylinderSet& a, const CylinderSet& b);

/// Higher-block presentation: vertices are admissible words of length
/// max(len, 1); a vertex has weight 1 when its word lies in the set.
struct BlockGraph {
    std::vector<Word> vertices;
    std::vector<std::vector<std::size_t>> succ;
    std::vector<int> weight;
};
BlockGraph block_graph(const Sft& s, const CylinderSet& a);

/// sup_y Σ_{n<N} 1_A(S^n y).
std::int64_t max_visits(const Sft& s, const CylinderSet& a, std::int64_t n);
/// max_visits / N.
Rational ocap_finite_N(const Sft& s, const CylinderSet& a, std::int64_t n);

struct OcapLimit {
    Rational value;
    /// Periodic orbit realizing the value (one period, as symbols).
    Word witness;
    std::size_t graph_size = 0;
};
/// Maximum mean cycle of the block graph (Karp), with a witness cycle.
OcapLimit ocap_limit(const Sft& s, const CylinderSet& a);

struct Neighborhood {
    CylinderSet set;
    Rational ocap;
    std::size_t depth = 0;
    std::vector<Rational> ocap_by_depth;
};
/// For clopen E the neighborhood is E itself.
Neighborhood ocap_neighborhood(const Sft& s, const CylinderSet& e, const Rational& delta);
/// E = ∩ levels for a decreasing family; returns the shallowest level whose
/// ocap is within delta of the deepest one.
Neighborhood ocap_neighborhood_nested(const Sft& s, const std::vector<CylinderSet>& levels, const Rational& delta);

struct CoverRefinement {
    std::vector<CylinderSet> pieces;  // E_i
    CylinderSet complement;
    OcapLimit complement_ocap;
};
/// E_i = V_i minus the earlier V_j. Throws with an uncovered word when the
/// V_i do not cover the space.
CoverRefinement sbp_cover_refine(const Sft& s, const std::vector<CylinderSet>& cover, const Rational& delta);

/// Finite window of a sequence: coordinates lo .. lo + values.size() - 1.
struct Window {
    std::int64_t lo = 0;
    Vec values;
    std::int64_t hi() const { return lo + static_cast<std::int64_t>(values.size()); }
};

struct WindowDistance {
    Rational value;       // exact over the window
    Rational tail_bound;  // what coordinates outside the window could add
    Rational upper() const { return value + tail_bound; }
};

/// max_{0<=n<N} Σ_i 2^{-|i-n|} diffs[i - lo] with the tail bound for unseen
/// coordinates (each difference at most 1). Needs the window to cover [0, N).
WindowDistance weighted_window_distance(std::int64_t lo, const Vec& diffs, std::int64_t n);
/// d_N for ρ(x,y) = Σ 2^{-|n|} |x_n - y_n|.
WindowDistance rho_N(const Window& x, const Window& y, std::int64_t n);
/// d_N for ρ'(x,y) = Σ 2^{-|n|} [x_n != y_n] on symbol windows.
WindowDistance rho_prime_N(std::int64_t lo, const Word& x, const Word& y, std::int64_t n);

/// 2-adic odometer at level k: U = {z : z ≡ 0 mod 2^k}; only z mod 2^k = r
/// matters for return times.
struct OdometerTower {
    int k = 0;
    explicit OdometerTower(int level);
    std::int64_t period() const { return std::int64_t{1} << k; }
    std::int64_t L() const { return period() - 1; }
    std::int64_t L_prime() const { return period() + 1; }
    /// max E(z) ∩ (-inf, x].
    std::int64_t previous(std::int64_t r, std::int64_t x) const;
    /// min E(z) ∩ [x, inf).
    std::int64_t next(std::int64_t r, std::int64_t x) const;
};

/// E(z) ∩ [a, b) = {n : n ≡ -r mod 2^k}.
std::vector<std::int64_t> odometer_E(const OdometerTower& t, std::int64_t r, std::int64_t a, std::int64_t b);

nlohmann::json to_json(const Sft& s);
Sft sft_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Sft& s, const CylinderSet& c);
CylinderSet cylinder_from_json(const Sft& s, const nlohmann::json& j);

}  // namespace meandim
