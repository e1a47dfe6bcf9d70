#include "meandim/symdyn.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

#include "meandim/error.hpp"

namespace meandim {

Sft::Sft(std::vector<std::string> alphabet, const std::vector<std::pair<int, int>>& allowed)
    : alphabet_(std::move(alphabet))
{
    const std::size_t n = alphabet_.size();
    if (n == 0)
        throw PreconditionError("empty language (no symbols)");
    {
        auto sorted = alphabet_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw PreconditionError("duplicate alphabet symbol");
    }
    allowed_.assign(n * n, false);
    succ_.assign(n, {});
    pred_.assign(n, {});
    for (auto [a, b] : allowed) {
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
            throw PreconditionError("transition uses an unknown symbol");
        allowed_[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] = true;
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (allowed_[a * n + b]) {
                succ_[a].push_back(static_cast<int>(b));
                pred_[b].push_back(static_cast<int>(a));
            }
    for (std::size_t a = 0; a < n; ++a)
        if (succ_[a].empty() || pred_[a].empty())
            throw PreconditionError("transition graph is not essential: symbol \"" + alphabet_[a] +
                                        "\" lacks a successor or predecessor",
                                    {{"symbol", alphabet_[a]}});
}

Sft Sft::full_shift(int symbols)
{
    std::vector<std::string> a;
    std::vector<std::pair<int, int>> t;
    for (int i = 0; i < symbols; ++i) {
        a.push_back(std::to_string(i));
        for (int j = 0; j < symbols; ++j)
            t.emplace_back(i, j);
    }
    return Sft(a, t);
}

Sft Sft::golden_mean()
{
    return Sft({"0", "1"}, {{0, 0}, {0, 1}, {1, 0}});
}

int Sft::symbol(const std::string& label) const
{
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        if (alphabet_[i] == label)
            return static_cast<int>(i);
    throw PreconditionError("unknown symbol \"" + label + "\"");
}

bool Sft::admissible(const Word& w) const
{
    for (int s : w)
        if (s < 0 || static_cast<std::size_t>(s) >= size())
            return false;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (!allowed(w[i - 1], w[i]))
            return false;
    return true;
}

std::vector<Word> Sft::words(std::size_t length) const
{
    std::vector<Word> out;
    if (length == 0) {
        out.emplace_back();
        return out;
    }
    for (std::size_t a = 0; a < size(); ++a)
        out.push_back({static_cast<int>(a)});
    for (std::size_t l = 1; l < length; ++l) {
        std::vector<Word> next;
        for (const auto& w : out)
            for (int b : successors(w.back())) {
                Word x = w;
                x.push_back(b);
                next.push_back(std::move(x));
            }
        out = std::move(next);
        if (out.size() > 5'000'000)
            throw BudgetError("too many admissible words", {{"length", length}});
    }
    return out;
}

std::vector<std::pair<int, int>> Sft::allowed_pairs() const
{
    std::vector<std::pair<int, int>> out;
    for (std::size_t a = 0; a < size(); ++a)
        for (int b : succ_[a])
            out.emplace_back(static_cast<int>(a), b);
    return out;
}

std::string Sft::spell(const Word& w) const
{
    std::string s;
    const bool single = std::all_of(alphabet_.begin(), alphabet_.end(), [](const auto& l) { return l.size() == 1; });
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!single && i > 0)
            s += ' ';
        s += label(w[i]);
    }
    return s;
}

bool CylinderSet::contains(std::int64_t wlo, const Word& w) const
{
    if (words.empty())
        return false;
    if (len == 0)
        return true;
    if (wlo > lo || wlo + static_cast<std::int64_t>(w.size()) < hi())
        throw PreconditionError("window does not cover the cylinder coordinates");
    const auto from = w.begin() + (lo - wlo);
    return words.count(Word(from, from + static_cast<std::ptrdiff_t>(len))) > 0;
}

CylinderSet whole_space()
{
    CylinderSet c;
    c.words.insert(Word{});
    return c;
}

CylinderSet empty_set()
{
    return CylinderSet{};
}

CylinderSet cylinder(const Sft& s, std::int64_t offset, const Word& word)
{
    if (!s.admissible(word))
        throw PreconditionError("cylinder word \"" + s.spell(word) + "\" is not in the language");
    CylinderSet c;
    c.lo = offset;
    c.len = word.size();
    c.words.insert(word);
    return c;
}

CylinderSet extend(const Sft& s, const CylinderSet& a, std::int64_t lo, std::size_t len)
{
    const std::int64_t hi = lo + static_cast<std::int64_t>(len);
    CylinderSet out;
    out.lo = lo;
    out.len = len;
    if (a.words.empty())
        return out;
    if (a.len == 0) {
        for (auto& w : s.words(len))
            out.words.insert(std::move(w));
        return out;
    }
    if (lo > a.lo || hi < a.hi())
        throw PreconditionError("extension window must contain the original window");
    const std::size_t left = static_cast<std::size_t>(a.lo - lo);
    const std::size_t right = static_cast<std::size_t>(hi - a.hi());
    std::vector<Word> cur(a.words.begin(), a.words.end());
    for (std::size_t i = 0; i < left; ++i) {
        std::vector<Word> next;
        for (const auto& w : cur)
            for (int p : s.predecessors(w.front())) {
                Word x;
                x.reserve(w.size() + 1);
                x.push_back(p);
                x.insert(x.end(), w.begin(), w.end());
                next.push_back(std::move(x));
            }
        cur = std::move(next);
    }
    for (std::size_t i = 0; i < right; ++i) {
        std::vector<Word> next;
        for (const auto& w : cur)
            for (int q : s.successors(w.back())) {
                Word x = w;
                x.push_back(q);
                next.push_back(std::move(x));
            }
        cur = std::move(next);
    }
    for (auto& w : cur)
        out.words.insert(std::move(w));
    return out;
}

namespace {

std::pair<CylinderSet, CylinderSet> common(const Sft& s, const CylinderSet& a, const CylinderSet& b)
{
    // empty sets and the whole space adapt to the other window
    std::int64_t lo, hi;
    const bool a_free = a.words.empty() || a.len == 0;
    const bool b_free = b.words.empty() || b.len == 0;
    if (a_free && b_free) {
        lo = 0;
        hi = 0;
    } else if (a_free) {
        lo = b.lo;
        hi = b.hi();
    } else if (b_free) {
        lo = a.lo;
        hi = a.hi();
    } else {
        lo = std::min(a.lo, b.lo);
        hi = std::max(a.hi(), b.hi());
    }
    const auto len = static_cast<std::size_t>(hi - lo);
    return {extend(s, a, lo, len), extend(s, b, lo, len)};
}

}  // namespace

CylinderSet unite(const Sft& s, const CylinderSet& a, const CylinderSet& b)
{
    auto [x, y] = common(s, a, b);
    x.words.insert(y.words.begin(), y.words.end());
    return x;
}

CylinderSet intersect(const Sft& s, const CylinderSet& a, const CylinderSet& b)
{
    auto [x, y] = common(s, a, b);
    CylinderSet out;
    out.lo = x.lo;
    out.len = x.len;
    std::set_intersection(x.words.begin(), x.words.end(), y.words.begin(), y.words.end(),
                          std::inserter(out.words, out.words.end()));
    return out;
}

CylinderSet subtract(const Sft& s, const CylinderSet& a, const CylinderSet& b)
{
    auto [x, y] = common(s, a, b);
    CylinderSet out;
    out.lo = x.lo;
    out.len = x.len;
    std::set_difference(x.words.begin(), x.words.end(), y.words.begin(), y.words.end(),
                        std::inserter(out.words, out.words.end()));
    return out;
}

CylinderSet complement(const Sft& s, const CylinderSet& a)
{
    return subtract(s, whole_space(), a);
}

bool subset(const Sft& s, const CylinderSet& a, const CylinderSet& b)
{
    return subtract(s, a, b).empty();
}

bool same_set(const Sft& s, const CylinderSet& a, const CylinderSet& b)
{
    return subset(s, a, b) && subset(s, b, a);
}

BlockGraph block_graph(const Sft& s, const CylinderSet& a)
{
    const std::size_t l = std::max<std::size_t>(a.len, 1);
    BlockGraph g;
    g.vertices = s.words(l);
    std::map<Word, std::size_t> index;
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        index.emplace(g.vertices[i], i);
    g.succ.resize(g.vertices.size());
    g.weight.resize(g.vertices.size());
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        const auto& w = g.vertices[i];
        if (a.words.empty())
            g.weight[i] = 0;
        else if (a.len == 0)
            g.weight[i] = 1;
        else
            g.weight[i] = a.words.count(w) ? 1 : 0;
        for (int q : s.successors(w.back())) {
            Word x(w.begin() + 1, w.end());
            x.push_back(q);
            g.succ[i].push_back(index.at(x));
        }
        std::sort(g.succ[i].begin(), g.succ[i].end());
    }
    return g;
}

std::int64_t max_visits(const Sft& s, const CylinderSet& a, std::int64_t n)
{
    if (n < 1)
        throw PreconditionError("N must be >= 1");
    if (a.words.empty())
        return 0;
    const auto g = block_graph(s, a);
    const std::size_t v = g.vertices.size();
    std::vector<std::int64_t> best(v), next(v);
    for (std::size_t i = 0; i < v; ++i)
        best[i] = g.weight[i];
    for (std::int64_t step = 1; step < n; ++step) {
        std::fill(next.begin(), next.end(), std::numeric_limits<std::int64_t>::min());
        for (std::size_t i = 0; i < v; ++i)
            for (auto j : g.succ[i])
                next[j] = std::max(next[j], best[i] + g.weight[j]);
        std::swap(best, next);
    }
    return *std::max_element(best.begin(), best.end());
}

Rational ocap_finite_N(const Sft& s, const CylinderSet& a, std::int64_t n)
{
    return make_rational(max_visits(s, a, n), n);
}

OcapLimit ocap_limit(const Sft& s, const CylinderSet& a)
{
    const auto g = block_graph(s, a);
    const std::size_t n = g.vertices.size();
    constexpr std::int64_t neg = std::numeric_limits<std::int64_t>::min() / 4;

    // Karp: D[k][v] = max weight of a k-edge walk ending at v (free start).
    std::vector<std::vector<std::int64_t>> d(n + 1, std::vector<std::int64_t>(n, neg));
    std::fill(d[0].begin(), d[0].end(), 0);
    for (std::size_t k = 1; k <= n; ++k)
        for (std::size_t u = 0; u < n; ++u) {
            if (d[k - 1][u] == neg)
                continue;
            for (auto v : g.succ[u])
                d[k][v] = std::max(d[k][v], d[k - 1][u] + g.weight[u]);
        }
    std::optional<Rational> best;
    for (std::size_t v = 0; v < n; ++v) {
        if (d[n][v] == neg)
            continue;
        std::optional<Rational> worst;
        for (std::size_t k = 0; k < n; ++k) {
            if (d[k][v] == neg)
                continue;
            Rational r = make_rational(d[n][v] - d[k][v], static_cast<std::int64_t>(n - k));
            if (!worst || r < *worst)
                worst = r;
        }
        if (worst && (!best || *worst > *best))
            best = worst;
    }
    OcapLimit out;
    out.value = *best;
    out.graph_size = n;

    // Witness: a cycle of tight edges for the reweighting q w - p.
    const std::int64_t p = out.value.get_num().get_si(), q = out.value.get_den().get_si();
    std::vector<std::int64_t> pot(n, 0);
    for (std::size_t round = 0; round < n; ++round) {
        bool changed = false;
        for (std::size_t u = 0; u < n; ++u)
            for (auto v : g.succ[u]) {
                const std::int64_t cand = pot[u] + q * g.weight[u] - p;
                if (cand > pot[v]) {
                    pot[v] = cand;
                    changed = true;
                }
            }
        if (!changed)
            break;
    }
    std::vector<std::vector<std::size_t>> tight(n);
    for (std::size_t u = 0; u < n; ++u)
        for (auto v : g.succ[u])
            if (pot[u] + q * g.weight[u] - p == pot[v])
                tight[u].push_back(v);

    auto shortest_cycle = [&](std::size_t c) -> std::vector<std::size_t> {
        std::vector<std::size_t> parent(n, n);
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> queue;
        for (auto v : tight[c]) {
            if (v == c)
                return {c};
            if (!seen[v]) {
                seen[v] = true;
                parent[v] = c;
                queue.push_back(v);
            }
        }
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop_front();
            for (auto v : tight[u]) {
                if (v == c) {
                    std::vector<std::size_t> path;
                    for (auto x = u; x != c; x = parent[x])
                        path.push_back(x);
                    path.push_back(c);
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                if (!seen[v]) {
                    seen[v] = true;
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        return {};
    };
    for (std::size_t c = 0; c < n; ++c) {
        auto cycle = shortest_cycle(c);
        if (cycle.empty())
            continue;
        if (out.value > 0) {
            auto first = std::find_if(cycle.begin(), cycle.end(), [&](auto v) { return g.weight[v] == 1; });
            std::rotate(cycle.begin(), first, cycle.end());
        }
        for (auto v : cycle)
            out.witness.push_back(g.vertices[v].front());
        break;
    }
    return out;
}

Neighborhood ocap_neighborhood(const Sft& s, const CylinderSet& e, const Rational& delta)
{
    if (delta <= 0)
        throw PreconditionError("delta must be positive");
    Neighborhood n;
    n.set = e;
    n.ocap = ocap_limit(s, e).value;
    n.ocap_by_depth = {n.ocap};
    return n;
}

Neighborhood ocap_neighborhood_nested(const Sft& s, const std::vector<CylinderSet>& levels, const Rational& delta)
{
    if (delta <= 0)
        throw PreconditionError("delta must be positive");
    if (levels.empty())
        throw PreconditionError("nested family is empty");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (!subset(s, levels[i], levels[i - 1]))
            throw PreconditionError("family is not decreasing at depth " + std::to_string(i + 1));
    Neighborhood n;
    for (const auto& l : levels)
        n.ocap_by_depth.push_back(ocap_limit(s, l).value);
    const Rational target = n.ocap_by_depth.back();
    for (std::size_t d = 0; d < levels.size(); ++d)
        if (n.ocap_by_depth[d] < target + delta) {
            n.set = levels[d];
            n.ocap = n.ocap_by_depth[d];
            n.depth = d + 1;
            return n;
        }
    throw PreconditionError("ocap bound unreachable at depth cap");
}

CoverRefinement sbp_cover_refine(const Sft& s, const std::vector<CylinderSet>& cover, const Rational& delta)
{
    if (delta <= 0)
        throw PreconditionError("delta must be positive");
    if (cover.empty())
        throw PreconditionError("cover is empty");
    CylinderSet all = empty_set();
    for (const auto& v : cover)
        all = unite(s, all, v);
    const auto missing = complement(s, all);
    if (!missing.empty()) {
        const auto& w = *missing.words.begin();
        throw PreconditionError("not a cover: word \"" + s.spell(w) + "\" at offset " + std::to_string(missing.lo) +
                                    " is uncovered",
                                {{"offset", missing.lo}, {"word", s.spell(w)}});
    }
    CoverRefinement r;
    CylinderSet before = empty_set();
    for (const auto& v : cover) {
        r.pieces.push_back(subtract(s, v, before));
        before = unite(s, before, v);
    }
    CylinderSet covered = empty_set();
    for (const auto& e : r.pieces)
        covered = unite(s, covered, e);
    r.complement = complement(s, covered);
    r.complement_ocap = ocap_limit(s, r.complement);
    if (!(r.complement_ocap.value < delta))
        throw ObligationError("complement ocap is not below delta");
    return r;
}

WindowDistance weighted_window_distance(std::int64_t lo, const Vec& diffs, std::int64_t n)
{
    if (n < 1)
        throw PreconditionError("N must be >= 1");
    const std::int64_t hi = lo + static_cast<std::int64_t>(diffs.size());
    if (lo > 0 || hi < n)
        throw PreconditionError("insufficient window: need coordinates [0, " + std::to_string(n) + ")",
                                {{"required_lo", 0}, {"required_hi", n}, {"lo", lo}, {"hi", hi}});
    const std::size_t w = diffs.size();
    const Rational half = make_rational(1, 2);
    // left[i] = Σ_{j<=i} 2^{-(i-j)} d_j, right[i] = Σ_{j>i} 2^{-(j-i)} d_j
    Vec left(w), right(w);
    for (std::size_t i = 0; i < w; ++i)
        left[i] = (i ? left[i - 1] * half : Rational(0)) + diffs[i];
    for (std::size_t i = w; i-- > 0;)
        right[i] = i + 1 < w ? (right[i + 1] + diffs[i + 1]) * half : Rational(0);
    WindowDistance out{0, 0};
    for (std::int64_t s = 0; s < n; ++s) {
        const auto i = static_cast<std::size_t>(s - lo);
        const Rational v = left[i] + right[i];
        if (v > out.value)
            out.value = v;
        const Rational tail = pow2(-(s - lo)) + pow2(-(hi - s) + 1);
        if (tail > out.tail_bound)
            out.tail_bound = tail;
    }
    return out;
}

WindowDistance rho_N(const Window& x, const Window& y, std::int64_t n)
{
    if (x.lo != y.lo || x.values.size() != y.values.size())
        throw PreconditionError("windows differ");
    Vec d(x.values.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = abs(x.values[i] - y.values[i]);
    return weighted_window_distance(x.lo, d, n);
}

WindowDistance rho_prime_N(std::int64_t lo, const Word& x, const Word& y, std::int64_t n)
{
    if (x.size() != y.size())
        throw PreconditionError("windows differ");
    Vec d(x.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = x[i] != y[i] ? 1 : 0;
    return weighted_window_distance(lo, d, n);
}

OdometerTower::OdometerTower(int level) : k(level)
{
    if (level < 0 || level > 40)
        throw PreconditionError("odometer level must be in [0, 40]");
}

namespace {

std::int64_t residue_target(const OdometerTower& t, std::int64_t r)
{
    if (r < 0 || r >= t.period())
        throw PreconditionError("residue out of range [0, 2^k)");
    return (t.period() - r) % t.period();
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b)
{
    const std::int64_t m = a % b;
    return m < 0 ? m + b : m;
}

}  // namespace

std::int64_t OdometerTower::previous(std::int64_t r, std::int64_t x) const
{
    const std::int64_t c = residue_target(*this, r);
    return x - floor_mod(x - c, period());
}

std::int64_t OdometerTower::next(std::int64_t r, std::int64_t x) const
{
    const std::int64_t c = residue_target(*this, r);
    return x + floor_mod(c - x, period());
}

std::vector<std::int64_t> odometer_E(const OdometerTower& t, std::int64_t r, std::int64_t a, std::int64_t b)
{
    std::vector<std::int64_t> out;
    if (b <= a) {
        residue_target(t, r);
        return out;
    }
    for (std::int64_t n = t.next(r, a); n < b; n += t.period())
        out.push_back(n);
    return out;
}

nlohmann::json to_json(const Sft& s)
{
    nlohmann::json allowed = nlohmann::json::array();
    for (auto [a, b] : s.allowed_pairs())
        allowed.push_back({s.label(a), s.label(b)});
    return {{"alphabet", s.alphabet()}, {"allowed", allowed}};
}

namespace {

std::string label_of(const nlohmann::json& j)
{
    if (j.is_string())
        return j.get<std::string>();
    if (j.is_number_integer())
        return std::to_string(j.get<std::int64_t>());
    throw PreconditionError("symbols must be strings or integers");
}

Word word_of(const Sft& s, const nlohmann::json& j)
{
    Word w;
    if (j.is_string()) {
        // "0101" for single-character alphabets
        for (char ch : j.get<std::string>())
            w.push_back(s.symbol(std::string(1, ch)));
        return w;
    }
    for (const auto& x : j)
        w.push_back(s.symbol(label_of(x)));
    return w;
}

}  // namespace

Sft sft_from_json(const nlohmann::json& j)
{
    try {
        std::vector<std::string> alphabet;
        for (const auto& a : j.at("alphabet"))
            alphabet.push_back(label_of(a));
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < alphabet.size(); ++i)
            index[alphabet[i]] = static_cast<int>(i);
        std::vector<std::pair<int, int>> allowed;
        for (const auto& pair : j.at("allowed")) {
            if (!pair.is_array() || pair.size() != 2)
                throw PreconditionError("allowed 2-blocks must be pairs");
            const auto a = index.find(label_of(pair[0]));
            const auto b = index.find(label_of(pair[1]));
            if (a == index.end() || b == index.end())
                throw PreconditionError("transition uses an unknown symbol");
            allowed.emplace_back(a->second, b->second);
        }
        return Sft(alphabet, allowed);
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("malformed SFT JSON: ") + e.what());
    }
}

nlohmann::json to_json(const Sft& s, const CylinderSet& c)
{
    nlohmann::json words = nlohmann::json::array();
    for (const auto& w : c.words) {
        nlohmann::json labels = nlohmann::json::array();
        for (int x : w)
            labels.push_back(s.label(x));
        words.push_back(labels);
    }
    return {{"lo", c.lo}, {"len", c.len}, {"words", words}};
}

CylinderSet cylinder_from_json(const Sft& s, const nlohmann::json& j)
{
    try {
        if (j.is_object() && j.contains("words")) {
            CylinderSet c;
            c.lo = j.at("lo").get<std::int64_t>();
            c.len = j.at("len").get<std::size_t>();
            for (const auto& w : j.at("words")) {
                Word word = word_of(s, w);
                if (word.size() != c.len || !s.admissible(word))
                    throw PreconditionError("cylinder word does not fit the window or the language");
                c.words.insert(std::move(word));
            }
            return c;
        }
        const auto& list = j.is_object() ? j.at("cylinders") : j;
        if (j.is_object() && j.value("whole", false))
            return whole_space();
        CylinderSet c = empty_set();
        for (const auto& cyl : list)
            c = unite(s, c, cylinder(s, cyl.at("offset").get<std::int64_t>(), word_of(s, cyl.at("word"))));
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("malformed cylinder JSON: ") + e.what());
    }
}

}  // namespace meandim
