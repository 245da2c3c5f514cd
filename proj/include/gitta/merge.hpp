#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "gitta/template.hpp"

namespace gitta {

// One element of a merged template together with the input ranges it covers.
struct Segment {
    enum class Kind : std::uint8_t {
        exact,  // identical element in both inputs
        known,  // both ranges are known values of an existing slot
        gap,    // differing run, becomes a fresh slot
    };
    Kind kind = Kind::gap;
    std::size_t a_begin = 0, a_end = 0;
    std::size_t b_begin = 0, b_end = 0;
    SlotId slot = 0;  // only for Kind::known
};

struct MergeResult {
    Template merged;
    // Parallel to merged.elements: the subsequence of each input covered by
    // that element. Concatenating one side reproduces that input.
    std::vector<Template> first;
    std::vector<Template> second;
};

namespace detail {

struct Score {
    int exact = 0;
    int known = 0;
    int gaps = 0;

    friend bool operator==(const Score&, const Score&) = default;
    friend Score operator+(Score x, const Score& y) {
        x.exact += y.exact;
        x.known += y.known;
        x.gaps += y.gaps;
        return x;
    }
};

// More shared elements first, then more known-slot matches, then fewer gaps.
inline bool better(const Score& x, const Score& y) {
    if (x.exact != y.exact) return x.exact > y.exact;
    if (x.known != y.known) return x.known > y.known;
    return x.gaps < y.gaps;
}

// For every start position, the (slot, length) pairs whose range is either
// the slot itself or one of its known values.
using SpanList = std::vector<std::pair<SlotId, std::size_t>>;

inline std::vector<SpanList> known_spans(const Template& x, const SlotValueMap& known) {
    std::vector<SpanList> spans(x.size() + 1);
    if (known.empty()) return spans;
    for (const auto& [slot, values] : known) {
        for (std::size_t i = 0; i <= x.size(); ++i) {
            std::vector<std::size_t> lens;
            if (i < x.size() && is_slot(x[i]) && slot_id(x[i]) == slot) lens.push_back(1);
            for (const auto& v : values) {
                if (i + v.size() > x.size()) continue;
                if (std::equal(v.begin(), v.end(), x.elements.begin() + static_cast<std::ptrdiff_t>(i)))
                    lens.push_back(v.size());
            }
            std::sort(lens.begin(), lens.end());
            lens.erase(std::unique(lens.begin(), lens.end()), lens.end());
            for (auto len : lens) spans[i].emplace_back(slot, len);
        }
    }
    return spans;
}

// Longest-common-subsequence alignment over elements where each maximal run
// of differing elements collapses into one slot. Among optimal alignments the
// one with the lexicographically smallest merged element sequence wins, which
// makes the result independent of argument order.
class Aligner {
public:
    Aligner(const Template& a, const Template& b, const SlotValueMap& known)
        : a_(a), b_(b), n_(a.size()), m_(b.size()), spans_a_(known_spans(a, known)), spans_b_(known_spans(b, known)) {}

    std::vector<Segment> run() {
        fill_best();
        return reconstruct();
    }

private:
    enum class Move : std::uint8_t { none, exact, known, skip_a, skip_b };

    struct Transition {
        Move move;
        std::size_t target;
        Score score;
        SlotId slot = 0;
        std::size_t la = 0, lb = 0;
    };

    std::size_t index(std::size_t i, std::size_t j, int g) const { return (i * (m_ + 1) + j) * 2 + static_cast<std::size_t>(g); }
    std::size_t row(std::size_t s) const { return s / 2 / (m_ + 1); }
    std::size_t col(std::size_t s) const { return s / 2 % (m_ + 1); }
    int in_gap(std::size_t s) const { return static_cast<int>(s % 2); }

    template <class F>
    void for_each_transition(std::size_t s, F&& f) const {
        const std::size_t i = row(s), j = col(s);
        const int g = in_gap(s);
        if (i < n_ && j < m_ && a_[i] == b_[j]) f(Transition{Move::exact, index(i + 1, j + 1, 0), Score{1, 0, 0}});
        for (const auto& [sa, la] : spans_a_[i]) {
            for (const auto& [sb, lb] : spans_b_[j]) {
                if (sa != sb || la + lb == 0) continue;
                // Spanning both templates whole says nothing about their alignment.
                const bool whole = i == 0 && j == 0 && la == n_ && lb == m_;
                f(Transition{Move::known, index(i + la, j + lb, 0), whole ? Score{0, 0, 1} : Score{0, 1, 0}, sa, la, lb});
            }
        }
        const Score open = g == 0 ? Score{0, 0, 1} : Score{};
        if (i < n_) f(Transition{Move::skip_a, index(i + 1, j, 1), open});
        if (j < m_) f(Transition{Move::skip_b, index(i, j + 1, 1), open});
    }

    void fill_best() {
        best_.assign(index(n_, m_, 1) + 1, Score{});
        for (std::size_t i = n_ + 1; i-- > 0;) {
            for (std::size_t j = m_ + 1; j-- > 0;) {
                for (int g = 0; g < 2; ++g) {
                    const std::size_t s = index(i, j, g);
                    if (i == n_ && j == m_) continue;
                    std::optional<Score> top;
                    for_each_transition(s, [&](const Transition& t) {
                        Score total = t.score + best_[t.target];
                        if (!top || better(total, *top)) top = total;
                    });
                    best_[s] = *top;
                }
            }
        }
    }

    bool optimal(std::size_t s, const Transition& t) const { return t.score + best_[t.target] == best_[s]; }

    // Symbol emitted by a transition: (kind rank, element). Skips inside a gap
    // emit nothing.
    struct Symbol {
        int rank;
        Element element;
        friend bool operator<(const Symbol& x, const Symbol& y) {
            if (x.rank != y.rank) return x.rank < y.rank;
            return x.element < y.element;
        }
        friend bool operator==(const Symbol&, const Symbol&) = default;
    };

    std::optional<Symbol> symbol_of(std::size_t s, const Transition& t) const {
        switch (t.move) {
            case Move::exact: return Symbol{0, a_[row(s)]};
            case Move::known: return Symbol{1, Slot{t.slot}};
            default:
                if (in_gap(s)) return std::nullopt;
                return Symbol{2, Slot{0}};
        }
    }

    std::vector<Segment> reconstruct() {
        const std::size_t total = best_.size();
        parent_.assign(total, std::numeric_limits<std::size_t>::max());
        via_.assign(total, Transition{Move::none, 0, Score{}});
        std::vector<bool> seen(total, false);

        std::vector<std::size_t> frontier{index(0, 0, 0)};
        seen[frontier.front()] = true;
        close(frontier, seen);

        while (true) {
            std::sort(frontier.begin(), frontier.end());
            for (auto s : frontier)
                if (row(s) == n_ && col(s) == m_) return segments_to(s);

            std::optional<Symbol> chosen;
            for (auto s : frontier) {
                for_each_transition(s, [&](const Transition& t) {
                    if (!optimal(s, t)) return;
                    auto sym = symbol_of(s, t);
                    if (sym && (!chosen || *sym < *chosen)) chosen = sym;
                });
            }
            std::vector<std::size_t> next;
            for (auto s : frontier) {
                for_each_transition(s, [&](const Transition& t) {
                    if (!optimal(s, t) || seen[t.target]) return;
                    auto sym = symbol_of(s, t);
                    if (!sym || !(*sym == *chosen)) return;
                    seen[t.target] = true;
                    parent_[t.target] = s;
                    via_[t.target] = t;
                    next.push_back(t.target);
                });
            }
            close(next, seen);
            frontier = std::move(next);
        }
    }

    // Extend with states reachable by optimal silent skips.
    void close(std::vector<std::size_t>& states, std::vector<bool>& seen) {
        for (std::size_t k = 0; k < states.size(); ++k) {
            const std::size_t s = states[k];
            if (!in_gap(s)) continue;
            for_each_transition(s, [&](const Transition& t) {
                if ((t.move != Move::skip_a && t.move != Move::skip_b) || !optimal(s, t) || seen[t.target]) return;
                seen[t.target] = true;
                parent_[t.target] = s;
                via_[t.target] = t;
                states.push_back(t.target);
            });
        }
    }

    std::vector<Segment> segments_to(std::size_t end) const {
        std::vector<Segment> out;
        std::size_t s = end;
        std::optional<Segment> open_gap;
        const std::size_t start = index(0, 0, 0);
        while (s != start) {
            const std::size_t p = parent_[s];
            const Transition& t = via_[s];
            const std::size_t pi = row(p), pj = col(p), si = row(s), sj = col(s);
            if (t.move == Move::skip_a || t.move == Move::skip_b) {
                if (!open_gap) open_gap = Segment{Segment::Kind::gap, pi, si, pj, sj, 0};
                open_gap->a_begin = pi;
                open_gap->b_begin = pj;
                if (!in_gap(p)) {
                    out.push_back(*open_gap);
                    open_gap.reset();
                }
            } else {
                out.push_back(Segment{t.move == Move::exact ? Segment::Kind::exact : Segment::Kind::known, pi, si, pj, sj,
                                      t.slot});
            }
            s = p;
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

    const Template& a_;
    const Template& b_;
    std::size_t n_, m_;
    std::vector<SpanList> spans_a_, spans_b_;
    std::vector<Score> best_;
    std::vector<std::size_t> parent_;
    std::vector<Transition> via_;
};

inline Template slice(const Template& t, std::size_t begin, std::size_t end) {
    return Template(std::vector<Element>(t.elements.begin() + static_cast<std::ptrdiff_t>(begin),
                                         t.elements.begin() + static_cast<std::ptrdiff_t>(end)));
}

}  // namespace detail

// Segments of the most specific common generalization of `a` and `b`.
// `known` lets ranges that are recorded values of an existing slot align
// under that slot. An alignment longer than both inputs is rejected in favour
// of a single slot covering everything.
inline std::vector<Segment> align_templates(const Template& a, const Template& b, const SlotValueMap& known = {}) {
    if (a.empty() && b.empty()) return {};
    auto segments = detail::Aligner(a, b, known).run();
    if (segments.size() > std::max(a.size(), b.size()))
        segments = {Segment{Segment::Kind::gap, 0, a.size(), 0, b.size(), 0}};
    return segments;
}

inline MergeResult merge_templates(const Template& a, const Template& b, SlotIdSource& ids, const SlotValueMap& known = {}) {
    MergeResult result;
    for (const auto& seg : align_templates(a, b, known)) {
        switch (seg.kind) {
            case Segment::Kind::exact: result.merged.elements.push_back(a[seg.a_begin]); break;
            case Segment::Kind::known: result.merged.elements.push_back(Slot{seg.slot}); break;
            case Segment::Kind::gap: result.merged.elements.push_back(Slot{ids.fresh()}); break;
        }
        result.first.push_back(detail::slice(a, seg.a_begin, seg.a_end));
        result.second.push_back(detail::slice(b, seg.b_begin, seg.b_end));
    }
    return result;
}

// Fresh slots are numbered above every id used by either input.
inline MergeResult merge_templates(const Template& a, const Template& b) {
    SlotIdSource ids;
    if (has_slots(a)) ids.reserve_above(max_slot_id(a));
    if (has_slots(b)) ids.reserve_above(max_slot_id(b));
    return merge_templates(a, b, ids);
}

// d(a, b) = max(l_a, l_b) - l_m + s_m - min(s_a, s_b), where l counts tokens,
// s counts slots and m is the merged template. Templates with adjacent slots
// can push the raw value below zero; it is clamped there.
inline std::size_t distance(const Template& a, const Template& b) {
    long l_m = 0, s_m = 0;
    for (const auto& seg : align_templates(a, b)) {
        if (seg.kind == Segment::Kind::exact && is_token(a[seg.a_begin]))
            ++l_m;
        else
            ++s_m;
    }
    const long la = static_cast<long>(token_count(a)), lb = static_cast<long>(token_count(b));
    const long sa = static_cast<long>(slot_count(a)), sb = static_cast<long>(slot_count(b));
    const long d = std::max(la, lb) - l_m + s_m - std::min(sa, sb);
    return static_cast<std::size_t>(std::max(0L, d));
}

// Decides whether `seq` is derivable from slot `s` under a slot value map.
class ValueRecognizer {
public:
    explicit ValueRecognizer(const SlotValueMap& values) : values_(values) {}

    bool derives(SlotId s, const Template& seq) { return derives(s, seq, 0); }

private:
    static constexpr int max_depth = 64;

    bool derives(SlotId s, const Template& seq, int depth) {
        if (seq.size() == 1 && is_slot(seq[0]) && slot_id(seq[0]) == s) return true;
        if (depth > max_depth) return false;
        auto key = std::make_pair(s, seq);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        memo_[key] = false;  // cycles never derive anything new
        bool ok = false;
        if (auto it = values_.find(s); it != values_.end()) {
            for (const auto& v : it->second) {
                if (matches(v, seq, depth)) {
                    ok = true;
                    break;
                }
            }
        }
        memo_[key] = ok;
        return ok;
    }

    bool matches(const Template& value, const Template& seq, int depth) {
        // reach[i][j]: value[0, i) derives seq[0, j)
        const std::size_t n = value.size(), m = seq.size();
        std::vector<std::vector<char>> reach(n + 1, std::vector<char>(m + 1, 0));
        reach[0][0] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= m; ++j) {
                if (!reach[i][j]) continue;
                if (is_token(value[i])) {
                    if (j < m && seq[j] == value[i]) reach[i + 1][j + 1] = 1;
                    continue;
                }
                for (std::size_t k = j; k <= m; ++k) {
                    if (!reach[i + 1][k] && derives(slot_id(value[i]), detail::slice(seq, j, k), depth + 1))
                        reach[i + 1][k] = 1;
                }
            }
        }
        return reach[n][m] != 0;
    }

    const SlotValueMap& values_;
    std::map<std::pair<SlotId, Template>, bool> memo_;
};

// Scores the range a parent slot covers in a child; nullopt forbids it.
using SpanScorer = std::function<std::optional<int>(SlotId, const Template&)>;

// Aligns `child` under `parent`: parent tokens must match exactly, parent
// slots cover contiguous (possibly empty) ranges. Returns the covered range
// for each parent element, maximizing the scorer's total; ties go to shorter
// ranges for earlier slots. nullopt when the child is not derivable.
inline std::optional<std::vector<Template>> align_child(const Template& parent, const Template& child, const SpanScorer& scorer) {
    const std::size_t p = parent.size(), c = child.size();
    constexpr int none = std::numeric_limits<int>::min();
    // best[i][j]: best score aligning parent[i:] to child[j:]; choice = range end
    std::vector<std::vector<int>> best(p + 1, std::vector<int>(c + 1, none));
    std::vector<std::vector<std::size_t>> choice(p + 1, std::vector<std::size_t>(c + 1, 0));
    best[p][c] = 0;
    for (std::size_t i = p; i-- > 0;) {
        for (std::size_t j = 0; j <= c; ++j) {
            if (is_token(parent[i])) {
                if (j < c && child[j] == parent[i] && best[i + 1][j + 1] != none) {
                    best[i][j] = best[i + 1][j + 1];
                    choice[i][j] = j + 1;
                }
                continue;
            }
            for (std::size_t k = j; k <= c; ++k) {
                if (best[i + 1][k] == none) continue;
                auto sc = scorer(slot_id(parent[i]), detail::slice(child, j, k));
                if (!sc) continue;
                const int total = *sc + best[i + 1][k];
                if (total > best[i][j]) {
                    best[i][j] = total;
                    choice[i][j] = k;
                }
            }
        }
    }
    if (best[0][0] == none) return std::nullopt;
    std::vector<Template> covered;
    std::size_t j = 0;
    for (std::size_t i = 0; i < p; ++i) {
        const std::size_t k = choice[i][j];
        covered.push_back(detail::slice(child, j, k));
        j = k;
    }
    return covered;
}

// Alignment used for reading slot values off a parent/child edge: a slot
// preferably covers itself, then a range already recorded in `hints`, and
// never a range that merely contains itself.
inline std::optional<std::vector<Template>> align_for_values(const Template& parent, const Template& child,
                                                            const SlotValueMap& hints = {}) {
    return align_child(parent, child, [&hints](SlotId s, const Template& range) -> std::optional<int> {
        if (range.size() == 1 && is_slot(range[0]) && slot_id(range[0]) == s) return 2;
        if (contains_slot(range, s)) return -1000;
        if (auto it = hints.find(s); it != hints.end() && it->second.count(range)) return 1;
        return 0;
    });
}

inline bool generalizes(const Template& parent, const Template& child) {
    return align_child(parent, child, [](SlotId, const Template&) -> std::optional<int> { return 0; }).has_value();
}

}  // namespace gitta
