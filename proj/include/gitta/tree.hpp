#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "gitta/error.hpp"
#include "gitta/merge.hpp"
#include "gitta/template.hpp"

namespace gitta {

// Node of a template tree. Leaves hold the (whitespace-normalized) input
// sentences; every inner node's template generalizes its children.
struct TemplateTreeNode {
    Template tmpl;
    std::vector<TemplateTreeNode> children;
    std::optional<std::string> leaf_text;

    bool is_leaf() const { return leaf_text.has_value(); }

    friend bool operator==(const TemplateTreeNode&, const TemplateTreeNode&) = default;
};

inline TemplateTreeNode make_leaf(const std::string& text) {
    TemplateTreeNode leaf;
    leaf.tmpl = tokenize(text);
    leaf.leaf_text = normalize_whitespace(text);
    return leaf;
}

inline void collect_leaves(const TemplateTreeNode& node, std::vector<std::string>& out) {
    if (node.is_leaf()) out.push_back(*node.leaf_text);
    for (const auto& c : node.children) collect_leaves(c, out);
}

// Sorted leaf texts below `node`.
inline std::vector<std::string> leaf_texts(const TemplateTreeNode& node) {
    std::vector<std::string> out;
    collect_leaves(node, out);
    std::sort(out.begin(), out.end());
    return out;
}

// Edges on the longest root-to-leaf path; a lone leaf has height 0.
inline std::size_t height(const TemplateTreeNode& node) {
    std::size_t h = 0;
    for (const auto& c : node.children) h = std::max(h, height(c) + 1);
    return h;
}

inline std::size_t node_count(const TemplateTreeNode& node) {
    std::size_t n = 1;
    for (const auto& c : node.children) n += node_count(c);
    return n;
}

inline void reserve_ids(const TemplateTreeNode& node, SlotIdSource& ids) {
    if (has_slots(node.tmpl)) ids.reserve_above(max_slot_id(node.tmpl));
    for (const auto& c : node.children) reserve_ids(c, ids);
}

// True when every node's template derives each of its children's templates.
inline bool check_generalization(const TemplateTreeNode& node) {
    for (const auto& c : node.children)
        if (!generalizes(node.tmpl, c.tmpl) || !check_generalization(c)) return false;
    return true;
}

// Left fold of merge_templates over the children's templates.
inline Template merge_children(const TemplateTreeNode& node, SlotIdSource& ids, const SlotValueMap& known = {}) {
    if (node.children.empty()) return node.tmpl;
    Template acc = node.children.front().tmpl;
    for (std::size_t i = 1; i < node.children.size(); ++i)
        acc = merge_templates(acc, node.children[i].tmpl, ids, known).merged;
    return acc;
}

namespace detail {

struct TreeArena {
    std::vector<Template> templates;
    std::vector<std::vector<std::size_t>> children;
    std::vector<std::optional<std::string>> leaf;

    std::size_t add(Template t, std::optional<std::string> text) {
        templates.push_back(std::move(t));
        children.emplace_back();
        leaf.push_back(std::move(text));
        return templates.size() - 1;
    }

    TemplateTreeNode build(std::size_t id) const {
        TemplateTreeNode node;
        node.tmpl = templates[id];
        node.leaf_text = leaf[id];
        for (auto c : children[id]) node.children.push_back(build(c));
        return node;
    }
};

// Queue entry ordered by (distance, pair key) so argmin is reproducible.
struct PendingPair {
    std::size_t distance;
    std::string key_first, key_second;
    std::size_t first, second;

    friend bool operator>(const PendingPair& x, const PendingPair& y) {
        return std::tie(x.distance, x.key_first, x.key_second, x.first, x.second) >
               std::tie(y.distance, y.key_first, y.key_second, y.first, y.second);
    }
};

inline std::string pair_key(const Template& t) { return to_string(canonical(t), Notation::ascii); }

}  // namespace detail

inline TemplateTreeNode limit_height(TemplateTreeNode root, std::size_t max_height);

// Greedy agglomeration: every round merges all minimally distant pairs of
// active templates (skipping pairs whose members were already merged in the
// round) until a single active template remains.
inline TemplateTreeNode learn_template_tree(const std::vector<std::string>& texts,
                                            std::optional<std::size_t> max_height = std::nullopt) {
    std::set<std::string> distinct;
    for (const auto& t : texts) distinct.insert(normalize_whitespace(t));
    if (distinct.empty()) throw input_error("learn_template_tree: no input texts");

    detail::TreeArena arena;
    std::set<std::size_t> active;
    std::vector<std::string> keys;
    for (const auto& text : distinct) {
        active.insert(arena.add(tokenize(text), text));
        keys.push_back(detail::pair_key(arena.templates.back()));
    }

    std::priority_queue<detail::PendingPair, std::vector<detail::PendingPair>, std::greater<>> queue;
    auto enqueue = [&](std::size_t x, std::size_t y) {
        if (std::tie(keys[y], y) < std::tie(keys[x], x)) std::swap(x, y);
        queue.push({distance(arena.templates[x], arena.templates[y]), keys[x], keys[y], x, y});
    };
    for (auto x = active.begin(); x != active.end(); ++x)
        for (auto y = std::next(x); y != active.end(); ++y) enqueue(*x, *y);

    SlotIdSource ids;
    auto stale = [&](const detail::PendingPair& p) { return !active.count(p.first) || !active.count(p.second); };

    while (active.size() > 1) {
        while (!queue.empty() && stale(queue.top())) queue.pop();
        if (queue.empty()) throw invariant_error("learn_template_tree: merge queue exhausted");

        const std::size_t minimal = queue.top().distance;
        std::vector<detail::PendingPair> round;
        while (!queue.empty() && queue.top().distance == minimal) {
            if (!stale(queue.top())) round.push_back(queue.top());
            queue.pop();
        }

        std::vector<std::size_t> created;
        for (const auto& p : round) {
            if (stale(p)) continue;
            Template merged = merge_templates(arena.templates[p.first], arena.templates[p.second], ids).merged;
            auto same = std::find_if(created.begin(), created.end(),
                                     [&](std::size_t c) { return equivalent(arena.templates[c], merged); });
            std::size_t node;
            if (same != created.end()) {
                node = *same;
            } else {
                node = arena.add(std::move(merged), std::nullopt);
                keys.push_back(detail::pair_key(arena.templates[node]));
                created.push_back(node);
            }
            arena.children[node].push_back(p.first);
            arena.children[node].push_back(p.second);
            active.erase(p.first);
            active.erase(p.second);
        }

        for (auto c : created) {
            for (auto a : active) enqueue(c, a);
            active.insert(c);
        }
    }

    TemplateTreeNode root = arena.build(*active.begin());
    if (max_height) root = limit_height(std::move(root), *max_height);
    return root;
}

// Removes children whose leaves are all reachable through their siblings.
// Children are examined from fewest to most descendant leaves.
inline TemplateTreeNode prune_redundant_children(TemplateTreeNode node) {
    bool changed = true;
    while (changed && node.children.size() > 1) {
        changed = false;
        std::vector<std::vector<std::string>> leaves;
        for (const auto& c : node.children) leaves.push_back(leaf_texts(c));
        std::vector<std::size_t> order(node.children.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return leaves[x].size() < leaves[y].size(); });

        std::vector<bool> removed(node.children.size(), false);
        for (auto idx : order) {
            std::set<std::string> others;
            for (std::size_t k = 0; k < node.children.size(); ++k)
                if (k != idx && !removed[k]) others.insert(leaves[k].begin(), leaves[k].end());
            const bool covered =
                std::all_of(leaves[idx].begin(), leaves[idx].end(), [&](const auto& l) { return others.count(l) > 0; });
            if (covered) {
                removed[idx] = true;
                changed = true;
            }
        }
        std::vector<TemplateTreeNode> kept;
        for (std::size_t k = 0; k < node.children.size(); ++k)
            if (!removed[k]) kept.push_back(std::move(node.children[k]));
        node.children = std::move(kept);
    }
    for (auto& c : node.children) c = prune_redundant_children(std::move(c));
    return node;
}

namespace detail {

struct DeepestInner {
    std::vector<std::size_t> path;  // child indices from the root to the parent
    std::size_t index = 0;
    std::size_t depth = 0;
    bool found = false;
};

inline void find_deepest_inner(const TemplateTreeNode& node, std::vector<std::size_t>& path, DeepestInner& best) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const auto& c = node.children[i];
        if (c.is_leaf() || c.children.empty()) continue;
        if (path.size() + 1 > best.depth) best = {path, i, path.size() + 1, true};
        path.push_back(i);
        find_deepest_inner(c, path, best);
        path.pop_back();
    }
}

}  // namespace detail

// Contracts the deepest (then leftmost) inner non-root node into its parent
// until the tree is no taller than `max_height`. The parent's template is
// recomputed from its new children.
inline TemplateTreeNode limit_height(TemplateTreeNode root, std::size_t max_height) {
    if (max_height == 0) throw input_error("limit_height: max_height must be at least 1");
    SlotIdSource ids;
    reserve_ids(root, ids);
    while (height(root) > max_height) {
        detail::DeepestInner found;
        std::vector<std::size_t> path;
        detail::find_deepest_inner(root, path, found);
        if (!found.found) break;
        std::vector<TemplateTreeNode*> chain{&root};
        for (auto i : found.path) chain.push_back(&chain.back()->children[i]);
        auto& siblings = chain.back()->children;
        TemplateTreeNode contracted = std::move(siblings[found.index]);
        siblings.erase(siblings.begin() + static_cast<std::ptrdiff_t>(found.index));
        siblings.insert(siblings.begin() + static_cast<std::ptrdiff_t>(found.index),
                        std::make_move_iterator(contracted.children.begin()),
                        std::make_move_iterator(contracted.children.end()));
        chain.back()->tmpl = merge_children(*chain.back(), ids);
        // Ancestors that no longer derive the recomputed node are recomputed too.
        for (std::size_t k = chain.size() - 1; k-- > 0;) {
            if (generalizes(chain[k]->tmpl, chain[k + 1]->tmpl)) break;
            chain[k]->tmpl = merge_children(*chain[k], ids);
        }
    }
    return root;
}

// Indented dump, one node per line; leaves end in " *".
inline std::string dump_tree(const TemplateTreeNode& node, Notation notation = Notation::unicode, std::size_t depth = 0) {
    std::string out(depth * 2, ' ');
    out += to_string(node.tmpl, notation);
    if (node.is_leaf()) out += " *";
    out += '\n';
    for (const auto& c : node.children) out += dump_tree(c, notation, depth + 1);
    return out;
}

}  // namespace gitta
