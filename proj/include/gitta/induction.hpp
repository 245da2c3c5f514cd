#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gitta/error.hpp"
#include "gitta/grammar.hpp"
#include "gitta/merge.hpp"
#include "gitta/template.hpp"
#include "gitta/tree.hpp"

namespace gitta {

inline constexpr double default_ratio = 0.5;
inline constexpr std::size_t collapse_iteration_cap = 100;

// Reads slot values off every parent/child edge: each slot of a parent
// template records the range of the child template it covers. Where the
// alignment is ambiguous, ranges listed in `hints` are preferred.
inline SlotValueMap extract_slot_values(const TemplateTreeNode& tree, const SlotValueMap& hints = {}) {
    SlotValueMap values;
    auto walk = [&](auto&& self, const TemplateTreeNode& node) -> void {
        if (has_slots(node.tmpl)) {
            for (const auto& child : node.children) {
                auto covered = align_for_values(node.tmpl, child.tmpl, hints);
                if (!covered)
                    throw invariant_error("extract_slot_values: '" + to_string(child.tmpl) + "' is not derivable from '" +
                                          to_string(node.tmpl) + "'");
                for (std::size_t i = 0; i < node.tmpl.size(); ++i)
                    if (is_slot(node.tmpl[i])) values[slot_id(node.tmpl[i])].insert((*covered)[i]);
            }
        }
        for (const auto& child : node.children) self(self, child);
    };
    walk(walk, tree);
    return values;
}

inline ValueSet replace_in_values(const ValueSet& values, const SlotReplacement& repl) {
    ValueSet out;
    for (const auto& v : values) out.insert(replace_slots(v, repl));
    return out;
}

inline void replace_in_map(SlotValueMap& map, const SlotReplacement& repl) {
    for (auto& [slot, values] : map) values = replace_in_values(values, repl);
}

namespace detail {

inline bool is_self_reference(SlotId slot, const Template& value) {
    return value.size() == 1 && is_slot(value[0]) && slot_id(value[0]) == slot;
}

// Slot reference graph, ignoring bare self references (those are dropped by
// simplification and never recurse).
inline bool has_cycle(const SlotValueMap& map) {
    enum class Mark { unseen, active, done };
    std::map<SlotId, Mark> mark;
    auto visit = [&](auto&& self, SlotId s) -> bool {
        mark[s] = Mark::active;
        if (auto it = map.find(s); it != map.end()) {
            for (const auto& v : it->second) {
                if (is_self_reference(s, v)) continue;
                for (auto k : slots_of(v)) {
                    if (mark[k] == Mark::active) return true;
                    if (mark[k] == Mark::unseen && self(self, k)) return true;
                }
            }
        }
        mark[s] = Mark::done;
        return false;
    };
    for (const auto& [s, values] : map)
        if (mark[s] == Mark::unseen && visit(visit, s)) return true;
    return false;
}

// |a ∩ b| and |a ∪ b|.
inline std::pair<std::size_t, std::size_t> overlap(const ValueSet& a, const ValueSet& b) {
    std::size_t common = 0;
    for (const auto& v : a) common += b.count(v);
    return {common, a.size() + b.size() - common};
}

}  // namespace detail

struct SlotMergeResult {
    SlotValueMap values;
    SlotReplacement replacement;
    std::size_t merges = 0;
};

// Greedily merges the slot pair with the highest Jaccard overlap of value
// sets while that overlap is at least `ratio`. The higher id is folded into
// the lower one. Pairs whose union would make the grammar recursive are
// skipped.
inline SlotMergeResult merge_similar_slots(SlotValueMap map, double ratio) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw input_error("merge_similar_slots: ratio must lie in [0, 1]");
    SlotMergeResult result;
    std::set<std::pair<SlotId, SlotId>> blocked;

    while (true) {
        std::optional<std::pair<SlotId, SlotId>> best;
        std::size_t best_common = 0, best_union = 1;
        for (auto i = map.begin(); i != map.end(); ++i) {
            for (auto j = std::next(i); j != map.end(); ++j) {
                if (blocked.count({i->first, j->first})) continue;
                auto [common, all] = detail::overlap(i->second, j->second);
                if (all == 0) continue;
                if (static_cast<double>(common) < ratio * static_cast<double>(all)) continue;
                // common/all > best_common/best_union
                if (!best || common * best_union > best_common * all) {
                    best = {i->first, j->first};
                    best_common = common;
                    best_union = all;
                }
            }
        }
        if (!best) break;

        auto [keep, fold] = *best;
        SlotValueMap trial = map;
        trial[keep].insert(trial[fold].begin(), trial[fold].end());
        trial.erase(fold);
        SlotReplacement step;
        step.add(fold, keep);
        replace_in_map(trial, step);
        if (detail::has_cycle(trial)) {
            blocked.insert(*best);
            continue;
        }
        map = std::move(trial);
        result.replacement.add(fold, keep);
        ++result.merges;
        // Pairs involving `keep` changed; give them another chance.
        std::erase_if(blocked, [keep = keep](const auto& p) { return p.first == keep || p.second == keep; });
    }
    result.values = std::move(map);
    return result;
}

struct SimplifyResult {
    SlotValueMap values;
    SlotReplacement replacement;
    std::vector<std::string> warnings;
};

// Applies, until an iteration changes nothing:
//  - a slot listed among its own values is removed from them;
//  - a value of slot i that is also a value of a slot k listed in U_i is
//    dropped from U_i (reachable through k);
//  - a slot whose only value is another slot k is replaced by k.
// A value set is never left empty: a slot whose only value was itself keeps ε.
inline SimplifyResult simplify_slot_values(SlotValueMap map) {
    SimplifyResult result;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [slot, values] : map) {
            const Template self{Slot{slot}};
            if (values.erase(self)) {
                changed = true;
                if (values.empty()) {
                    values.insert(Template{});
                    result.warnings.push_back("slot " + slot_name(slot) + " only referenced itself; kept the empty value");
                }
            }
            std::vector<SlotId> referenced;
            for (const auto& v : values)
                if (v.size() == 1 && is_slot(v[0]) && map.count(slot_id(v[0]))) referenced.push_back(slot_id(v[0]));
            for (auto k : referenced) {
                const auto& reachable = map.at(k);
                const Template ref{Slot{k}};
                for (auto it = values.begin(); it != values.end();) {
                    if (*it != ref && reachable.count(*it)) {
                        it = values.erase(it);
                        changed = true;
                    } else {
                        ++it;
                    }
                }
            }
        }
        for (auto& [slot, values] : map) {
            if (values.size() != 1) continue;
            const auto& only = *values.begin();
            if (only.size() != 1 || !is_slot(only[0]) || slot_id(only[0]) == slot || !map.count(slot_id(only[0]))) continue;
            const SlotId target = slot_id(only[0]);
            SlotReplacement step;
            step.add(slot, target);
            result.replacement.add(slot, target);
            map.erase(slot);
            replace_in_map(map, step);
            changed = true;
            break;
        }
    }
    result.values = std::move(map);
    return result;
}

// Drops values that close a reference cycle so the emitted grammar stays
// non-recursive.
inline std::vector<std::string> break_cycles(SlotValueMap& map) {
    std::vector<std::string> warnings;
    enum class Mark { unseen, active, done };
    while (detail::has_cycle(map)) {
        std::map<SlotId, Mark> mark;
        std::optional<std::pair<SlotId, Template>> victim;
        auto visit = [&](auto&& self, SlotId s) -> bool {
            mark[s] = Mark::active;
            if (auto it = map.find(s); it != map.end()) {
                for (const auto& v : it->second) {
                    if (detail::is_self_reference(s, v)) continue;
                    for (auto k : slots_of(v)) {
                        if (mark[k] == Mark::active) {
                            victim = {s, v};
                            return true;
                        }
                        if (mark[k] == Mark::unseen && self(self, k)) return true;
                    }
                }
            }
            mark[s] = Mark::done;
            return false;
        };
        for (const auto& [s, values] : map)
            if (mark[s] == Mark::unseen && visit(visit, s)) break;
        if (!victim) break;
        auto& values = map[victim->first];
        values.erase(victim->second);
        if (values.empty()) values.insert(Template{});
        warnings.push_back("dropped recursive value '" + to_string(victim->second) + "' of slot " + slot_name(victim->first));
    }
    return warnings;
}

struct SlotAnalysis {
    SlotValueMap values;
    SlotReplacement replacement;
    std::vector<std::string> warnings;
};

// Extract, then alternate slot merging and simplification until stable.
inline SlotAnalysis analyze_slots(const TemplateTreeNode& tree, double ratio, const SlotValueMap& hints = {}) {
    SlotAnalysis out;
    out.values = extract_slot_values(tree, hints);
    for (std::size_t iter = 0;; ++iter) {
        if (iter > collapse_iteration_cap) throw invariant_error("analyze_slots: slot merging does not converge");
        auto merged = merge_similar_slots(std::move(out.values), ratio);
        auto simple = simplify_slot_values(std::move(merged.values));
        for (const auto& [from, to] : merged.replacement.mapping) out.replacement.add(from, to);
        for (const auto& [from, to] : simple.replacement.mapping) out.replacement.add(from, to);
        out.warnings.insert(out.warnings.end(), simple.warnings.begin(), simple.warnings.end());
        out.values = std::move(simple.values);
        if (merged.merges == 0 && simple.replacement.empty()) break;
    }
    auto cycle_warnings = break_cycles(out.values);
    out.warnings.insert(out.warnings.end(), cycle_warnings.begin(), cycle_warnings.end());
    return out;
}

inline void apply_replacement(TemplateTreeNode& node, const SlotReplacement& repl) {
    node.tmpl = replace_slots(node.tmpl, repl);
    for (auto& c : node.children) apply_replacement(c, repl);
}

namespace detail {

inline bool shares_slot(const Template& parent, const Template& child) {
    for (auto s : slots_of(parent))
        if (contains_slot(child, s)) return true;
    return false;
}

// `child` equals `parent` with some slots filled by values derivable from
// those slots and the remaining slots left in place.
inline bool fillable(const Template& parent, const Template& child, ValueRecognizer& recognizer) {
    return align_child(parent, child, [&](SlotId s, const Template& range) -> std::optional<int> {
               if (detail::is_self_reference(s, range) || recognizer.derives(s, range)) return 0;
               return std::nullopt;
           })
        .has_value();
}

inline void collapse_children(TemplateTreeNode& node, ValueRecognizer& recognizer) {
    for (std::size_t i = 0; i < node.children.size();) {
        auto& child = node.children[i];
        if (!child.is_leaf() && !child.children.empty() && shares_slot(node.tmpl, child.tmpl) &&
            fillable(node.tmpl, child.tmpl, recognizer)) {
            TemplateTreeNode removed = std::move(child);
            node.children.erase(node.children.begin() + static_cast<std::ptrdiff_t>(i));
            node.children.insert(node.children.begin() + static_cast<std::ptrdiff_t>(i),
                                 std::make_move_iterator(removed.children.begin()),
                                 std::make_move_iterator(removed.children.end()));
            continue;  // re-examine the lifted children
        }
        ++i;
    }
    // Lifting can bring in a subtree that is already a sibling.
    std::vector<TemplateTreeNode> unique;
    for (auto& c : node.children)
        if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(std::move(c));
    node.children = std::move(unique);
    for (auto& c : node.children) collapse_children(c, recognizer);
}

inline void recompute_templates(TemplateTreeNode& node, const SlotValueMap& known, SlotIdSource& ids) {
    if (node.children.empty()) return;
    for (auto& c : node.children) recompute_templates(c, known, ids);
    Template fresh = merge_children(node, ids, known);
    if (!equivalent(fresh, node.tmpl)) node.tmpl = std::move(fresh);
}

}  // namespace detail

// One simplification pass: rename slots, drop children that are the parent
// template with known values filled in (lifting their children), then
// recompute every inner template from its children using the known values.
inline TemplateTreeNode collapse_pass(TemplateTreeNode tree, const SlotValueMap& values, const SlotReplacement& repl,
                                      SlotIdSource& ids) {
    apply_replacement(tree, repl);
    ValueRecognizer recognizer(values);
    detail::collapse_children(tree, recognizer);
    detail::recompute_templates(tree, values, ids);
    return tree;
}

// collapse_pass repeated until the tree stops changing.
inline TemplateTreeNode collapse_tree(TemplateTreeNode tree, const SlotValueMap& values, const SlotReplacement& repl,
                                     SlotIdSource& ids) {
    for (std::size_t iter = 0; iter < collapse_iteration_cap; ++iter) {
        auto next = collapse_pass(tree, values, repl, ids);
        if (next == tree) return tree;
        tree = std::move(next);
    }
    throw invariant_error("collapse_tree: no fixpoint after " + std::to_string(collapse_iteration_cap) + " passes");
}

inline TemplateTreeNode collapse_tree(TemplateTreeNode tree, const SlotValueMap& values, const SlotReplacement& repl) {
    SlotIdSource ids;
    reserve_ids(tree, ids);
    for (const auto& [slot, vs] : values) {
        ids.reserve_above(slot);
        for (const auto& v : vs)
            if (has_slots(v)) ids.reserve_above(max_slot_id(v));
    }
    return collapse_tree(std::move(tree), values, repl, ids);
}

// Start symbol `origin` expands to `root`; every slot reachable from it
// becomes a non-terminal named A, B, ... in order of first appearance, with
// one production per slot value.
inline Grammar emit_grammar(const Template& root, const SlotValueMap& values) {
    std::map<SlotId, std::string> names;
    std::deque<SlotId> pending;
    auto name_of = [&](SlotId s) -> const std::string& {
        auto [it, inserted] = names.try_emplace(s, "");
        if (inserted) {
            it->second = slot_name(static_cast<SlotId>(names.size() - 1));
            pending.push_back(s);
        }
        return it->second;
    };
    auto to_production = [&](const Template& t) {
        Production p;
        for (const auto& e : t) p.push_back(is_token(e) ? terminal(token_text(e)) : nonterminal(name_of(slot_id(e))));
        return p;
    };
    auto sorted = [](std::vector<Production> ps) {
        std::sort(ps.begin(), ps.end(), [](const Production& x, const Production& y) {
            return detail::render_rule_body(x) < detail::render_rule_body(y);
        });
        return ps;
    };

    Grammar g;
    g.rules[g.start] = {to_production(root)};
    while (!pending.empty()) {
        const SlotId s = pending.front();
        pending.pop_front();
        auto it = values.find(s);
        if (it == values.end() || it->second.empty())
            throw invariant_error("emit_grammar: slot " + slot_name(s) + " has no values");
        std::vector<Production> productions;
        for (const auto& v : it->second) productions.push_back(to_production(v));
        g.rules[names.at(s)] = sorted(std::move(productions));
    }
    if (!check_nonrecursive(g).acyclic()) throw invariant_error("emit_grammar: induced grammar is recursive");
    return g;
}

struct InductionOptions {
    double ratio = default_ratio;
    std::optional<std::size_t> max_height;
};

struct InductionResult {
    Grammar grammar;
    TemplateTreeNode tree;  // final collapsed tree
    SlotValueMap values;
    std::vector<std::string> warnings;
    bool converged = false;  // false when the loop stopped on a revisited shape
};

namespace detail {

// Tree with slots renumbered by first appearance in preorder.
inline TemplateTreeNode canonical_tree(const TemplateTreeNode& tree) {
    std::map<SlotId, SlotId> renumber;
    auto walk = [&](auto&& self, const TemplateTreeNode& node) -> TemplateTreeNode {
        TemplateTreeNode out;
        out.leaf_text = node.leaf_text;
        for (const auto& e : node.tmpl) {
            if (is_token(e)) {
                out.tmpl.elements.push_back(e);
            } else {
                auto [it, inserted] = renumber.try_emplace(slot_id(e), static_cast<SlotId>(renumber.size()));
                out.tmpl.elements.push_back(Slot{it->second});
            }
        }
        for (const auto& c : node.children) out.children.push_back(self(self, c));
        return out;
    };
    return walk(walk, tree);
}

}  // namespace detail

// Learn, prune, then alternate slot analysis and collapsing until the tree
// stops changing. A tree that returns to an earlier shape (up to slot
// renaming) also ends the loop.
inline InductionResult induce(const std::vector<std::string>& texts, const InductionOptions& options = {}) {
    if (!(options.ratio >= 0.0 && options.ratio <= 1.0)) throw input_error("induce: ratio must lie in [0, 1]");
    TemplateTreeNode tree = prune_redundant_children(learn_template_tree(texts, options.max_height));
    SlotIdSource ids;
    reserve_ids(tree, ids);

    InductionResult result;
    SlotValueMap hints;
    std::vector<TemplateTreeNode> seen{detail::canonical_tree(tree)};
    for (std::size_t iter = 0;; ++iter) {
        if (iter >= collapse_iteration_cap)
            throw invariant_error("induce: template tree did not stabilize after " + std::to_string(collapse_iteration_cap) +
                                  " iterations");
        auto slots = analyze_slots(tree, options.ratio, hints);
        auto next = collapse_tree(tree, slots.values, slots.replacement, ids);
        auto shape = detail::canonical_tree(next);
        if (next == tree || std::find(seen.begin(), seen.end(), shape) != seen.end()) {
            apply_replacement(tree, slots.replacement);
            result.converged = next == tree;
            result.values = std::move(slots.values);
            result.warnings = std::move(slots.warnings);
            break;
        }
        seen.push_back(std::move(shape));
        tree = std::move(next);
        hints = std::move(slots.values);
    }
    result.grammar = emit_grammar(tree.tmpl, result.values);
    result.tree = std::move(tree);
    return result;
}

inline Grammar induce_grammar(const std::vector<std::string>& texts, double ratio = default_ratio,
                              std::optional<std::size_t> max_height = std::nullopt) {
    return induce(texts, InductionOptions{ratio, max_height}).grammar;
}

}  // namespace gitta
