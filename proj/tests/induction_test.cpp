#include <gtest/gtest.h>

#include "gitta/induction.hpp"
#include "support.hpp"

using namespace gitta;
using namespace gitta::testing;

namespace {

Template slot(SlotId id) { return Template{make_slot(id)}; }

TemplateTreeNode inner(Template t, std::vector<TemplateTreeNode> children) {
    TemplateTreeNode n;
    n.tmpl = std::move(t);
    n.children = std::move(children);
    return n;
}

// Learned tree for the four greetings, with its slot letters.
TemplateTreeNode greetings_tree() {
    constexpr SlotId A = 0, B = 1, C = 2, D = 3, E = 4;
    auto hw = make_leaf("hello world"), hp = make_leaf("hello people");
    auto iw = make_leaf("hi world"), ip = make_leaf("hi people");
    return inner(Template{make_slot(A)},
                 {inner(Template{make_token("hello"), make_slot(B)}, {hw, hp}),
                  inner(Template{make_slot(C), make_token("world")}, {hw, iw}),
                  inner(Template{make_token("hi"), make_slot(D)}, {iw, ip}),
                  inner(Template{make_slot(E), make_token("people")}, {hp, ip})});
}

std::set<std::string> language(const Grammar& g) { return brute_language(g); }

}  // namespace

TEST(Extract, GreetingsEdges) {
    auto values = extract_slot_values(greetings_tree());
    const ValueSet tails{tokenize("world"), tokenize("people")};
    const ValueSet heads{tokenize("hello"), tokenize("hi")};
    EXPECT_EQ(values.at(1), tails);
    EXPECT_EQ(values.at(2), heads);
    EXPECT_EQ(values.at(3), tails);
    EXPECT_EQ(values.at(4), heads);
}

TEST(Extract, SingleLeaf) { EXPECT_TRUE(extract_slot_values(make_leaf("a b")).empty()); }

TEST(Extract, OptionalLiteralGainsEpsilon) {
    constexpr SlotId hello = 0, there = 1, thing = 2, name = 3;
    auto root = inner(Template{make_slot(hello), make_slot(there), make_slot(thing)},
                      {inner(Template{make_slot(hello), make_token("there,"), make_slot(name)}, {make_leaf("hi there, bob")}),
                       make_leaf("hi world")});
    auto values = extract_slot_values(root, {{hello, {tokenize("hi")}}, {thing, {tokenize("world"), Template{make_slot(name)}}}});
    EXPECT_TRUE(values.at(there).count(tokenize("there,")));
    EXPECT_TRUE(values.at(there).count(Template{}));
}

TEST(Extract, NonDerivableChildIsInvariantError) {
    auto root = inner(Template{make_token("a"), make_slot(0)}, {make_leaf("b c")});
    EXPECT_THROW(extract_slot_values(root), invariant_error);
}

TEST(MergeSlots, IdenticalValueSets) {
    SlotValueMap map{{1, {tokenize("world"), tokenize("people")}}, {3, {tokenize("world"), tokenize("people")}}};
    for (double r : {0.0, 0.5, 1.0}) {
        auto out = merge_similar_slots(map, r);
        EXPECT_EQ(out.replacement.resolve(3), 1u);
        EXPECT_EQ(out.values.size(), 1u);
    }
}

TEST(MergeSlots, DisjointAtRatioOne) {
    SlotValueMap map{{0, {tokenize("a")}}, {1, {tokenize("b")}}};
    auto out = merge_similar_slots(map, 1.0);
    EXPECT_EQ(out.merges, 0u);
    EXPECT_EQ(out.values, map);
}

TEST(MergeSlots, HalfOverlapMeetsHalfRatio) {
    SlotValueMap map{{1, {tokenize("a"), tokenize("b"), tokenize("c")}}, {2, {tokenize("b"), tokenize("c"), tokenize("d")}}};
    auto out = merge_similar_slots(map, 0.5);
    EXPECT_EQ(out.merges, 1u);
    EXPECT_EQ(out.values.at(1).size(), 4u);
    EXPECT_EQ(merge_similar_slots(map, 0.51).merges, 0u);
}

TEST(MergeSlots, RatioOutOfRange) { EXPECT_THROW(merge_similar_slots({}, 1.5), input_error); }

TEST(Simplify, ValueReachableThroughReferencedSlot) {
    constexpr SlotId i = 0, k = 1;
    SlotValueMap map{{i, {slot(k), tokenize("cat"), tokenize("cow")}}, {k, {tokenize("cat"), tokenize("dog")}}};
    auto out = simplify_slot_values(map);
    EXPECT_EQ(out.values.at(i), (ValueSet{slot(k), tokenize("cow")}));
}

TEST(Simplify, SelfReferenceRemoved) {
    SlotValueMap map{{0, {slot(0), tokenize("x"), tokenize("y")}}};
    auto out = simplify_slot_values(map);
    EXPECT_EQ(out.values.at(0), (ValueSet{tokenize("x"), tokenize("y")}));
}

TEST(Simplify, SingletonSlotReplaced) {
    constexpr SlotId i = 0, k = 1;
    SlotValueMap map{{i, {slot(k)}}, {k, {tokenize("a"), tokenize("b")}}, {2, {Template{make_token("z"), make_slot(i)}}}};
    auto out = simplify_slot_values(map);
    EXPECT_EQ(out.replacement.resolve(i), k);
    EXPECT_FALSE(out.values.count(i));
    EXPECT_TRUE(out.values.at(2).count(Template{make_token("z"), make_slot(k)}));
}

TEST(Simplify, OnlySelfReferenceLeavesEpsilonAndWarns) {
    SlotValueMap map{{0, {slot(0)}}};
    auto out = simplify_slot_values(map);
    EXPECT_EQ(out.values.at(0), ValueSet{Template{}});
    EXPECT_FALSE(out.warnings.empty());
}

TEST(Collapse, GreetingsMiddleNodesCollapse) {
    auto tree = greetings_tree();
    auto slots = analyze_slots(tree, 1.0);
    EXPECT_EQ(slots.replacement.resolve(3), 1u);
    EXPECT_EQ(slots.replacement.resolve(4), 2u);
    auto collapsed = collapse_tree(tree, slots.values, slots.replacement);
    EXPECT_EQ(collapsed.tmpl, (Template{make_slot(2), make_slot(1)}));
    EXPECT_EQ(collapsed.children.size(), 4u);
    for (const auto& c : collapsed.children) EXPECT_TRUE(c.is_leaf());
    EXPECT_EQ(slot_count(collapsed.tmpl), 2u);
    EXPECT_EQ(token_count(collapsed.tmpl), 0u);
}

TEST(Collapse, SingleNodeUnchanged) {
    auto leaf = make_leaf("x");
    EXPECT_EQ(collapse_tree(leaf, {}, {}), leaf);
}

TEST(Collapse, ChainWithKnownValueContracts) {
    constexpr SlotId colour = 0, noun = 1;
    Template top{make_token("a"), make_slot(colour), make_slot(noun)};
    Template mid{make_token("a"), make_token("red"), make_slot(noun)};
    auto tree = inner(top, {inner(mid, {make_leaf("a red car"), make_leaf("a red bus")}), make_leaf("a blue car")});
    SlotValueMap values{{colour, {tokenize("red"), tokenize("blue")}}, {noun, {tokenize("car"), tokenize("bus")}}};
    auto collapsed = collapse_tree(tree, values, {});
    EXPECT_EQ(height(collapsed), 1u);
    EXPECT_EQ(collapsed.children.size(), 3u);
}

TEST(Induce, Greetings) {
    auto g = induce_grammar(greeting_sentences, 1.0);
    EXPECT_EQ(language(g), std::set<std::string>(greeting_sentences.begin(), greeting_sentences.end()));
    EXPECT_EQ(rule_count(g), 5u);
    ASSERT_EQ(g.rules.at("origin").size(), 1u);
    const auto& origin = g.rules.at("origin")[0];
    EXPECT_EQ(origin.size(), 2u);
    EXPECT_TRUE(origin[0].nonterminal && origin[1].nonterminal);
}

TEST(Induce, PuttingHeightTwo) {
    auto reference = parse_tracery(putting_json);
    auto lang = brute_language(reference);
    auto g = induce_grammar({lang.begin(), lang.end()}, 1.0, 2);
    EXPECT_EQ(language(g), lang);
    EXPECT_EQ(rule_count(g), 8u);
}

TEST(Induce, OneSentence) {
    auto g = induce_grammar({"just this one"});
    EXPECT_EQ(rule_count(g), 1u);
    EXPECT_EQ(language(g), std::set<std::string>{"just this one"});
}

TEST(Induce, EmptyCorpusThrows) { EXPECT_THROW(induce_grammar({}), input_error); }

TEST(Induce, ResultIsNonRecursive) {
    auto g = induce_grammar({"a b c", "a c", "b c a", "c"}, 0.0);
    EXPECT_FALSE(brute_recursive(g));
}

TEST(EmitGrammar, NamesSlotsInOrder) {
    Template root{make_token("x"), make_slot(7), make_slot(3)};
    SlotValueMap values{{7, {tokenize("p"), Template{make_token("q"), make_slot(9)}}}, {3, {tokenize("r")}}, {9, {tokenize("s")}}};
    auto g = emit_grammar(root, values);
    EXPECT_EQ(to_tracery(g), R"({
  "A": [
    "p",
    "q #C#"
  ],
  "B": "r",
  "C": "s",
  "origin": "x #A# #B#"
})");
}
