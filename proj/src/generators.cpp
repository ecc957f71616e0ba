#include "trs/generators.hpp"

#include <stdexcept>
#include <vector>

namespace trs {

namespace {

// numerals stay in [0, 32): Peano depth caps memory and Lt/Gt cost grows
// with magnitude
constexpr std::uint32_t kNumeralBound = 32;

struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint32_t numeral() { return static_cast<std::uint32_t>(next() % kNumeralBound); }
};

const char* kMergesortHeader =
    "sort  Nat  = struct Zero() | S(Nat) | Len(List);\n"
    "      Bool = struct True() | False() | Lt(Nat, Nat) | Gt(Nat, Nat);\n"
    "      List = struct Nil() | Cons(Nat, List) | Merge(List, List) |\n"
    "             Merge2(Bool, Nat, List, Nat, List) | Even(List) |\n"
    "             Odd(List) | Sort(List) | Sort2(Bool, List);\n"
    "      Tree = struct Leaf(List) | Node(Tree, Tree);\n"
    "\n"
    "var X : Nat; Y : Nat; B : Bool; L : List; M : List;\n"
    "\n"
    "eqn\n"
    "  Len(Nil()) = Zero();\n"
    "  Len(Cons(X, L)) = S(Len(L));\n"
    "\n"
    "  Merge(Nil(), M) = M;\n"
    "  Merge(L, Nil()) = L;\n"
    "  Merge(Cons(X, L), Cons(Y, M)) = Merge2(Lt(X, Y), X, L, Y, M);\n"
    "\n"
    "  Merge2(True(), X, L, Y, M) = Cons(X, Merge(L, Cons(Y, M)));\n"
    "  Merge2(False(), X, L, Y, M) = Cons(Y, Merge(Cons(X, L), M));\n"
    "\n"
    "  Sort(L) = Sort2(Gt(Len(L), S(Zero())), L);\n"
    "  Sort2(False(), L) = L;\n"
    "  Sort2(True(), L) = Merge(Sort(Even(L)), Sort(Odd(L)));\n"
    "\n"
    "  Even(Nil()) = Nil();\n"
    "  Even(Cons(X, L)) = Cons(X, Odd(L));\n"
    "  Odd(Nil()) = Nil();\n"
    "  Odd(Cons(X, L)) = Even(L);\n"
    "\n"
    "  Gt(Zero(), Zero()) = False();\n"
    "  Gt(Zero(), S(Y)) = False();\n"
    "  Gt(S(X), Zero()) = True();\n"
    "  Gt(S(X), S(Y)) = Gt(X, Y);\n"
    "\n"
    "  Lt(Zero(), Zero()) = False();\n"
    "  Lt(Zero(), S(Y)) = True();\n"
    "  Lt(S(X), Zero()) = False();\n"
    "  Lt(S(X), S(Y)) = Lt(X, Y);\n"
    "\n";

std::string numeral_list(SplitMix64& rng, std::uint32_t length) {
    std::string out;
    for (std::uint32_t i = 0; i < length; ++i) out += "Cons(" + peano(rng.numeral()) + ", ";
    out += "Nil()";
    out.append(length, ')');
    return out;
}

std::string tree_input(SplitMix64& rng, std::uint32_t depth, std::uint32_t length) {
    if (depth == 0) return "Leaf(Sort(" + numeral_list(rng, length) + "))";
    // left first so the numeral stream reads leaf by leaf
    std::string left = tree_input(rng, depth - 1, length);
    std::string right = tree_input(rng, depth - 1, length);
    return "Node(" + left + ", " + right + ")";
}

std::string transform_text(std::uint32_t depth) {
    std::string out = "% family: transform  depth=" + std::to_string(depth) + "\n";
    out +=
        "sort Nat  = struct Zero() | Suc(Nat);\n"
        "     Tree = struct ";
    for (char c = 'A'; c <= 'Z'; ++c) out += std::string(1, c) + "() | ";
    out += "End() |\n            Node(Tree, Tree) | Expand(Nat) | Expand2(Nat);\n\n";
    // the alphabet constants claim every upper-case single letter, so the
    // variables go lower-case
    out += "var o : Tree; p : Tree; x : Nat;\n\neqn\n";
    out +=
        "  Expand(Zero()) = A();\n"
        "  Expand(Suc(x)) = Node(Expand(x), Expand2(x));\n"
        "  Expand2(Zero()) = A();\n"
        "  Expand2(Suc(x)) = Node(Expand(x), Expand2(x));\n";
    for (char c = 'A'; c <= 'Z'; ++c) {
        out += std::string("  ") + c + "() = ";
        out += (c == 'Z') ? "End()" : std::string(1, c + 1) + "()";
        out += ";\n";
    }
    out += "\ninput Expand(";
    for (std::uint32_t i = 0; i < depth; ++i) out += "Suc(";
    out += "Zero()";
    out.append(depth, ')');
    out += ");\n";
    return out;
}

}  // namespace

std::string peano(std::uint32_t value) {
    std::string out;
    for (std::uint32_t i = 0; i < value; ++i) out += "S(";
    out += "Zero()";
    out.append(value, ')');
    return out;
}

GenSpec GenSpec::mergesort(std::uint32_t length, std::uint64_t seed) {
    GenSpec spec;
    spec.family = Family::Mergesort;
    spec.length = length;
    spec.seed = seed;
    return spec;
}

GenSpec GenSpec::treemergesort(std::uint32_t depth, std::uint32_t length, std::uint64_t seed) {
    GenSpec spec;
    spec.family = Family::TreeMergesort;
    spec.depth = depth;
    spec.length = length;
    spec.seed = seed;
    return spec;
}

GenSpec GenSpec::transform(std::uint32_t depth) {
    GenSpec spec;
    spec.family = Family::Transform;
    spec.depth = depth;
    return spec;
}

std::string generate(const GenSpec& spec) {
    switch (spec.family) {
        case GenSpec::Family::Mergesort: {
            std::string out = "% family: mergesort  n=" + std::to_string(spec.length) +
                              "  seed=" + std::to_string(spec.seed) + "\n";
            out += kMergesortHeader;
            SplitMix64 rng{spec.seed};
            out += "input Sort(" + numeral_list(rng, spec.length) + ");\n";
            return out;
        }
        case GenSpec::Family::TreeMergesort: {
            if (spec.depth > 26)
                throw std::invalid_argument("treemergesort depth above 26 is not supported");
            std::string out = "% family: treemergesort  depth=" + std::to_string(spec.depth) +
                              "  k=" + std::to_string(spec.length) +
                              "  seed=" + std::to_string(spec.seed) + "\n";
            out += kMergesortHeader;
            SplitMix64 rng{spec.seed};
            out += "input " + tree_input(rng, spec.depth, spec.length) + ";\n";
            return out;
        }
        case GenSpec::Family::Transform:
            return transform_text(spec.depth);
    }
    throw std::invalid_argument("unknown benchmark family");
}

std::vector<std::uint32_t> generated_numerals(const GenSpec& spec) {
    std::vector<std::uint32_t> out;
    if (spec.family == GenSpec::Family::Transform) return out;
    std::uint64_t leaves = spec.family == GenSpec::Family::Mergesort ? 1 : (1ull << spec.depth);
    SplitMix64 rng{spec.seed};
    for (std::uint64_t leaf = 0; leaf < leaves; ++leaf)
        for (std::uint32_t i = 0; i < spec.length; ++i) out.push_back(rng.numeral());
    return out;
}

}  // namespace trs
