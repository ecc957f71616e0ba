#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace trs {

// Benchmark family instances. mergesort: one flat Sort of `length` seeded
// pseudo-random Peano numerals. treemergesort: a full binary Node-tree of
// `depth` whose leaves each hold a Sort of `length` numerals. transform: the
// alphabet-chain tree expansion driven by Expand of a depth-`depth` numeral.
struct GenSpec {
    enum class Family { Mergesort, TreeMergesort, Transform };
    Family family = Family::Mergesort;
    std::uint32_t length = 0;
    std::uint32_t depth = 0;
    std::uint64_t seed = 0;

    static GenSpec mergesort(std::uint32_t length, std::uint64_t seed = 1);
    static GenSpec treemergesort(std::uint32_t depth, std::uint32_t length, std::uint64_t seed = 1);
    static GenSpec transform(std::uint32_t depth);
};

// Complete .trs file text; deterministic in the spec (same spec, same bytes).
std::string generate(const GenSpec& spec);

// The numeral sequence a mergesort/treemergesort instance embeds, in input
// order (leaf by leaf for trees); lets oracles sort independently.
std::vector<std::uint32_t> generated_numerals(const GenSpec& spec);

std::string peano(std::uint32_t value);

}  // namespace trs
