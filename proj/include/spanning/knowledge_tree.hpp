#pragma once

#include "spanning/corpus.hpp"
#include "spanning/pacs_code.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace spanning {

class TreeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Six-level category tree rooted at "physics". Nodes below the root are
// labelled by code prefixes (see PacsCode::ancestor); leaves are full codes.
class KnowledgeTree {
public:
    static constexpr int kRootLevel = 1;
    static constexpr int kLeafLevel = PacsCode::kLeafLevel;
    static constexpr std::string_view kRootLabel = "physics";

    struct Node {
        std::string label;
        int level;
        std::optional<std::size_t> parent;  // empty only for the root
    };

    std::span<const Node> nodes() const { return nodes_; }
    std::size_t leaf_count() const { return leaves_.size(); }
    bool contains(const PacsCode& code) const { return leaves_.contains(code.canonical()); }
    // Node index of the leaf for `code`; throws TreeError when absent.
    std::size_t leaf(const PacsCode& code) const;

    // Edge-list CSV: child_label,parent_label,level (level of the child).
    void write_edges(std::ostream& out) const;

private:
    friend KnowledgeTree build_tree(std::span<const PacsCode> codes);

    std::size_t intern(const std::string& label, int level, std::optional<std::size_t> parent);

    std::vector<Node> nodes_;
    std::vector<std::unordered_map<std::string, std::size_t>> by_level_;  // indexed by level
    std::unordered_map<std::string, std::size_t> leaves_;                 // canonical code -> node
};

// Throws TreeError for an empty code set.
KnowledgeTree build_tree(std::span<const PacsCode> codes);
// Tree over every distinct code used in the corpus.
KnowledgeTree build_tree(const Corpus& corpus);

// Level (1..6) of the lowest common ancestor, from shared prefix length.
int lca_level(const PacsCode& p, const PacsCode& q);

// Shortest path between two leaves: 2 * (6 - lca_level). Throws TreeError when
// either code is not a leaf of `tree`.
int path_length(const KnowledgeTree& tree, const PacsCode& p, const PacsCode& q);

// Mean path length over the m(m-1)/2 unordered code pairs; 0 for m = 1.
double network_distance(const Paper& paper, const KnowledgeTree& tree);

} // namespace spanning
