#include "spanning/knowledge_tree.hpp"

#include <ostream>
#include <set>

namespace spanning {

std::size_t KnowledgeTree::intern(const std::string& label, int level, std::optional<std::size_t> parent) {
    auto& slot = by_level_[static_cast<std::size_t>(level)];
    auto [it, fresh] = slot.emplace(label, nodes_.size());
    if (fresh) nodes_.push_back({label, level, parent});
    return it->second;
}

std::size_t KnowledgeTree::leaf(const PacsCode& code) const {
    auto it = leaves_.find(code.canonical());
    if (it == leaves_.end()) throw TreeError("code '" + code.canonical() + "' is not a leaf of the knowledge tree");
    return it->second;
}

void KnowledgeTree::write_edges(std::ostream& out) const {
    out << "child_label,parent_label,level\n";
    for (const Node& n : nodes_) {
        if (!n.parent) continue;
        out << n.label << ',' << nodes_[*n.parent].label << ',' << n.level << '\n';
    }
}

KnowledgeTree build_tree(std::span<const PacsCode> codes) {
    if (codes.empty()) throw TreeError("cannot build a knowledge tree from no codes");
    // Sorted insertion keeps node numbering independent of input order.
    const std::set<PacsCode> distinct(codes.begin(), codes.end());

    KnowledgeTree tree;
    tree.by_level_.resize(KnowledgeTree::kLeafLevel + 1);
    const std::size_t root = tree.intern(std::string(KnowledgeTree::kRootLabel), KnowledgeTree::kRootLevel, {});
    for (const PacsCode& code : distinct) {
        std::size_t parent = root;
        for (int level = 2; level <= KnowledgeTree::kLeafLevel; ++level)
            parent = tree.intern(code.ancestor(level), level, parent);
        tree.leaves_.emplace(code.canonical(), parent);
    }
    return tree;
}

KnowledgeTree build_tree(const Corpus& corpus) {
    std::vector<PacsCode> codes;
    for (const Paper& p : corpus.papers()) codes.insert(codes.end(), p.pacs_codes.begin(), p.pacs_codes.end());
    return build_tree(codes);
}

int lca_level(const PacsCode& p, const PacsCode& q) {
    const auto a = p.significant();
    const auto b = q.significant();
    std::size_t shared = 0;
    while (shared < a.size() && a[shared] == b[shared]) ++shared;
    int level = KnowledgeTree::kRootLevel;
    while (level < KnowledgeTree::kLeafLevel && prefix_length_for_level(level + 1) <= shared) ++level;
    return level;
}

int path_length(const KnowledgeTree& tree, const PacsCode& p, const PacsCode& q) {
    tree.leaf(p);
    tree.leaf(q);
    return 2 * (KnowledgeTree::kLeafLevel - lca_level(p, q));
}

double network_distance(const Paper& paper, const KnowledgeTree& tree) {
    const auto& codes = paper.pacs_codes;
    if (codes.empty()) throw TreeError("paper '" + paper.id + "' has no codes");
    for (const PacsCode& c : codes) tree.leaf(c);
    if (codes.size() == 1) return 0.0;
    long total = 0;
    for (std::size_t i = 0; i < codes.size(); ++i)
        for (std::size_t j = i + 1; j < codes.size(); ++j)
            total += 2 * (KnowledgeTree::kLeafLevel - lca_level(codes[i], codes[j]));
    const double pairs = static_cast<double>(codes.size() * (codes.size() - 1) / 2);
    return static_cast<double>(total) / pairs;
}

} // namespace spanning
