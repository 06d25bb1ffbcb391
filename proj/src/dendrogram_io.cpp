#include <algorithm>
#include <cctype>
#include <cstdio>
#include <memory>
#include <sstream>

#include "estrace/cluster.hpp"
#include "estrace/errors.hpp"
#include "estrace/trace.hpp"

namespace estrace::cluster {

namespace {

double node_height(const Dendrogram& t, std::size_t id) {
  return id < t.labels.size() ? 0.0 : t.merges[id - t.labels.size()].height;
}

void render(const Dendrogram& t, std::size_t id, double parent_height, bool root, std::string& out) {
  const std::size_t n = t.labels.size();
  if (id < n) {
    out += t.labels[id];
  } else {
    const auto& m = t.merges[id - n];
    out += '(';
    render(t, m.a, m.height, false, out);
    out += ',';
    render(t, m.b, m.height, false, out);
    out += ')';
  }
  if (!root) out += ':' + format_double((parent_height - node_height(t, id)) / 2.0);
}

struct ParsedNode {
  std::string label;
  double branch = 0.0;
  std::vector<std::unique_ptr<ParsedNode>> children;
  double height = 0.0;
  std::size_t id = 0;
};

class NewickParser {
 public:
  explicit NewickParser(const std::string& text) : s_(text) {}

  std::unique_ptr<ParsedNode> parse() {
    auto root = node();
    skip_space();
    if (pos_ >= s_.size() || s_[pos_] != ';') fail("expected ';'");
    ++pos_;
    skip_space();
    if (pos_ != s_.size()) fail("trailing characters");
    return root;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("newick: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::unique_ptr<ParsedNode> node() {
    skip_space();
    auto out = std::make_unique<ParsedNode>();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      out->children.push_back(node());
      skip_space();
      while (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        out->children.push_back(node());
        skip_space();
      }
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
      ++pos_;
      if (out->children.size() != 2) fail("only binary trees are supported");
    }
    const auto start = pos_;
    while (pos_ < s_.size() && std::string_view("(),:;").find(s_[pos_]) == std::string_view::npos &&
           !std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    out->label = s_.substr(start, pos_ - start);
    if (out->children.empty() && out->label.empty()) fail("leaf without a label");
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      const auto begin = pos_;
      while (pos_ < s_.size() && std::string_view("(),:;").find(s_[pos_]) == std::string_view::npos) ++pos_;
      try {
        std::size_t used = 0;
        const std::string number = s_.substr(begin, pos_ - begin);
        out->branch = std::stod(number, &used);
        if (used != number.size()) fail("bad branch length");
      } catch (const std::logic_error&) {
        fail("bad branch length");
      }
    }
    return out;
  }
};

void collect(ParsedNode& node, std::vector<std::string>& labels, std::vector<ParsedNode*>& internal) {
  if (node.children.empty()) {
    node.id = labels.size();
    labels.push_back(node.label);
    return;
  }
  for (auto& c : node.children) collect(*c, labels, internal);
  const auto& first = *node.children.front();
  node.height = first.height + 2.0 * first.branch;
  internal.push_back(&node);
}

std::size_t leaf_count(const ParsedNode& node) {
  if (node.children.empty()) return 1;
  std::size_t s = 0;
  for (const auto& c : node.children) s += leaf_count(*c);
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

std::string to_newick(const Dendrogram& tree) {
  std::string out;
  if (tree.merges.empty()) {
    if (tree.labels.size() == 1) return tree.labels.front() + ";";
    throw InputError("dendrogram has no merges");
  }
  render(tree, tree.labels.size() + tree.merges.size() - 1, 0.0, true, out);
  return out + ";";
}

Dendrogram parse_newick(const std::string& text) {
  auto root = NewickParser(text).parse();
  Dendrogram tree;
  std::vector<ParsedNode*> internal;
  collect(*root, tree.labels, internal);
  std::stable_sort(internal.begin(), internal.end(),
                   [](const ParsedNode* a, const ParsedNode* b) { return a->height < b->height; });
  const std::size_t n = tree.labels.size();
  for (std::size_t i = 0; i < internal.size(); ++i) {
    auto* node = internal[i];
    node->id = n + i;
    Merge m;
    m.a = std::min(node->children[0]->id, node->children[1]->id);
    m.b = std::max(node->children[0]->id, node->children[1]->id);
    m.height = node->height;
    m.size = leaf_count(*node);
    tree.merges.push_back(m);
  }
  return tree;
}

std::string merge_table_csv(const Dendrogram& tree) {
  std::string out = "step,cluster_a,cluster_b,height,size\n";
  for (std::size_t i = 0; i < tree.merges.size(); ++i) {
    const auto& m = tree.merges[i];
    out += std::to_string(i + 1) + ',' + std::to_string(m.a) + ',' + std::to_string(m.b) + ',' +
           format_double(m.height) + ',' + std::to_string(m.size) + '\n';
  }
  return out;
}

Dendrogram parse_merge_table_csv(const std::vector<std::string>& labels, const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "step,cluster_a,cluster_b,height,size")
    throw InputError("bad merge table header");
  Dendrogram tree;
  tree.labels = labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 5) throw InputError("bad merge table row");
    Merge m;
    m.a = std::stoul(cells[1]);
    m.b = std::stoul(cells[2]);
    m.height = std::strtod(cells[3].c_str(), nullptr);
    m.size = std::stoul(cells[4]);
    if (m.b >= labels.size() + tree.merges.size()) throw InputError("merge refers to a future cluster");
    tree.merges.push_back(m);
  }
  if (tree.merges.size() + 1 != labels.size()) throw InputError("merge table needs n - 1 rows");
  return tree;
}

std::string distance_csv(const DistanceMatrix& m) {
  std::string out = "label";
  for (const auto& l : m.labels) out += ',' + l;
  out += '\n';
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    out += m.labels[i];
    for (std::size_t j = 0; j < m.labels.size(); ++j)
      out += ',' + format_double(m.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    out += '\n';
  }
  return out;
}

std::string combined_distance_csv(const DistanceMatrix& lower, const DistanceMatrix& upper) {
  if (lower.labels != upper.labels) throw InputError("combined distance matrices need identical labels");
  DistanceMatrix m = lower;
  const auto n = m.d.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m.d(i, j) = i > j ? lower.d(i, j) : i < j ? upper.d(i, j) : 0.0;
  return distance_csv(m);
}

}  // namespace estrace::cluster
