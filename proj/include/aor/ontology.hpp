#pragma once

#include <algorithm>
#include <deque>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aor/error.hpp"
#include "aor/jsonl.hpp"

namespace aor {

struct AnatomicalObject {
  std::string id;
  std::string display_name;
  bool is_leaf = true;  // derived: no hierarchy children
};

struct Attribute {
  std::string id;
  std::string display_name;
  std::string category;
};

// Raw parsed KB document, prior to validation. Kept separate from OntologyKB
// so validate_kb can describe broken documents (cycles, dangling edges)
// without an indexed KB existing yet.
struct KbDocument {
  std::vector<std::string> categories;
  std::vector<AnatomicalObject> objects;
  std::vector<Attribute> attributes;
  std::vector<std::pair<std::string, std::string>> hierarchy;     // parent -> child
  std::vector<std::pair<std::string, std::string>> causal;        // child -> parent
  std::vector<std::pair<std::string, std::string>> restrictions;  // (object, attribute)
};

struct ValidationIssue {
  std::string kind;      // "no-objects", "duplicate-id", "dangling-reference", "cycle", ...
  std::string location;  // offending id/edge, best effort
  std::string message;
};

using ValidationReport = std::vector<ValidationIssue>;

namespace detail {

inline std::string require_string(const json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key) || !node[key].is_string()) {
    throw Error(ErrorKind::Parse, where + ": missing string field '" + key + "'");
  }
  return node[key].get<std::string>();
}

// True when the directed edge set contains a cycle; appends one issue per
// cycle-participating strongly connected component entry found by DFS.
inline void check_acyclic(const std::map<std::string, std::vector<std::string>>& adj,
                          const std::string& graph_name, ValidationReport& report) {
  std::map<std::string, int> state;  // 0 unseen, 1 on stack, 2 done
  for (const auto& [start, _] : adj) {
    if (state[start] != 0) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
    state[start] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto it = adj.find(node);
      if (it == adj.end() || next >= it->second.size()) {
        state[node] = 2;
        stack.pop_back();
        continue;
      }
      const std::string& child = it->second[next++];
      if (state[child] == 1) {
        report.push_back({"cycle", child, graph_name + " graph has a cycle through '" + child + "'"});
        continue;
      }
      if (state[child] == 0) {
        state[child] = 1;
        stack.emplace_back(child, 0);
      }
    }
  }
}

}  // namespace detail

inline KbDocument parse_kb_document(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "KB document must be a JSON object");
  for (const char* key : {"objects", "attributes", "categories", "hierarchy", "causal", "restrictions"}) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      throw Error(ErrorKind::Parse, std::string("KB document: missing array '") + key + "'");
    }
  }
  KbDocument kb;
  for (const auto& c : doc["categories"]) {
    if (!c.is_string()) throw Error(ErrorKind::Parse, "categories[] entries must be strings");
    kb.categories.push_back(c.get<std::string>());
  }
  for (const auto& o : doc["objects"]) {
    AnatomicalObject obj;
    obj.id = detail::require_string(o, "id", "objects[]");
    obj.display_name = detail::require_string(o, "display_name", "objects[] '" + obj.id + "'");
    kb.objects.push_back(std::move(obj));
  }
  for (const auto& a : doc["attributes"]) {
    Attribute attr;
    attr.id = detail::require_string(a, "id", "attributes[]");
    attr.display_name = detail::require_string(a, "display_name", "attributes[] '" + attr.id + "'");
    attr.category = detail::require_string(a, "category", "attributes[] '" + attr.id + "'");
    kb.attributes.push_back(std::move(attr));
  }
  for (const auto& e : doc["hierarchy"]) {
    kb.hierarchy.emplace_back(detail::require_string(e, "parent", "hierarchy[]"),
                              detail::require_string(e, "child", "hierarchy[]"));
  }
  for (const auto& e : doc["causal"]) {
    kb.causal.emplace_back(detail::require_string(e, "child", "causal[]"),
                           detail::require_string(e, "parent", "causal[]"));
  }
  for (const auto& r : doc["restrictions"]) {
    const std::string obj = detail::require_string(r, "object", "restrictions[]");
    if (!r.contains("attributes") || !r["attributes"].is_array()) {
      throw Error(ErrorKind::Parse, "restrictions[] '" + obj + "': missing array 'attributes'");
    }
    for (const auto& a : r["attributes"]) {
      if (!a.is_string()) throw Error(ErrorKind::Parse, "restrictions[] '" + obj + "': attribute ids must be strings");
      kb.restrictions.emplace_back(obj, a.get<std::string>());
    }
  }
  return kb;
}

// Pure checker: lists every invariant violation; an empty report means the
// document can be indexed into a queryable KB.
inline ValidationReport validate_kb(const KbDocument& kb) {
  ValidationReport report;
  if (kb.objects.empty()) report.push_back({"no-objects", "objects", "no objects declared"});

  std::set<std::string> object_ids;
  for (const auto& o : kb.objects) {
    if (!object_ids.insert(o.id).second) {
      report.push_back({"duplicate-id", o.id, "duplicate object id '" + o.id + "'"});
    }
    if (o.display_name.empty()) {
      report.push_back({"empty-display-name", o.id, "object '" + o.id + "' has empty display_name"});
    }
  }
  std::set<std::string> attribute_ids;
  const std::set<std::string> categories(kb.categories.begin(), kb.categories.end());
  for (const auto& a : kb.attributes) {
    if (!attribute_ids.insert(a.id).second) {
      report.push_back({"duplicate-id", a.id, "duplicate attribute id '" + a.id + "'"});
    }
    if (a.display_name.empty()) {
      report.push_back({"empty-display-name", a.id, "attribute '" + a.id + "' has empty display_name"});
    }
    if (!categories.count(a.category)) {
      report.push_back({"unknown-category", a.id,
                        "attribute '" + a.id + "' uses unknown category '" + a.category + "'"});
    }
  }

  std::map<std::string, std::vector<std::string>> hier_adj;
  for (const auto& [parent, child] : kb.hierarchy) {
    for (const auto& end : {parent, child}) {
      if (!object_ids.count(end)) {
        report.push_back({"dangling-reference", end,
                          "hierarchy edge " + parent + " -> " + child + " references unknown object '" + end + "'"});
      }
    }
    hier_adj[parent].push_back(child);
  }
  std::map<std::string, std::vector<std::string>> causal_adj;
  for (const auto& [child, parent] : kb.causal) {
    for (const auto& end : {child, parent}) {
      if (!attribute_ids.count(end)) {
        report.push_back({"dangling-reference", end,
                          "causal edge " + child + " -> " + parent + " references unknown attribute '" + end + "'"});
      }
    }
    causal_adj[child].push_back(parent);
  }
  for (const auto& [obj, attr] : kb.restrictions) {
    if (!object_ids.count(obj)) {
      report.push_back({"dangling-reference", obj, "restriction references unknown object '" + obj + "'"});
    }
    if (!attribute_ids.count(attr)) {
      report.push_back({"dangling-reference", attr, "restriction references unknown attribute '" + attr + "'"});
    }
  }
  detail::check_acyclic(hier_adj, "hierarchy", report);
  detail::check_acyclic(causal_adj, "causal", report);
  return report;
}

// Immutable, indexed view of a validated KB document. Query results are
// sorted by id so downstream corpora are reproducible.
class OntologyKB {
 public:
  static OntologyKB from_document(KbDocument doc) {
    const ValidationReport report = validate_kb(doc);
    if (!report.empty()) {
      const ValidationIssue* pick = &report.front();
      for (const auto& issue : report) {
        if (severity(issue.kind) < severity(pick->kind)) pick = &issue;
      }
      throw Error(kind_for(pick->kind), pick->message);
    }
    OntologyKB kb;
    kb.categories_.assign(doc.categories.begin(), doc.categories.end());
    std::sort(kb.categories_.begin(), kb.categories_.end());
    kb.categories_.erase(std::unique(kb.categories_.begin(), kb.categories_.end()),
                         kb.categories_.end());
    for (auto& o : doc.objects) kb.objects_.emplace(o.id, std::move(o));
    for (auto& a : doc.attributes) kb.attributes_.emplace(a.id, std::move(a));
    for (const auto& [parent, child] : doc.hierarchy) kb.children_[parent].insert(child);
    for (const auto& [child, parent] : doc.causal) kb.causal_parents_[child].insert(parent);
    for (const auto& [obj, attr] : doc.restrictions) kb.allowed_[obj].insert(attr);
    for (auto& [id, obj] : kb.objects_) {
      const auto it = kb.children_.find(id);
      obj.is_leaf = it == kb.children_.end() || it->second.empty();
    }
    return kb;
  }

  const std::vector<std::string>& category_keys() const { return categories_; }

  std::vector<std::string> object_ids() const { return keys(objects_); }
  std::vector<std::string> attribute_ids() const { return keys(attributes_); }

  bool has_object(const std::string& id) const { return objects_.count(id) != 0; }
  bool has_attribute(const std::string& id) const { return attributes_.count(id) != 0; }
  bool has_category(const std::string& key) const {
    return std::binary_search(categories_.begin(), categories_.end(), key);
  }

  const AnatomicalObject& object(const std::string& id) const {
    const auto it = objects_.find(id);
    if (it == objects_.end()) throw Error(ErrorKind::UnknownId, "unknown object '" + id + "'");
    return it->second;
  }

  const Attribute& attribute(const std::string& id) const {
    const auto it = attributes_.find(id);
    if (it == attributes_.end()) throw Error(ErrorKind::UnknownId, "unknown attribute '" + id + "'");
    return it->second;
  }

  // Direct hierarchy children, sorted by id.
  std::vector<std::string> children(const std::string& obj) const {
    object(obj);
    const auto it = children_.find(obj);
    if (it == children_.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

  // Transitive closure of causal parents implied by the attribute, sorted.
  std::vector<std::string> causal_parents(const std::string& attr) const {
    attribute(attr);
    std::set<std::string> seen;
    std::deque<std::string> frontier{attr};
    while (!frontier.empty()) {
      const std::string cur = std::move(frontier.front());
      frontier.pop_front();
      const auto it = causal_parents_.find(cur);
      if (it == causal_parents_.end()) continue;
      for (const auto& parent : it->second) {
        if (seen.insert(parent).second) frontier.push_back(parent);
      }
    }
    return {seen.begin(), seen.end()};
  }

  // Exactly the attributes with a restriction pair for obj, sorted.
  std::vector<std::string> allowed_attributes(const std::string& obj) const {
    object(obj);
    const auto it = allowed_.find(obj);
    if (it == allowed_.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

  bool allows(const std::string& obj, const std::string& attr) const {
    const auto it = allowed_.find(obj);
    return it != allowed_.end() && it->second.count(attr) != 0;
  }

  std::vector<std::string> attributes_in_category(const std::string& category) const {
    std::vector<std::string> out;
    for (const auto& [id, attr] : attributes_) {
      if (attr.category == category) out.push_back(id);
    }
    return out;
  }

 private:
  template <typename Map>
  static std::vector<std::string> keys(const Map& m) {
    std::vector<std::string> out;
    out.reserve(m.size());
    for (const auto& [k, _] : m) out.push_back(k);
    return out;
  }

  // Lower value = reported first when load_kb rejects a document.
  static int severity(const std::string& kind) {
    if (kind == "no-objects") return 0;
    if (kind == "dangling-reference") return 1;
    if (kind == "cycle") return 2;
    return 3;
  }

  static ErrorKind kind_for(const std::string& kind) {
    if (kind == "no-objects") return ErrorKind::NoObjects;
    if (kind == "dangling-reference") return ErrorKind::DanglingReference;
    if (kind == "cycle") return ErrorKind::Cycle;
    return ErrorKind::Parse;
  }

  std::vector<std::string> categories_;
  std::map<std::string, AnatomicalObject> objects_;
  std::map<std::string, Attribute> attributes_;
  std::map<std::string, std::set<std::string>> children_;
  std::map<std::string, std::set<std::string>> causal_parents_;  // direct edges
  std::map<std::string, std::set<std::string>> allowed_;
};

inline OntologyKB load_kb(const json& doc) {
  return OntologyKB::from_document(parse_kb_document(doc));
}

inline OntologyKB load_kb(const std::filesystem::path& path) {
  return load_kb(read_json_file(path));
}

inline OntologyKB load_kb_from_string(const std::string& text) {
  return load_kb(parse_json(text, "KB document"));
}

}  // namespace aor
