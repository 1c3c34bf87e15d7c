#pragma once

#include <string>
#include <vector>

namespace oracle {

// Minimal XML structure check: balanced, properly nested elements, quoted attributes and a
// single <svg> root. Returns an empty string when the document passes.
inline std::string svg_problem(const std::string& doc) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  int roots = 0;
  while ((i = doc.find('<', i)) != std::string::npos) {
    const std::size_t end = doc.find('>', i);
    if (end == std::string::npos) return "unterminated tag";
    const std::string tag = doc.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return "empty tag";
    if (tag[0] == '?' || tag[0] == '!') continue;
    std::size_t quotes = 0;
    for (char c : tag) quotes += c == '"';
    if (quotes % 2) return "unbalanced quotes in <" + tag + ">";
    if (tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return "unexpected </" + name + ">";
      stack.pop_back();
      continue;
    }
    const std::string name = tag.substr(0, tag.find_first_of(" \n\t/"));
    if (stack.empty()) {
      if (name != "svg") return "root element is <" + name + ">";
      ++roots;
    }
    if (tag.back() != '/') stack.push_back(name);
  }
  if (!stack.empty()) return "unclosed <" + stack.back() + ">";
  if (roots != 1) return "expected one <svg> root";
  for (std::size_t k = 0; k < doc.size(); ++k) {
    if (doc[k] != '&') continue;
    const std::size_t semi = doc.find(';', k);
    const std::string ent = doc.substr(k, semi == std::string::npos ? 1 : semi - k + 1);
    if (ent != "&amp;" && ent != "&lt;" && ent != "&gt;" && ent != "&quot;" && ent != "&apos;")
      return "bare ampersand";
  }
  return {};
}

}  // namespace oracle
