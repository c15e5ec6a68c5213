#include "autoblock/tokenizer.hpp"

#include <regex>
#include <utility>

namespace autoblock {

namespace {

struct Rule {
  std::regex pattern;
  std::string replacement;
};

Rule rule(const char* pattern, const char* replacement, bool icase = false) {
  auto flags = std::regex::ECMAScript | std::regex::optimize;
  if (icase) flags |= std::regex::icase;
  return {std::regex(pattern, flags), replacement};
}

Rule contraction(const char* pattern) { return rule(pattern, " $1 $2 ", true); }

struct TreebankRules {
  std::vector<Rule> starting_quotes;
  std::vector<Rule> punctuation;
  Rule parens_brackets;
  Rule double_dashes;
  std::vector<Rule> ending_quotes;
  std::vector<Rule> contractions;

  TreebankRules()
      : starting_quotes{rule(R"(^")", "``"),
                        rule(R"((``))", " $1 "),
                        rule(R"(([ \(\[{<])("|''))", "$1 `` ")},
        punctuation{rule(R"(([:,])([^\d]))", " $1 $2"),
                    rule(R"(([:,])$)", " $1 "),
                    rule(R"(\.\.\.)", " ... "),
                    rule(R"([;@#$%&])", " $& "),
                    rule(R"(([^\.])(\.)([\]\)}>"']*)\s*$)", "$1 $2$3 "),
                    rule(R"([?!])", " $& "),
                    rule(R"(([^'])' )", "$1 ' ")},
        parens_brackets(rule(R"([\]\[\(\)\{\}<>])", " $& ")),
        double_dashes(rule(R"(--)", " -- ")),
        ending_quotes{rule(R"('')", " '' "),
                      rule(R"(")", " '' "),
                      rule(R"(([^' ])('[sS]|'[mM]|'[dD]|') )", "$1 $2 "),
                      rule(R"(([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) )", "$1 $2 ")},
        contractions{contraction(R"(\b(can)(not)\b)"),
                     contraction(R"(\b(d)('ye)\b)"),
                     contraction(R"(\b(gim)(me)\b)"),
                     contraction(R"(\b(gon)(na)\b)"),
                     contraction(R"(\b(got)(ta)\b)"),
                     contraction(R"(\b(lem)(me)\b)"),
                     contraction(R"(\b(more)('n)\b)"),
                     contraction(R"(\b(wan)(na)(?=\s))"),
                     contraction(R"( ('t)(is)\b)"),
                     contraction(R"( ('t)(was)\b)")} {}
};

const TreebankRules& rules() {
  static const TreebankRules instance;
  return instance;
}

std::string apply_rule(const Rule& r, const std::string& text) {
  return std::regex_replace(text, r.pattern, r.replacement);
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string ascii_lower(std::string_view raw) {
  std::string out(raw);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> treebank_tokenize(std::string_view input) {
  std::vector<std::string> tokens;
  bool blank = true;
  for (char c : input) {
    if (!is_space(c)) {
      blank = false;
      break;
    }
  }
  if (blank) return tokens;

  const TreebankRules& tb = rules();
  std::string text(input);
  for (const Rule& r : tb.starting_quotes) text = apply_rule(r, text);
  for (const Rule& r : tb.punctuation) text = apply_rule(r, text);
  text = apply_rule(tb.parens_brackets, text);
  text = apply_rule(tb.double_dashes, text);
  text = " " + text + " ";
  for (const Rule& r : tb.ending_quotes) text = apply_rule(r, text);
  for (const Rule& r : tb.contractions) text = apply_rule(r, text);

  std::string current;
  for (char c : text) {
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace autoblock
