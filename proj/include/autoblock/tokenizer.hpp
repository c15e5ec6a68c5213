#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace autoblock {

/// ASCII-only lowercasing; bytes >= 0x80 (UTF-8 continuation data) are untouched.
std::string ascii_lower(std::string_view raw);

/// Penn Treebank word tokenization, rule-for-rule with NLTK's
/// TreebankWordTokenizer (default options). Rules, in order of application:
///
///   1. starting quotes: leading `"` -> ``; `` padded; `"` or `''` after
///      one of ` ([{<` -> ``
///   2. punctuation: `:`/`,` split unless followed by a digit; `...` isolated;
///      `;@#$%&` isolated; a final period (optionally followed by closing
///      brackets/quotes) split off; `?!` isolated; `'` followed by a space
///      split off
///   3. brackets `[](){}<>` isolated
///   4. `--` isolated
///   5. ending quotes: `''` and `"` -> ''; clitics 's 'm 'd and a bare
///      trailing `'` split off; 'll 're 've n't split off
///   6. MacIntyre contractions: cannot, d'ye, gimme, gonna, gotta, lemme,
///      more'n, wanna (split in two); 'tis, 'twas
///
/// Character classes (\d, \s, \b) are ASCII; non-ASCII bytes count as
/// non-word characters.
std::vector<std::string> treebank_tokenize(std::string_view text);

}  // namespace autoblock
