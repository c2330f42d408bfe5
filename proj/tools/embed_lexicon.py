#!/usr/bin/env python3
"""Regenerates include/ktl/text/lexicon_data.hpp from resources/*.txt."""
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
out = ['#pragma once', '', '// Bundled lexicon resources; kept byte-identical to resources/*.txt.', '',
       '#include <string_view>', '', 'namespace ktl::text::bundled {', '']
for name, var in [('stopwords.txt', 'kStopwords'), ('verbs.txt', 'kVerbs'), ('wh_rules.txt', 'kWhRules')]:
    body = (root / 'resources' / name).read_text()
    out.append(f'inline constexpr std::string_view {var} = R"lex({body})lex";')
    out.append('')
out.append('}  // namespace ktl::text::bundled')
(root / 'include/ktl/text/lexicon_data.hpp').write_text('\n'.join(out) + '\n')
