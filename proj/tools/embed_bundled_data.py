#!/usr/bin/env python3
"""Regenerates include/fluentqa/bundled_data.hpp from the files in data/."""

import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
HEADER = ROOT / "include" / "fluentqa" / "bundled_data.hpp"
ENTRIES = [
    ("kIrregularVerbsTsv", "data/irregular_verbs.tsv"),
    ("kStRules", "data/st_rules.txt"),
]

LICENSE = """\
// bundled_data.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// \\file
// Generated by tools/embed_bundled_data.py. Do not edit.
"""


def main():
    out = [LICENSE, "#ifndef FLUENTQA_BUNDLED_DATA_HPP_",
           "#define FLUENTQA_BUNDLED_DATA_HPP_", "",
           "#include <string_view>", "", "namespace fluentqa::bundled {", ""]
    for name, rel in ENTRIES:
        text = (ROOT / rel).read_text()
        assert ")fqa\"" not in text
        out.append(f"// {rel}")
        out.append(f'inline constexpr std::string_view {name} = R"fqa({text})fqa";')
        out.append("")
    out += ["}  // namespace fluentqa::bundled", "",
            "#endif  // FLUENTQA_BUNDLED_DATA_HPP_", ""]
    HEADER.write_text("\n".join(out))


if __name__ == "__main__":
    main()
